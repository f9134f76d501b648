#pragma once

#include <cstdint>
#include <span>

#include "tvspline/image.hpp"
#include "tvspline/optimizer.hpp"
#include "tvspline/pixel_grid.hpp"

namespace tvspline {

/// Forward-difference gradient with replicate boundary: two entries per
/// pixel (row direction, column direction), pixel-major; the last row and
/// column get zero in their outgoing direction.
std::vector<double> pixel_gradient(const PixelImage& image);

/// Negative adjoint of pixel_gradient: <grad u, p> = -<u, div p> for every
/// u and p.
std::vector<double> pixel_divergence(std::span<const double> p, int rows, int cols);

/// Isotropic pixel total variation, the sum of per-pixel gradient norms.
double pixel_tv(const PixelImage& image);

enum class PixelStart { random, mean };

struct PixelTvResult {
    PixelImage image;
    SolveDiagnostics diagnostics;
};

/// Classic pixel-domain TV inpainting: the same primal-dual iteration as the
/// spline solver, with the data prox overwriting known pixels. Known pixels
/// of the result are bit-identical to the input.
PixelTvResult solve_pixel_tv(const PixelImage& image, const InpaintingMask& mask,
                             const SolverConfig& config, PixelStart start,
                             std::uint64_t seed = 0);

}  // namespace tvspline
