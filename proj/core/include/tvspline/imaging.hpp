#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tvspline/image.hpp"
#include "tvspline/pixel_grid.hpp"
#include "tvspline/spline_basis.hpp"

namespace tvspline {

/// Sample the spline with the given coefficients at every pixel center.
/// Values stay real-valued; clamping and quantization happen only when an
/// image is written to a file.
PixelImage render(const TensorKnotGrid& grid, std::span<const double> coefficients,
                  const PixelGrid& pixels);

enum class MaskKind { random_fraction, scratches, text_bitmap };

/// Recipe for an inpainting mask. Generated masks are pure functions of
/// (spec, dims) and never touch the outer pixel ring.
struct MaskSpec {
    MaskKind kind = MaskKind::random_fraction;

    /// random_fraction: flags floor(fraction * total pixel count) distinct
    /// interior pixels; fraction must lie in (0, 1).
    double fraction = 0.03;

    /// scratches: straight segments dilated by a square of side width.
    /// Random endpoints are drawn uniformly over interior pixels unless
    /// explicit ones (r0, c0, r1, c1) are supplied, which then define the
    /// segments and override scratch_count.
    int scratch_count = 3;
    int scratch_width = 4;
    std::vector<std::array<int, 4>> endpoints;

    /// text_bitmap: mask file (image with nonzero = unknown, or run-length
    /// text); dimensions must match.
    std::string bitmap_path;

    std::uint64_t seed = 0;
};

/// Builds the mask for a rows x cols image. The result always satisfies
/// validate_mask(); masks covering every interior pixel are rejected.
InpaintingMask make_mask(const MaskSpec& spec, const std::vector<int>& dims);

struct NoiseSpec {
    double gaussian_sigma = 0.0;       // intensity units
    double salt_pepper_fraction = 0.0; // in [0, 1)
    std::uint64_t seed = 0;
};

struct NoisyImage {
    PixelImage image;
    /// Pixels sitting at the intensity minimum or maximum after corruption.
    /// Salt-and-pepper targets are drawn from interior pixels only, so with
    /// clean input data this is exactly the injected set.
    InpaintingMask implied_mask;
};

/// Adds Gaussian noise to every pixel, then sets a salt-and-pepper fraction
/// of interior pixels to exactly 0 or 255 with equal probability.
NoisyImage add_noise(const PixelImage& image, const NoiseSpec& spec,
                     double intensity_min = 0.0, double intensity_max = 255.0);

/// 20 * log10(|reference| / |reference - reconstruction|) in dB; +infinity
/// when the two images are identical.
double snr_db(const PixelImage& reference, const PixelImage& reconstruction);

/// Reads a binary PGM (P5) or 8-bit grayscale PNG, detected by content.
PixelImage read_image(const std::string& path);

/// Writes PGM or PNG depending on the file extension. Values are clamped to
/// [0, 255] and rounded half away from zero.
void write_image(const std::string& path, const PixelImage& image);

/// Reads a mask: a "mask-rle" run-length text file, or any readable image
/// where nonzero pixels are the unknown set.
InpaintingMask read_mask(const std::string& path);

/// Writes a mask as run-length text (.txt/.rle) or as an image (unknown
/// pixels white) for other extensions.
void write_mask(const std::string& path, const InpaintingMask& mask);

}  // namespace tvspline
