#pragma once

#include <span>
#include <vector>

#include "tvspline/pixel_grid.hpp"
#include "tvspline/sparse.hpp"
#include "tvspline/spline_basis.hpp"

namespace tvspline {

/// Tensor interpolation sites, one per basis function. The flat site index
/// equals the flat index of the basis function owning it, so "removing the
/// site of basis alpha" and "freeing alpha" are the same statement.
struct SiteSet {
    std::vector<std::vector<double>> axis_sites;  // per axis, strictly increasing
    std::vector<int> dims;                        // per-axis site count = m_j + n_j
    std::vector<char> constrained;                // 1 if the site's pixel is known
    std::vector<std::size_t> constrained_index;   // ascending flat indices with constrained = 1

    std::size_t site_count() const { return constrained.size(); }
    std::vector<double> site_coords(std::size_t flat) const;
};

/// Greville abscissae of one axis: each basis function's knot average.
/// Nondecreasing, first = a, last = b; the interior ones land on pixel
/// centers by construction of the knot grid.
std::vector<double> greville_axis(const AxisKnots& axis);

/// One axis of the site construction: every pixel center must end up a site,
/// so each center not already hit by a Greville abscissa pulls the nearest
/// one onto itself (ties go to the lower index). The endpoint abscissae stay
/// at a and b. Throws if the result is not strictly increasing.
std::vector<double> snap_axis_sites(std::span<const double> greville,
                                    std::span<const double> centers);

/// Full tensor site set for a knot grid built from these pixels, with each
/// site classified by whether its half-open pixel is known. An all-known
/// mask yields every site constrained.
SiteSet build_site_sets(const TensorKnotGrid& grid, const PixelGrid& pixels,
                        const InpaintingMask& mask);

enum class SiteSelection { all_sites, constrained_only };

/// Interpolation matrix rows: one eval_tensor_row per selected site, in
/// ascending flat site order. With all_sites the matrix is square.
SparseOperator assemble_collocation(const TensorKnotGrid& grid, const SiteSet& sites,
                                    SiteSelection selection);

/// Right-hand side matching assemble_collocation: the known image value of
/// the pixel containing each selected site. pixel_values is flat over the
/// pixel grid (last axis fastest).
std::vector<double> collocation_rhs(const SiteSet& sites, const PixelGrid& pixels,
                                    std::span<const double> pixel_values,
                                    SiteSelection selection);

}  // namespace tvspline
