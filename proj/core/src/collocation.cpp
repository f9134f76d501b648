#include "tvspline/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvspline {

std::vector<double> SiteSet::site_coords(std::size_t flat) const {
    const auto idx = unflatten(dims, flat);
    std::vector<double> x(axis_sites.size());
    for (std::size_t j = 0; j < axis_sites.size(); ++j) x[j] = axis_sites[j][idx[j]];
    return x;
}

std::vector<double> greville_axis(const AxisKnots& axis) {
    std::vector<double> xi(static_cast<std::size_t>(axis.basis_count()));
    for (int alpha = 0; alpha < axis.basis_count(); ++alpha) {
        double sum = 0.0;
        for (int i = 1; i <= axis.order - 1; ++i)
            sum += axis.knots[static_cast<std::size_t>(alpha + i)];
        xi[static_cast<std::size_t>(alpha)] = sum / (axis.order - 1);
    }
    return xi;
}

std::vector<double> snap_axis_sites(std::span<const double> greville,
                                    std::span<const double> centers) {
    if (greville.size() < 2 || centers.size() < 2)
        throw std::invalid_argument("need at least two abscissae and two centers");

    const double p = centers[1] - centers[0];
    const double tol = 1e-9 * p;
    std::vector<double> sites(greville.begin(), greville.end());

    // Which centers are already sites, and which abscissae may still move.
    // The two endpoint abscissae are pinned at a and b.
    std::vector<char> movable(sites.size(), 1);
    movable.front() = movable.back() = 0;
    std::vector<char> covered(centers.size(), 0);
    for (std::size_t g = 0; g < sites.size(); ++g) {
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (std::abs(sites[g] - centers[c]) <= tol) {
                covered[c] = 1;
                movable[g] = 0;
                break;
            }
        }
    }

    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (covered[c]) continue;
        std::size_t best = sites.size();
        double best_dist = 0.0;
        for (std::size_t g = 1; g + 1 < sites.size(); ++g) {
            if (!movable[g]) continue;
            const double dist = std::abs(greville[g] - centers[c]);
            if (best == sites.size() || dist < best_dist) {
                best = g;
                best_dist = dist;
            }
        }
        if (best == sites.size())
            throw std::invalid_argument("no free abscissa left to place on a pixel center");
        sites[best] = centers[c];
        movable[best] = 0;
    }

    for (std::size_t g = 0; g + 1 < sites.size(); ++g) {
        if (!(sites[g] < sites[g + 1]))
            throw std::invalid_argument("snapping produced duplicate interpolation sites");
    }
    return sites;
}

SiteSet build_site_sets(const TensorKnotGrid& grid, const PixelGrid& pixels,
                        const InpaintingMask& mask) {
    if (grid.dim() != pixels.dim())
        throw std::invalid_argument("grid and pixel dimensions differ");
    if (mask.dims != pixels.counts)
        throw std::invalid_argument("mask dimensions do not match the pixel grid");

    SiteSet sites;
    sites.dims = grid.basis_counts();
    sites.axis_sites.resize(static_cast<std::size_t>(grid.dim()));
    for (int j = 0; j < grid.dim(); ++j) {
        std::vector<double> centers(static_cast<std::size_t>(pixels.counts[j]));
        for (int beta = 0; beta < pixels.counts[j]; ++beta)
            centers[static_cast<std::size_t>(beta)] = pixels.center(j, beta);
        sites.axis_sites[static_cast<std::size_t>(j)] =
            snap_axis_sites(greville_axis(grid.axes[j]), centers);
    }

    const std::size_t total = grid.basis_count();
    sites.constrained.assign(total, 0);
    const int d = grid.dim();
    MultiIndex idx(static_cast<std::size_t>(d), 0);
    std::vector<int> beta(static_cast<std::size_t>(d));
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (int j = 0; j < d; ++j)
            beta[static_cast<std::size_t>(j)] =
                pixels.pixel_of(j, sites.axis_sites[static_cast<std::size_t>(j)][idx[j]]);
        const std::size_t pixel_flat = flat_index(pixels.counts, beta);
        if (!mask.unknown[pixel_flat]) {
            sites.constrained[flat] = 1;
            sites.constrained_index.push_back(flat);
        }
        int j = d - 1;
        while (j >= 0 && ++idx[j] == sites.dims[static_cast<std::size_t>(j)]) idx[j--] = 0;
    }
    return sites;
}

SparseOperator assemble_collocation(const TensorKnotGrid& grid, const SiteSet& sites,
                                    SiteSelection selection) {
    SparseOperator op(0, grid.basis_count());
    auto add_site = [&](std::size_t flat) {
        const auto x = sites.site_coords(flat);
        op.append_row(eval_tensor_row(grid, x));
    };
    if (selection == SiteSelection::all_sites) {
        for (std::size_t flat = 0; flat < sites.site_count(); ++flat) add_site(flat);
    } else {
        for (std::size_t flat : sites.constrained_index) add_site(flat);
    }
    return op;
}

std::vector<double> collocation_rhs(const SiteSet& sites, const PixelGrid& pixels,
                                    std::span<const double> pixel_values,
                                    SiteSelection selection) {
    if (pixel_values.size() != pixels.pixel_count())
        throw std::invalid_argument("pixel value vector has the wrong length");

    const int d = pixels.dim();
    auto value_at_site = [&](std::size_t flat) {
        const auto x = sites.site_coords(flat);
        std::vector<int> beta(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) beta[static_cast<std::size_t>(j)] = pixels.pixel_of(j, x[j]);
        return pixel_values[flat_index(pixels.counts, beta)];
    };

    std::vector<double> rhs;
    if (selection == SiteSelection::all_sites) {
        rhs.reserve(sites.site_count());
        for (std::size_t flat = 0; flat < sites.site_count(); ++flat)
            rhs.push_back(value_at_site(flat));
    } else {
        rhs.reserve(sites.constrained_index.size());
        for (std::size_t flat : sites.constrained_index) rhs.push_back(value_at_site(flat));
    }
    return rhs;
}

}  // namespace tvspline
