// Shared construction helpers for tests: assemble a full problem instance
// from pixel counts, orders, and a list of unknown pixels.
#pragma once

#include <vector>

#include "tvspline/collocation.hpp"
#include "tvspline/optimizer.hpp"
#include "tvspline/pixel_grid.hpp"
#include "tvspline/quadrature.hpp"
#include "tvspline/spline_basis.hpp"

namespace testsupport {

struct Instance {
    tvspline::PixelGrid px;
    tvspline::InpaintingMask mask;
    tvspline::TensorKnotGrid grid;
    tvspline::SiteSet sites;
    tvspline::ActiveRegion region;
    tvspline::QuadratureRule rule;
    tvspline::ProblemData data;
};

inline tvspline::InpaintingMask make_mask(const tvspline::PixelGrid& px,
                                          const std::vector<std::vector<int>>& unknown) {
    tvspline::InpaintingMask mask;
    mask.dims = px.counts;
    mask.unknown.assign(px.pixel_count(), 0);
    for (const auto& beta : unknown)
        mask.unknown[tvspline::flat_index(px.counts, beta)] = 1;
    return mask;
}

inline Instance make_instance(std::vector<int> counts, std::vector<int> orders,
                              const std::vector<std::vector<int>>& unknown,
                              const std::vector<double>& pixel_values,
                              tvspline::InterpolationMode mode = tvspline::InterpolationMode::exact,
                              double epsilon = 0.0, std::vector<int> q = {}) {
    using namespace tvspline;
    Instance inst{PixelGrid::unit_spacing(counts), {}, {}, {}, {}, {}, {}};
    inst.mask = make_mask(inst.px, unknown);
    inst.grid = build_knot_grid(inst.px, orders);
    inst.sites = build_site_sets(inst.grid, inst.px, inst.mask);
    inst.region = active_region(inst.grid, inst.sites);
    if (q.empty()) q = orders;
    inst.rule = build_rule(inst.region, q);
    inst.data.gradient = assemble_gradient_operator(inst.grid, inst.rule);
    inst.data.collocation =
        assemble_collocation(inst.grid, inst.sites, SiteSelection::constrained_only);
    inst.data.rhs =
        collocation_rhs(inst.sites, inst.px, pixel_values, SiteSelection::constrained_only);
    inst.data.mode = mode;
    inst.data.epsilon = epsilon;
    return inst;
}

}  // namespace testsupport
