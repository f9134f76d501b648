#include "tvspline/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tvspline {

ActiveRegion active_region(const TensorKnotGrid& grid, const SiteSet& sites) {
    if (sites.site_count() != grid.basis_count())
        throw std::invalid_argument("site set does not match the grid");

    ActiveRegion region;
    for (std::size_t flat = 0; flat < sites.site_count(); ++flat)
        if (!sites.constrained[flat]) region.free_indices.push_back(flat);
    if (region.free_indices.empty()) return region;

    const int d = grid.dim();
    const auto dims = grid.basis_counts();

    // Cells are indexed by the knot span per axis; only the nondegenerate
    // spans n-1 .. m+n-1 exist geometrically.
    std::vector<int> first_span(static_cast<std::size_t>(d)), span_count(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        first_span[static_cast<std::size_t>(j)] = grid.axes[j].order - 1;
        span_count[static_cast<std::size_t>(j)] = grid.axes[j].interior_count + 1;
    }
    std::size_t total_cells = 1;
    for (int j = 0; j < d; ++j) total_cells *= static_cast<std::size_t>(span_count[j]);
    std::vector<char> mark(total_cells, 0);

    for (std::size_t flat : region.free_indices) {
        const auto alpha = unflatten(dims, flat);
        Box support;
        support.lo.resize(static_cast<std::size_t>(d));
        support.hi.resize(static_cast<std::size_t>(d));
        std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            const auto& ax = grid.axes[j];
            support.lo[static_cast<std::size_t>(j)] = ax.support_begin(alpha[j]);
            support.hi[static_cast<std::size_t>(j)] = ax.support_end(alpha[j]);
            // Spans covered by the support, clipped to the nondegenerate ones.
            lo[static_cast<std::size_t>(j)] =
                std::max(alpha[j], first_span[static_cast<std::size_t>(j)]) -
                first_span[static_cast<std::size_t>(j)];
            hi[static_cast<std::size_t>(j)] =
                std::min(alpha[j] + ax.order - 1,
                         first_span[static_cast<std::size_t>(j)] +
                             span_count[static_cast<std::size_t>(j)] - 1) -
                first_span[static_cast<std::size_t>(j)];
        }
        region.support_boxes.push_back(std::move(support));

        MultiIndex rel(lo.begin(), lo.end());
        for (;;) {
            std::size_t cell_flat = 0;
            for (int j = 0; j < d; ++j)
                cell_flat = cell_flat * static_cast<std::size_t>(span_count[j]) +
                            static_cast<std::size_t>(rel[j]);
            mark[cell_flat] = 1;
            int j = d - 1;
            while (j >= 0 && ++rel[j] > hi[static_cast<std::size_t>(j)]) {
                rel[j] = lo[static_cast<std::size_t>(j)];
                --j;
            }
            if (j < 0) break;
        }
    }

    for (std::size_t cell_flat = 0; cell_flat < total_cells; ++cell_flat) {
        if (!mark[cell_flat]) continue;
        const auto rel = unflatten(span_count, cell_flat);
        MultiIndex span(static_cast<std::size_t>(d));
        Box box;
        box.lo.resize(static_cast<std::size_t>(d));
        box.hi.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            span[j] = rel[j] + first_span[static_cast<std::size_t>(j)];
            box.lo[static_cast<std::size_t>(j)] = grid.axes[j].knots[static_cast<std::size_t>(span[j])];
            box.hi[static_cast<std::size_t>(j)] =
                grid.axes[j].knots[static_cast<std::size_t>(span[j] + 1)];
        }
        region.cell_spans.push_back(std::move(span));
        region.cells.push_back(std::move(box));
    }
    return region;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int q) {
    if (q < 1 || q > 16) throw std::invalid_argument("quadrature order must be in 1..16");

    std::vector<double> x(static_cast<std::size_t>(q)), w(static_cast<std::size_t>(q));
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration on the Legendre polynomial from a Chebyshev guess.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < q; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = q * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(q - 1 - i)] = z;
        const double weight = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(i)] = weight;
        w[static_cast<std::size_t>(q - 1 - i)] = weight;
    }
    if (q % 2 == 1) x[static_cast<std::size_t>(q / 2)] = 0.0;
    return {std::move(x), std::move(w)};
}

QuadratureRule build_rule(const ActiveRegion& region, std::span<const int> points_per_axis) {
    QuadratureRule rule;
    if (region.cells.empty()) return rule;

    const int d = static_cast<int>(region.cells.front().lo.size());
    if (points_per_axis.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("one quadrature order per axis required");
    rule.dim = d;

    std::vector<std::vector<double>> ref_nodes(static_cast<std::size_t>(d)),
        ref_weights(static_cast<std::size_t>(d));
    std::size_t per_cell = 1;
    for (int j = 0; j < d; ++j) {
        auto [xj, wj] = gauss_legendre_nodes(points_per_axis[j]);
        ref_nodes[static_cast<std::size_t>(j)] = std::move(xj);
        ref_weights[static_cast<std::size_t>(j)] = std::move(wj);
        per_cell *= static_cast<std::size_t>(points_per_axis[j]);
    }

    rule.nodes.reserve(region.cells.size() * per_cell * static_cast<std::size_t>(d));
    rule.weights.reserve(region.cells.size() * per_cell);
    rule.owning_cell.reserve(region.cells.size() * per_cell);

    for (std::size_t c = 0; c < region.cells.size(); ++c) {
        const Box& cell = region.cells[c];
        MultiIndex idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            double weight = 1.0;
            for (int j = 0; j < d; ++j) {
                const double half = 0.5 * (cell.hi[static_cast<std::size_t>(j)] -
                                           cell.lo[static_cast<std::size_t>(j)]);
                const double mid = 0.5 * (cell.hi[static_cast<std::size_t>(j)] +
                                          cell.lo[static_cast<std::size_t>(j)]);
                rule.nodes.push_back(mid + half * ref_nodes[static_cast<std::size_t>(j)][idx[j]]);
                weight *= half * ref_weights[static_cast<std::size_t>(j)][idx[j]];
            }
            rule.weights.push_back(weight);
            rule.owning_cell.push_back(c);
            int j = d - 1;
            while (j >= 0 && ++idx[j] == points_per_axis[j]) idx[j--] = 0;
            if (j < 0) break;
        }
    }
    return rule;
}

double GradientOperator::objective(std::span<const double> f) const {
    std::vector<double> y(op.rows());
    op.apply(f, y);
    double total = 0.0;
    for (std::size_t i = 0; i < node_count; ++i) {
        double sq = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double v = y[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
            sq += v * v;
        }
        total += std::sqrt(sq);
    }
    return total;
}

GradientOperator assemble_gradient_operator(const TensorKnotGrid& grid,
                                            const QuadratureRule& rule) {
    GradientOperator K;
    K.dim = grid.dim();
    K.node_count = rule.node_count();
    K.op = SparseOperator(0, grid.basis_count());
    for (std::size_t i = 0; i < rule.node_count(); ++i) {
        auto rows = eval_gradient_rows(grid, rule.node(i));
        const double w = rule.weights[i];
        for (auto& row : rows) {
            for (auto& v : row.vals) v *= w;
            K.op.append_row(row);
        }
    }
    return K;
}

}  // namespace tvspline
