#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tvspline/collocation.hpp"
#include "tvspline/sparse.hpp"
#include "tvspline/spline_basis.hpp"

namespace tvspline {

/// The part of the domain the total variation term acts on: the union of
/// supports of the basis functions freed by the mask, enumerated as whole
/// nondegenerate knot cells.
struct ActiveRegion {
    std::vector<std::size_t> free_indices;  // ascending flat basis indices
    std::vector<MultiIndex> cell_spans;     // per cell, the knot span per axis
    std::vector<Box> cells;                 // matching cell boxes
    std::vector<Box> support_boxes;         // one support box per free index

    bool empty() const { return cells.empty(); }
};

/// Free indices are the owners of the sites removed by the mask; the cells
/// are every nondegenerate knot cell inside the union of their supports.
/// An all-constrained site set yields an empty region.
ActiveRegion active_region(const TensorKnotGrid& grid, const SiteSet& sites);

/// Nodes and weights on [-1, 1], exact for polynomials of degree 2q - 1.
/// Requires 1 <= q <= 16.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int q);

/// Tensor Gauss-Legendre nodes over the active cells. Nodes are stored
/// node-major (node i occupies coordinates [i*dim, (i+1)*dim)); weights carry
/// the cell volume, so per cell they sum to it.
struct QuadratureRule {
    int dim = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<std::size_t> owning_cell;  // index into ActiveRegion::cells

    std::size_t node_count() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return std::span<const double>(nodes).subspan(i * static_cast<std::size_t>(dim),
                                                      static_cast<std::size_t>(dim));
    }
};

QuadratureRule build_rule(const ActiveRegion& region, std::span<const int> points_per_axis);

/// The weighted gradient-collocation operator: d rows per node, row block
/// for node theta applied to f gives w_theta * grad s(theta).
struct GradientOperator {
    SparseOperator op;
    int dim = 0;
    std::size_t node_count = 0;

    /// Sum over nodes of the Euclidean block norm of op * f, i.e. the
    /// quadrature value of the total variation over the active region.
    double objective(std::span<const double> f) const;
};

GradientOperator assemble_gradient_operator(const TensorKnotGrid& grid,
                                            const QuadratureRule& rule);

}  // namespace tvspline
