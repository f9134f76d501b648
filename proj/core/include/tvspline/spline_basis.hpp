#pragma once

#include <span>
#include <vector>

#include "tvspline/pixel_grid.hpp"
#include "tvspline/sparse.hpp"

namespace tvspline {

/// Basis and coefficient multi-indices are 0-based throughout;
/// alpha_j ranges over 0 .. m_j + n_j - 1.
using MultiIndex = std::vector<int>;

/// Knot sequence of one axis: order n >= 2, m uniformly spaced interior
/// knots, and the endpoint knots repeated n times each, so the basis
/// interpolates at the interval ends.
struct AxisKnots {
    int order = 0;           // n_j
    int interior_count = 0;  // m_j
    double a = 0.0, b = 0.0;
    std::vector<double> knots;  // size m + 2n, nondecreasing

    int basis_count() const { return interior_count + order; }

    /// Support of basis function alpha is [knots[alpha], knots[alpha+order]].
    double support_begin(int alpha) const { return knots[alpha]; }
    double support_end(int alpha) const { return knots[alpha + order]; }

    void validate() const;
};

struct TensorKnotGrid {
    std::vector<AxisKnots> axes;

    int dim() const { return static_cast<int>(axes.size()); }

    std::size_t basis_count() const {
        std::size_t total = 1;
        for (const auto& ax : axes) total *= static_cast<std::size_t>(ax.basis_count());
        return total;
    }

    std::vector<int> basis_counts() const {
        std::vector<int> n;
        n.reserve(axes.size());
        for (const auto& ax : axes) n.push_back(ax.basis_count());
        return n;
    }
};

/// Coefficients are stored lexicographically in the basis multi-index with
/// the last axis fastest; this is the one flattening convention used for
/// coefficient vectors, collocation rows, and file I/O.
std::size_t flat_index(std::span<const int> dims, std::span<const int> index);

/// Inverse of flat_index.
MultiIndex unflatten(std::span<const int> dims, std::size_t flat);

/// Axis-aligned box inside R; lo == hi per axis is allowed (point/degenerate
/// cells count as boxes too).
struct Box {
    std::vector<double> lo, hi;
};

/// Knot grid matched to the pixel grid: per axis, odd orders place the m =
/// mu-1 interior knots on the pixel boundaries, even orders place the m = mu
/// interior knots on the pixel centers; endpoints carry full multiplicity.
/// Requires mu_j >= n_j >= 2.
TensorKnotGrid build_knot_grid(const PixelGrid& pixels, std::span<const int> orders);

/// Single B-spline value B_alpha(x) on one axis, 0-based alpha.
/// The value at x == b is taken as the limit from the left, so the basis
/// still sums to one and the last function interpolates at b.
double eval_axis_bspline(const AxisKnots& axis, int alpha, double x);

/// Row of all tensor-product B-spline values at x: at most prod(n_j)
/// nonzeros, nonnegative, summing to one.
SparseRow eval_tensor_row(const TensorKnotGrid& grid, std::span<const double> x);

/// The d partial-derivative rows (d/dx_j B_alpha(x))_alpha. At interior
/// knots the derivative is taken one-sided from the right (left at x == b_j),
/// matching eval_tensor_row's span convention.
std::vector<SparseRow> eval_gradient_rows(const TensorKnotGrid& grid, std::span<const double> x);

/// All basis indices whose (closed) support box intersects the union of the
/// given boxes; touching counts. Returned flat indices are sorted and unique.
std::vector<std::size_t> index_set_for_domain(const TensorKnotGrid& grid,
                                              std::span<const Box> domain);

/// s(x) = B(x) f
double eval_spline(const TensorKnotGrid& grid, std::span<const double> coeffs,
                   std::span<const double> x);

/// grad s(x)
std::vector<double> eval_spline_gradient(const TensorKnotGrid& grid,
                                         std::span<const double> coeffs,
                                         std::span<const double> x);

namespace detail {

/// Index s with knots[s] <= x < knots[s+1], clamped to the nondegenerate
/// spans n-1 .. m+n-1; x == b maps to the last span (left-limit convention).
int find_span(const AxisKnots& axis, double x);

/// Values of the `order` B-splines of that order which are nonzero on the
/// given span, i.e. indices span-order+1 .. span. out must hold `order`
/// entries. Valid for 1 <= order <= axis.order.
void eval_span_basis(const AxisKnots& axis, int span, double x, int order, double* out);

/// Derivative values of the axis.order B-splines nonzero on the span
/// (indices span-order+1 .. span), via the weighted difference of
/// order-(n-1) values. out must hold axis.order entries.
void eval_span_derivatives(const AxisKnots& axis, int span, double x, double* out);

}  // namespace detail

}  // namespace tvspline
