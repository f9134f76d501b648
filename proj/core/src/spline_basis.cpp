#include "tvspline/spline_basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvspline {

void AxisKnots::validate() const {
    if (order < 2) throw std::invalid_argument("spline order must be at least 2");
    if (interior_count < 1) throw std::invalid_argument("axis needs at least one interior knot");
    if (!(a < b)) throw std::invalid_argument("axis interval is empty");
    if (knots.size() != static_cast<std::size_t>(interior_count + 2 * order))
        throw std::invalid_argument("knot vector has the wrong length");
    if (!std::is_sorted(knots.begin(), knots.end()))
        throw std::invalid_argument("knot vector is not nondecreasing");
    for (int i = 0; i < order; ++i) {
        if (knots[i] != a || knots[knots.size() - 1 - i] != b)
            throw std::invalid_argument("endpoint knots must have full multiplicity");
    }
}

std::size_t flat_index(std::span<const int> dims, std::span<const int> index) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < dims.size(); ++j)
        flat = flat * static_cast<std::size_t>(dims[j]) + static_cast<std::size_t>(index[j]);
    return flat;
}

MultiIndex unflatten(std::span<const int> dims, std::size_t flat) {
    MultiIndex index(dims.size());
    for (std::size_t j = dims.size(); j-- > 0;) {
        index[j] = static_cast<int>(flat % static_cast<std::size_t>(dims[j]));
        flat /= static_cast<std::size_t>(dims[j]);
    }
    return index;
}

TensorKnotGrid build_knot_grid(const PixelGrid& pixels, std::span<const int> orders) {
    pixels.validate();
    if (orders.size() != static_cast<std::size_t>(pixels.dim()))
        throw std::invalid_argument("one spline order per axis required");

    TensorKnotGrid grid;
    grid.axes.reserve(orders.size());
    for (int j = 0; j < pixels.dim(); ++j) {
        const int n = orders[j];
        const int mu = pixels.counts[j];
        if (n < 2) throw std::invalid_argument("spline order must be at least 2");
        if (n > 32) throw std::invalid_argument("spline order must be at most 32");
        if (mu < n) throw std::invalid_argument("need at least as many pixels as the spline order");

        AxisKnots axis;
        axis.order = n;
        axis.a = pixels.lower[j];
        axis.b = pixels.upper[j];
        const double p = pixels.pixel_size(j);

        const bool odd = (n % 2 != 0);
        axis.interior_count = odd ? mu - 1 : mu;
        axis.knots.assign(static_cast<std::size_t>(axis.interior_count + 2 * n), axis.a);
        for (int k = 1; k <= axis.interior_count; ++k) {
            const double offset = odd ? k * p : (k - 0.5) * p;
            axis.knots[static_cast<std::size_t>(n - 1 + k)] = axis.a + offset;
        }
        for (int i = 0; i < n; ++i)
            axis.knots[axis.knots.size() - 1 - static_cast<std::size_t>(i)] = axis.b;

        grid.axes.push_back(std::move(axis));
    }
    return grid;
}

namespace detail {

int find_span(const AxisKnots& axis, double x) {
    const int n = axis.order;
    const int last = axis.interior_count + n - 1;  // final nondegenerate span
    auto it = std::upper_bound(axis.knots.begin(), axis.knots.end(), x);
    int span = static_cast<int>(it - axis.knots.begin()) - 1;
    return std::clamp(span, n - 1, last);
}

void eval_span_basis(const AxisKnots& axis, int span, double x, int order, double* out) {
    const auto& t = axis.knots;
    double left[32], right[32];
    out[0] = 1.0;
    for (int k = 1; k < order; ++k) {
        left[k] = x - t[static_cast<std::size_t>(span + 1 - k)];
        right[k] = t[static_cast<std::size_t>(span + k)] - x;
        double saved = 0.0;
        for (int r = 0; r < k; ++r) {
            const double tmp = out[r] / (right[r + 1] + left[k - r]);
            out[r] = saved + right[r + 1] * tmp;
            saved = left[k - r] * tmp;
        }
        out[k] = saved;
    }
}

void eval_span_derivatives(const AxisKnots& axis, int span, double x, double* out) {
    const int n = axis.order;
    const auto& t = axis.knots;

    double lower[32];
    eval_span_basis(axis, span, x, n - 1, lower);
    // lower[i] is the order-(n-1) spline with index span-n+2+i, i = 0..n-2.

    for (int j = 0; j < n; ++j) {
        const int alpha = span - n + 1 + j;
        double value = 0.0;
        const double len_l = t[static_cast<std::size_t>(alpha + n - 1)] -
                             t[static_cast<std::size_t>(alpha)];
        if (j >= 1 && len_l > 0.0) value += lower[j - 1] / len_l;
        const double len_r = t[static_cast<std::size_t>(alpha + n)] -
                             t[static_cast<std::size_t>(alpha + 1)];
        if (j <= n - 2 && len_r > 0.0) value -= lower[j] / len_r;
        out[j] = (n - 1) * value;
    }
}

}  // namespace detail

double eval_axis_bspline(const AxisKnots& axis, int alpha, double x) {
    if (alpha < 0 || alpha >= axis.basis_count())
        throw std::out_of_range("basis index out of range");
    if (x < axis.a || x > axis.b) return 0.0;
    const int span = detail::find_span(axis, x);
    const int first = span - axis.order + 1;
    if (alpha < first || alpha > span) return 0.0;
    double values[32];
    detail::eval_span_basis(axis, span, x, axis.order, values);
    return values[alpha - first];
}

namespace {

struct AxisEval {
    int first = 0;   // lowest nonzero basis index on the containing span
    int count = 0;   // == order
    double values[32];
    double derivs[32];
};

AxisEval evaluate_axis(const AxisKnots& axis, double x, bool with_derivatives) {
    AxisEval ev;
    const int span = detail::find_span(axis, x);
    ev.first = span - axis.order + 1;
    ev.count = axis.order;
    detail::eval_span_basis(axis, span, x, axis.order, ev.values);
    if (with_derivatives) detail::eval_span_derivatives(axis, span, x, ev.derivs);
    return ev;
}

void check_point(const TensorKnotGrid& grid, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(grid.dim()))
        throw std::invalid_argument("point dimension does not match the grid");
    for (int j = 0; j < grid.dim(); ++j) {
        if (x[j] < grid.axes[j].a || x[j] > grid.axes[j].b)
            throw std::invalid_argument("evaluation point lies outside the domain");
    }
}

template <typename Emit>
void for_each_tensor_entry(const TensorKnotGrid& grid, std::span<const int> dims,
                           std::span<const AxisEval> evals, Emit&& emit) {
    const int d = grid.dim();
    MultiIndex offset(static_cast<std::size_t>(d), 0);
    for (;;) {
        std::size_t flat = 0;
        for (int j = 0; j < d; ++j) {
            flat = flat * static_cast<std::size_t>(dims[j]) +
                   static_cast<std::size_t>(evals[j].first + offset[j]);
        }
        emit(flat, std::span<const int>(offset));
        int j = d - 1;
        while (j >= 0 && ++offset[j] == evals[j].count) offset[j--] = 0;
        if (j < 0) break;
    }
}

}  // namespace

SparseRow eval_tensor_row(const TensorKnotGrid& grid, std::span<const double> x) {
    check_point(grid, x);
    const int d = grid.dim();
    std::vector<AxisEval> evals(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) evals[j] = evaluate_axis(grid.axes[j], x[j], false);
    const auto dims = grid.basis_counts();

    SparseRow row;
    for_each_tensor_entry(grid, dims, evals, [&](std::size_t flat, std::span<const int> offset) {
        double v = 1.0;
        for (int j = 0; j < d; ++j) v *= evals[j].values[offset[j]];
        if (v != 0.0) {
            row.cols.push_back(static_cast<std::uint32_t>(flat));
            row.vals.push_back(v);
        }
    });
    return row;
}

std::vector<SparseRow> eval_gradient_rows(const TensorKnotGrid& grid, std::span<const double> x) {
    check_point(grid, x);
    const int d = grid.dim();
    std::vector<AxisEval> evals(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) evals[j] = evaluate_axis(grid.axes[j], x[j], true);
    const auto dims = grid.basis_counts();

    std::vector<SparseRow> rows(static_cast<std::size_t>(d));
    for_each_tensor_entry(grid, dims, evals, [&](std::size_t flat, std::span<const int> offset) {
        for (int k = 0; k < d; ++k) {
            double v = 1.0;
            for (int j = 0; j < d; ++j) {
                v *= (j == k) ? evals[j].derivs[offset[j]] : evals[j].values[offset[j]];
            }
            if (v != 0.0) {
                rows[k].cols.push_back(static_cast<std::uint32_t>(flat));
                rows[k].vals.push_back(v);
            }
        }
    });
    return rows;
}

std::vector<std::size_t> index_set_for_domain(const TensorKnotGrid& grid,
                                              std::span<const Box> domain) {
    const int d = grid.dim();
    const auto dims = grid.basis_counts();
    std::vector<char> mark(grid.basis_count(), 0);

    for (const Box& box : domain) {
        if (box.lo.size() != static_cast<std::size_t>(d) ||
            box.hi.size() != static_cast<std::size_t>(d))
            throw std::invalid_argument("box dimension does not match the grid");

        // Per axis, the indices whose closed support meets [lo, hi] form a
        // contiguous range.
        std::vector<int> first(static_cast<std::size_t>(d)), last(static_cast<std::size_t>(d));
        bool empty = false;
        for (int j = 0; j < d; ++j) {
            const auto& ax = grid.axes[j];
            int lo_idx = ax.basis_count();
            for (int alpha = 0; alpha < ax.basis_count(); ++alpha) {
                if (ax.support_end(alpha) >= box.lo[j]) {
                    lo_idx = alpha;
                    break;
                }
            }
            int hi_idx = -1;
            for (int alpha = ax.basis_count() - 1; alpha >= 0; --alpha) {
                if (ax.support_begin(alpha) <= box.hi[j]) {
                    hi_idx = alpha;
                    break;
                }
            }
            if (lo_idx > hi_idx) {
                empty = true;
                break;
            }
            first[static_cast<std::size_t>(j)] = lo_idx;
            last[static_cast<std::size_t>(j)] = hi_idx;
        }
        if (empty) continue;

        MultiIndex index(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) index[j] = first[static_cast<std::size_t>(j)];
        for (;;) {
            mark[flat_index(dims, index)] = 1;
            int j = d - 1;
            while (j >= 0 && ++index[j] > last[static_cast<std::size_t>(j)]) {
                index[j] = first[static_cast<std::size_t>(j)];
                --j;
            }
            if (j < 0) break;
        }
    }

    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < mark.size(); ++i)
        if (mark[i]) result.push_back(i);
    return result;
}

double eval_spline(const TensorKnotGrid& grid, std::span<const double> coeffs,
                   std::span<const double> x) {
    if (coeffs.size() != grid.basis_count())
        throw std::invalid_argument("coefficient vector has the wrong length");
    return eval_tensor_row(grid, x).dot(coeffs);
}

std::vector<double> eval_spline_gradient(const TensorKnotGrid& grid,
                                         std::span<const double> coeffs,
                                         std::span<const double> x) {
    if (coeffs.size() != grid.basis_count())
        throw std::invalid_argument("coefficient vector has the wrong length");
    const auto rows = eval_gradient_rows(grid, x);
    std::vector<double> g;
    g.reserve(rows.size());
    for (const auto& row : rows) g.push_back(row.dot(coeffs));
    return g;
}

}  // namespace tvspline
