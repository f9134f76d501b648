#include "tvspline/sparse.hpp"

#include <cassert>
#include <stdexcept>

namespace tvspline {

SparseOperator SparseOperator::from_rows(std::size_t cols, const std::vector<SparseRow>& rows) {
    SparseOperator op(rows.size(), cols);
    op.n_rows_ = 0;
    op.row_start_.assign(1, 0);
    for (const auto& r : rows) op.append_row(r);
    return op;
}

void SparseOperator::append_row(const SparseRow& row) {
    assert(row.cols.size() == row.vals.size());
    for (std::uint32_t c : row.cols) {
        if (c >= n_cols_) throw std::out_of_range("SparseOperator: column index out of range");
    }
    col_.insert(col_.end(), row.cols.begin(), row.cols.end());
    val_.insert(val_.end(), row.vals.begin(), row.vals.end());
    if (row_start_.size() == n_rows_ + 1) {
        row_start_.push_back(col_.size());
    } else {
        row_start_[n_rows_ + 1] = col_.size();
    }
    ++n_rows_;
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
    assert(x.size() == n_cols_ && y.size() == n_rows_);
    for (std::size_t r = 0; r < n_rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) s += val_[k] * x[col_[k]];
        y[r] = s;
    }
}

void SparseOperator::apply_transpose(std::span<const double> y, std::span<double> x) const {
    assert(y.size() == n_rows_ && x.size() == n_cols_);
    for (double& v : x) v = 0.0;
    for (std::size_t r = 0; r < n_rows_; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) x[col_[k]] += val_[k] * yr;
    }
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const {
    std::vector<double> y(n_rows_);
    apply(x, y);
    return y;
}

std::vector<double> SparseOperator::apply_transpose(std::span<const double> y) const {
    std::vector<double> x(n_cols_);
    apply_transpose(y, x);
    return x;
}

}  // namespace tvspline
