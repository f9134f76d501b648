#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tvspline {

/// One sparse row: column indices (ascending) with their values.
struct SparseRow {
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;

    std::size_t size() const { return cols.size(); }

    double dot(std::span<const double> x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * x[cols[i]];
        return s;
    }
};

/// Row-sparse matrix in CSR layout. Rows of collocation and gradient
/// operators have a small bounded number of nonzeros, so row-wise storage
/// keeps both apply() and apply_transpose() cheap.
class SparseOperator {
public:
    SparseOperator() = default;
    SparseOperator(std::size_t rows, std::size_t cols) : n_rows_(rows), n_cols_(cols) {
        row_start_.assign(rows + 1, 0);
    }

    /// Incremental construction: rows must be appended in order.
    static SparseOperator from_rows(std::size_t cols, const std::vector<SparseRow>& rows);

    void append_row(const SparseRow& row);

    std::size_t rows() const { return n_rows_; }
    std::size_t cols() const { return n_cols_; }
    std::size_t nonzeros() const { return col_.size(); }

    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
    }
    std::span<const double> row_vals(std::size_t r) const {
        return {val_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
    }

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    /// x = A^T y
    void apply_transpose(std::span<const double> y, std::span<double> x) const;

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> apply_transpose(std::span<const double> y) const;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> row_start_{0};
    std::vector<std::uint32_t> col_;
    std::vector<double> val_;
};

}  // namespace tvspline
