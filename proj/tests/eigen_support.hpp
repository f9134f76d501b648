// Eigen bridging used only by tests: reference solves go through Eigen's own
// factorizations rather than any code path under test.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tvspline/sparse.hpp"

namespace oracle {

inline Eigen::SparseMatrix<double> to_eigen(const tvspline::SparseOperator& op) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(op.nonzeros());
    for (std::size_t r = 0; r < op.rows(); ++r) {
        const auto cols = op.row_cols(r);
        const auto vals = op.row_vals(r);
        for (std::size_t i = 0; i < cols.size(); ++i)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(cols[i]), vals[i]);
    }
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(op.rows()),
                                  static_cast<Eigen::Index>(op.cols()));
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

inline Eigen::MatrixXd to_dense(const tvspline::SparseOperator& op) {
    return Eigen::MatrixXd(to_eigen(op));
}

}  // namespace oracle
