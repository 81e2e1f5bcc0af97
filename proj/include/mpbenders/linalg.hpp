#pragma once

#include <limits>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mpb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Builds a sparse matrix from a dense one, dropping exact zeros.
inline SpMat to_sparse(const Mat& m) { return m.sparseView(0.0, 0.0); }

}  // namespace mpb
