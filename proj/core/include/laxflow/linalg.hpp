#pragma once

// Small dense linear-algebra helpers on top of Eigen.

#include <Eigen/Dense>

namespace laxflow {

/// Orthonormal-ish basis (columns) of ker A, computed by SVD after column scaling.
/// Singular values below rank_tol * sigma_max count as zero. With `rref`, the basis
/// is brought to reduced echelon form (pivot entries 1), which makes it canonical.
Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& A, double rank_tol = 1e-8, bool rref = false);

/// Numerical rank under the same convention.
int numerical_rank(const Eigen::MatrixXcd& A, double rank_tol = 1e-8);

struct LstsqResult {
    Eigen::VectorXcd x;
    double residual = 0.0;      // ||A x - b||
    double rel_residual = 0.0;  // residual / max(||b||, tiny)
};

/// Minimum-norm least-squares solution via complete orthogonal decomposition.
LstsqResult lstsq(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b);

}  // namespace laxflow
