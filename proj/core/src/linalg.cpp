#include "laxflow/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace laxflow {

namespace {

Eigen::VectorXd column_scales(const Eigen::MatrixXcd& A) {
    Eigen::VectorXd s(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        double n = A.col(j).norm();
        s(j) = n > 0.0 ? 1.0 / n : 1.0;
    }
    return s;
}

}  // namespace

int numerical_rank(const Eigen::MatrixXcd& A, double rank_tol) {
    if (A.size() == 0) return 0;
    Eigen::MatrixXcd As = A * column_scales(A).asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(As);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * sv(0)) ++r;
    return r;
}

Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& A, double rank_tol, bool rref) {
    const Eigen::Index n = A.cols();
    if (A.rows() == 0) return Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXd s = column_scales(A);
    Eigen::MatrixXcd As = A * s.asDiagonal();
    // Pad to at least n rows so the full V is available.
    if (As.rows() < n) {
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
        P.topRows(As.rows()) = As;
        As = P;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(As, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * smax && smax > 0.0) ++r;
    Eigen::MatrixXcd N = s.asDiagonal() * svd.matrixV().rightCols(n - r);
    if (!rref || N.cols() == 0) return N;

    // Gauss-Jordan on N^T with partial pivoting.
    Eigen::MatrixXcd M = N.transpose();
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < M.cols() && row < M.rows(); ++col) {
        Eigen::Index piv = row;
        for (Eigen::Index i = row; i < M.rows(); ++i)
            if (std::abs(M(i, col)) > std::abs(M(piv, col))) piv = i;
        if (std::abs(M(piv, col)) < 1e-10 * M.cwiseAbs().maxCoeff()) continue;
        M.row(row).swap(M.row(piv));
        M.row(row) /= M(row, col);
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            if (i != row) M.row(i) -= M(i, col) * M.row(row);
        ++row;
    }
    return M.transpose();
}

LstsqResult lstsq(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b) {
    LstsqResult r;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
    r.x = cod.solve(b);
    r.residual = (A * r.x - b).norm();
    r.rel_residual = r.residual / std::max(b.norm(), 1e-300);
    return r;
}

}  // namespace laxflow
