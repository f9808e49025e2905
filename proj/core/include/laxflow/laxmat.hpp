#pragma once

// Matrices of function-field elements, Tyurin data and Krichever-Lax matrices.

#include "laxflow/curve.hpp"

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace laxflow {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// l x l matrix of function-field elements over one curve.
class MatrixFunc {
public:
    MatrixFunc() = default;
    static MatrixFunc zero(CurvePtr c, int l);
    static MatrixFunc identity(CurvePtr c, int l);
    static MatrixFunc constant(CurvePtr c, const CMat& A);
    /// sum_k A_k x^k (polynomial matrix in the base coordinate).
    static MatrixFunc polynomial(CurvePtr c, const std::vector<CMat>& coeffs);

    int size() const { return l_; }
    const CurvePtr& curve() const { return curve_; }
    const FFElement& operator()(int i, int j) const { return e_[static_cast<size_t>(i * l_ + j)]; }
    FFElement& operator()(int i, int j) { return e_[static_cast<size_t>(i * l_ + j)]; }

    MatrixFunc operator+(const MatrixFunc& o) const;
    MatrixFunc operator-(const MatrixFunc& o) const;
    MatrixFunc operator*(const MatrixFunc& o) const;
    MatrixFunc operator*(const FFElement& s) const;
    MatrixFunc operator*(cplx s) const;
    MatrixFunc pow(int n) const;
    FFElement trace() const;
    /// Left/right multiplication by constant matrices.
    MatrixFunc conjugated(const CMat& W) const;  // W^{-1} * this * W

    /// Value at a finite place.
    CMat value_at(const Place& p) const;
    /// Coefficient matrices of w^k, lo <= k <= hi, in the chart of p.
    std::vector<CMat> laurent(const Place& p, int lo, int hi) const;

    /// Polynomial coefficient matrices (every entry must be a polynomial in x).
    std::vector<CMat> poly_coeffs() const;

private:
    CurvePtr curve_;
    int l_ = 0;
    std::vector<FFElement> e_;
};

MatrixFunc commutator(const MatrixFunc& a, const MatrixFunc& b);

struct TyurinPoint {
    Place gamma;
    CVec alpha;  // last coordinate 1
};

struct TyurinData {
    std::vector<TyurinPoint> points;
};

struct KricheverTyurinParams {
    std::vector<Place> gamma;
    std::vector<CVec> alpha;
    std::vector<CVec> beta;
    std::vector<cplx> kappa;
};

struct KricheverLax {
    MatrixFunc matrix;
    TyurinData tyurin;
    Divisor K;  // allowed poles away from the Tyurin points
    std::vector<CVec> beta;
    std::vector<cplx> kappa;
    std::vector<CMat> L_m1;  // residue matrices at gamma_j
    std::vector<CMat> L_0;   // constant terms at gamma_j

    int size() const { return matrix.size(); }
    const CurvePtr& curve() const { return matrix.curve(); }
    KricheverTyurinParams params() const;
};

struct Violation {
    std::string clause;  // "simple_pole", "stray_pole", "pole_order_K", "rank", "trace", "residue_direction", "eigen", "tyurin_data"
    int point = -1;      // Tyurin index, or -1
    std::optional<Place> place;
    int entry_i = -1, entry_j = -1;
    double defect = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::optional<KricheverLax> lax;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_lax(const MatrixFunc& m, const TyurinData& t, const Divisor& K, double tol = 1e-8);

/// Throws NonGenericParameters when the linear system is rank deficient or inconsistent.
KricheverLax construct_lax(const CurvePtr& c, const Divisor& K, const KricheverTyurinParams& p, double rank_tol = 1e-8);

/// Random consistent parameters: gamma, alpha random; (L, beta, kappa) drawn from the
/// solution space of the linear constraints. `fiber_dim` reports that space's dimension.
KricheverTyurinParams sample_params(const CurvePtr& c, const Divisor& K, int l, std::mt19937_64& rng, int* fiber_dim = nullptr);

struct HitchinInvariants {
    std::vector<FFElement> h;                       // h_1..h_l
    std::vector<std::vector<LaurentTail>> tails;    // tails[d][j]: tail of h_{d+1} at gamma_j
    double max_tail = 0.0;
};

HitchinInvariants hitchin_invariants(const KricheverLax& L);
/// Characteristic-polynomial coefficients det(mu - L) = mu^l + h_1 mu^{l-1} + ... + h_l.
std::vector<FFElement> char_poly(const MatrixFunc& L);

/// W^{-1} L W with W normalized to det 1 and the Tyurin data transported.
KricheverLax gauge_transform(const KricheverLax& L, const CMat& W);

struct ExpectedDims {
    int dimLK = 0;
    int spectralGenus = 0;
    int eigenDivisorDegree = 0;
    int dimCotangent = 0;
};

ExpectedDims expected_dims(int l, int g);

/// Lax matrix with no Tyurin points whose entries are polynomials in x (rational-line regime).
KricheverLax polynomial_lax(const CurvePtr& c, const std::vector<CMat>& coeffs);

/// The genus-1 benchmark [[v, w], [u, -v]] with u = z^2 - 1, v = 0, w = z.
KricheverLax mumford_benchmark();

/// Mumford form with u monic, deg w = deg u - 1, over the rational line.
KricheverLax mumford_lax(const Poly& u, const Poly& v, const Poly& w);

}  // namespace laxflow
