#pragma once

// Residue sections rho(M): Laurent tails of lambda with psi M + dpsi/dt = lambda psi, their
// pairing with holomorphic differentials, and the constancy / linearity / equivalence criteria.
// Spectral curves of l = 2 Lax matrices over the rational line.

#include "laxflow/jacobian.hpp"

#include <string>
#include <vector>

namespace laxflow {

struct ResidueSection {
    std::vector<LaurentTail> tails;  // places of the spectral model
    int n = 0;
    double t = 0.0;

    /// Concatenated tail coefficients in support order.
    CVec flat() const;
};

struct TangentVector {
    CVec components;
    std::string basis = "z^(j-1) dz / nu, j = 1..genus";
};

/// Places of the spectral model over the poles of M.
std::vector<Place> tail_support(const HyperellipticModel& m, const MatrixFunc& M);

/// lambda_k = (psi M)_k / psi_k for the adjugate row psi = (L21, mu - L11), k = 0, 1.
FFElement lambda_function(const KricheverLax& L, const MatrixFunc& M, const HyperellipticModel& m, int k);

/// Tails of lambda at tail_support(M) to order max(n, observed pole order); the two components
/// are cross-checked (NonGenericPoint when they disagree beyond 1e-8 relative).
ResidueSection lambda_tails(const KricheverLax& L, const MatrixFunc& M, const HyperellipticModel& m, int n, double t = 0.0);

/// Tails of a function on the spectral model at the support and orders of `like`.
ResidueSection section_of(const FFElement& f, const ResidueSection& like);

/// Component j = sum over the support of res(lambda * z^(j-1) dz / nu), no 2 pi i.
TangentVector connecting_map(const ResidueSection& r, const HyperellipticModel& m);

/// Columns: tails of a basis of the functions with poles bounded by the tail orders.
CMat global_tail_span(const ResidueSection& like, const HyperellipticModel& m);

struct Verdict {
    bool ok = false;
    double residual = 0.0;
    std::vector<double> profile;  // per interior sample (linearity)
};

/// Relative distance of r from the global tail span.
Verdict constancy_test(const ResidueSection& r, const HyperellipticModel& m, double tol = 1e-9);

/// Central differences of rho projected off span{global tails, rho(M_t)}; needs >= 3 samples
/// on a common support, uniformly spaced in t.
Verdict linearity_test(const std::vector<ResidueSection>& samples, const HyperellipticModel& m, double tol = 1e-8);

/// rho(W^-1 M W) for W^-1 L W against rho(M); det W is normalized to 1.
Verdict gauge_equivalence(const KricheverLax& L, const MatrixFunc& M, const CMat& W, int n, double tol = 1e-9);

/// rho(M + Q) - rho(M) in the global tail span; Q must commute with L.
Verdict qshift_equivalence(const KricheverLax& L, const MatrixFunc& M, const MatrixFunc& Q, int n, double tol = 1e-8);

}  // namespace laxflow
