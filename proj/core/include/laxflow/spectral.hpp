#pragma once

// Spectral curve det(mu - L(p)) = 0, fiber lifts, left eigenvectors, eigenvector divisor.

#include "laxflow/laxmat.hpp"

#include <string>
#include <vector>

namespace laxflow {

struct SpectralCurve {
    CurvePtr base;
    int l = 0;
    std::vector<FFElement> h;   // h_1..h_l
    FFElement discriminant;     // mu-discriminant of R
    Divisor branch;             // ramification points of the projection, on the base
    int genus = 0;
    // Reference fiber for sheet labels.
    Place ref_place;
    std::vector<cplx> ref_mu;
};

struct SpectralPoint {
    Place base;
    cplx mu{};
    int sheet = -1;  // -1: unlabeled
};

enum class EigenNorm { AdjugateRow, LastCoordinateOne };

struct EigenVector {
    SpectralPoint point;
    CVec psi;  // row vector stored as a column
    EigenNorm norm = EigenNorm::AdjugateRow;
};

/// Throws NonReduced for a vanishing discriminant or a curve with no branching.
SpectralCurve spectral_curve(const KricheverLax& L);

/// Riemann-Hurwitz genus; throws NonSimpleRamification for multiple discriminant zeros
/// or odd total branching.
int spectral_genus(const SpectralCurve& S);

/// Characteristic polynomial coefficients in mu at a finite place (ascending powers).
Poly fiber_poly(const SpectralCurve& S, const Place& p);

/// The l points over p, sheets labeled by continuation from the reference fiber.
std::vector<SpectralPoint> lift_fiber(const SpectralCurve& S, const Place& p, double tol = 1e-7);

EigenVector left_eigenvector(const KricheverLax& L, const SpectralPoint& pt, EigenNorm norm = EigenNorm::AdjugateRow);

/// Residual |psi (L - mu)| / (|L| |psi|).
double eigen_residual(const KricheverLax& L, const EigenVector& v);

struct EigenDivisor {
    std::vector<SpectralPoint> points;  // with repetition for multiplicity
    int degree = 0;
    bool degenerate = false;            // a point sits over a branch point or at infinity
    std::string note;
};

/// l = 2: common zeros of the adjugate row (L21, mu - L11), i.e. the zeros of L21
/// lifted to the sheet mu = L11.
EigenDivisor eigen_divisor(const KricheverLax& L, const SpectralCurve& S);

}  // namespace laxflow
