#pragma once

// Period matrices and Abel-Jacobi maps of hyperelliptic spectral curves nu^2 = Q(z)
// (l = 2 over the rational line).

#include "laxflow/flow.hpp"
#include "laxflow/spectral.hpp"

#include <vector>

namespace laxflow {

struct HyperellipticModel {
    Poly Q;                  // nu^2 = Q(z), nu = mu + h1/2
    Poly h1;
    CurvePtr curve;          // the spectral curve as a hyperelliptic function field in (z, nu)
    std::vector<cplx> branch;  // finite roots of Q, sorted by real then imaginary part
    int genus = 0;
};

/// Completes the square of mu^2 + h1 mu + h2; throws NonReduced for repeated roots of Q.
HyperellipticModel hyperelliptic_model(const SpectralCurve& S);
HyperellipticModel hyperelliptic_model(const Poly& Q, const Poly& h1 = Poly{});

/// Place of the model over (z, mu).
Place model_place(const HyperellipticModel& m, const SpectralPoint& p);

struct PeriodData {
    CMat halfPeriods;        // genus x (#branch points - 1): integrals of omega_j = z^{j-1} dz / nu along the branch chain
    CMat A, B;               // genus x genus A- and B-period blocks
    CMat tau;                // A^-1 B
    std::vector<int> signs;  // segment orientation signs selected by the Riemann conditions
    double symmetry_defect = 0.0;
    double min_imag_eig = 0.0;
    /// 2g x 2g real matrix whose columns are the lattice generators (A then B columns).
    Eigen::MatrixXd lattice_real() const;
};

/// Gauss-Legendre with square-root endpoint substitution, adaptively subdivided.
PeriodData periods(const HyperellipticModel& m, double tol = 1e-12);

/// Raw Abel-Jacobi image int_{e_1}^{P} omega (modulo the lattice), integrated from the branch
/// point nearest P.
CVec abel_point(const HyperellipticModel& m, const Place& P, const PeriodData& per, double tol = 1e-12);

struct AbelImage {
    CVec raw;
    CVec reduced;              // representative with lattice coordinates in [0, 1)
    Eigen::VectorXd lattice;   // real lattice coordinates of raw
};

AbelImage abel_map(const HyperellipticModel& m, const std::vector<Place>& D, const PeriodData& P);

/// Nearest-image continuation of a sequence of raw images; throws StepTooLarge when a step
/// moves more than a quarter cell in lattice coordinates.
std::vector<CVec> unwrap(const std::vector<CVec>& raw, const PeriodData& P);

struct JacobianLinearityReport {
    std::vector<double> t;
    std::vector<CVec> images;               // unwrapped
    double maxSecondDifference = 0.0;       // max |A(t+h) - 2A(t) + A(t-h)| / h^2, scaled by max(1, |velocity|)
    std::vector<CVec> velocity;             // central differences at interior samples
    std::vector<CVec> residuePairingVelocity;
    double agreement = 0.0;                 // max relative difference of the two velocities
};

/// Abel images of the eigenvector divisor along a trajectory; the residue-pairing velocity is
/// computed from the flow's M (build_m_polynomial of each sample with ansatz a), when given.
JacobianLinearityReport jacobian_linearity(const Trajectory& tr, const HyperellipticModel& m, const PeriodData& P,
                                           const AnsatzSpec* a = nullptr);

}  // namespace laxflow
