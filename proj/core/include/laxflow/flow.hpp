#pragma once

// Lax flows dL/dt = [M, L]: ansatz construction of M, tangency, and integration.

#include "laxflow/laxmat.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace laxflow {

struct AnsatzEntry {
    Place p;
    int n = 1;
    int m = 0;
};

struct AnsatzSpec {
    std::vector<AnsatzEntry> entries;
    std::optional<Place> p0;  // normalization point (Krichever regime)
};

/// Matrix Laurent polynomial sum_k c[k] z^(lo+k) in the base coordinate.
struct LaurentMat {
    int lo = 0;
    std::vector<CMat> c;

    int hi() const { return lo + static_cast<int>(c.size()) - 1; }
    CMat at(int k) const;
};

using PolyMat = std::vector<CMat>;  // ascending powers of z

PolyMat poly_mul(const PolyMat& a, const PolyMat& b);
LaurentMat laurent_mul(const LaurentMat& a, const LaurentMat& b);
LaurentMat laurent_commutator(const LaurentMat& a, const LaurentMat& b);

/// Rational-line ansatz: for p = infinity the polynomial part of z^m L^n, for p = 0 the
/// principal part at 0 of z^-m L^n; summed over entries.
LaurentMat build_m_polynomial(const PolyMat& L, const AnsatzSpec& a);

/// M as a matrix of function-field elements. Rational line: build_m_polynomial.
/// Krichever regime: solved in L(gamma + sum ord_i p_i)^{l x l} (ord_i = m_i + n_i * mult_K(p_i))
/// with principal parts of w^-m L^n at p_i, residues v_j alpha_j^T at gamma_j,
/// alpha_j a left eigenvector of M_{j,0}, and tr M(p0) = 0.
MatrixFunc build_m(const KricheverLax& L, const AnsatzSpec& a);

/// Default p0 for the Krichever regime: a fixed regular place away from gamma and K.
Place default_p0(const KricheverLax& L);

struct TangencyReport {
    struct Entry {
        std::string clause;  // "pole_order_gamma", "pole_order_support", "stray_pole", "double_pole_direction"
        Place place;
        int point = -1;
        double defect = 0.0;
    };
    std::vector<Entry> failures;
    std::vector<double> angles;  // per gamma_j: relative distance of C_j from span(L_{j,-1})
    bool ok() const { return failures.empty(); }
};

/// Pole structure of [M, L] from Laurent products at every candidate place.
TangencyReport tangency_check(const KricheverLax& L, const MatrixFunc& M, double tol = 1e-8);

enum class Scheme { RK4, MovingPoleRK2 };
enum class FlowRegime { FixedPole, MovingPole };

struct FlowState {
    double t = 0.0;
    KricheverLax L;
    FlowRegime regime = FlowRegime::FixedPole;
};

struct StepDiag {
    double t = 0.0;
    double dt = 0.0;
    double constraint_defect = 0.0;  // before reprojection (moving pole); degree leakage (fixed pole)
    double post_defect = 0.0;        // after reprojection
    double fit_residual = 0.0;
};

struct Trajectory {
    std::vector<FlowState> samples;
    std::vector<StepDiag> steps;
    double cumulative_defect = 0.0;
    int rejections = 0;
};

/// M as a function of the current polynomial L and time.
using MProvider = std::function<LaurentMat(const PolyMat& L, double t)>;

struct FixedPoleOptions {
    bool break_antisymmetry = false;  // V = M L instead of [M, L]; regression guard only
};

Trajectory integrate_fixed_pole(const KricheverLax& L0, const MProvider& M, double tEnd, double dt, int stride = 1,
                                FixedPoleOptions opt = {});

struct MovingPoleOptions {
    double defect_budget = 1e-6;
    int reprojection_sweeps = 2;
    bool reproject = true;
};

Trajectory integrate_moving_pole(const KricheverLax& L0, const AnsatzSpec& a, double tEnd, double dt, int stride = 1,
                                 MovingPoleOptions opt = {});

/// Dispatch on scheme; RK4 requires polynomial entries on the rational line.
Trajectory integrate_flow(const KricheverLax& L0, const AnsatzSpec& a, double tEnd, double dt, Scheme scheme, int stride = 1);

/// Tyurin constraint defect of a moving-pole state: rank, trace and eigen conditions.
double tyurin_defect(const KricheverLax& L);

/// Per h_d: max over samples of the normalized distance to the t = 0 value.
std::vector<double> isospectral_drift(const Trajectory& tr);
/// [sample][d]: normalized distance of h_d to its t = 0 value.
std::vector<std::vector<double>> isospectral_drift_profile(const Trajectory& tr);

/// M(z) = sum_k c[k] z^(lo+k) as a matrix of function-field elements on c.
MatrixFunc laurent_to_matrix(const CurvePtr& c, const LaurentMat& M);

/// Polynomial coefficients of a rational-line Lax matrix / its flat coefficient vector.
PolyMat poly_of(const KricheverLax& L);
Eigen::VectorXcd flatten(const PolyMat& P);

}  // namespace laxflow
