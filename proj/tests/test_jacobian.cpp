#include "laxflow/residue.hpp"

#include <gtest/gtest.h>

using namespace laxflow;

namespace {

double agm(double a, double b) {
    for (int i = 0; i < 40; ++i) {
        double t = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = t;
    }
    return a;
}

KricheverLax mumford_g2() { return mumford_lax(Poly{0.3, -1.1, 0.2, 1.0}, Poly{0.4, 0.7}, Poly{1.2, -0.5, 0.8}); }

AnsatzSpec at_infinity(int n, int m) { return {{{Place::infinity(), n, m}}, std::nullopt}; }

// Lattice coordinates of v, reduced to the nearest integer vector.
double lattice_distance(const CVec& v, const PeriodData& P) {
    const auto g = v.size();
    Eigen::VectorXd r(2 * g);
    r << v.real(), v.imag();
    Eigen::VectorXd c = P.lattice_real().fullPivLu().solve(r);
    return (c - c.array().round().matrix()).cwiseAbs().maxCoeff();
}

// Zeros of nu - q(z): a divisor linearly equivalent to the pole divisor at infinity.
std::vector<Place> zeros_of_line(const HyperellipticModel& m, const Poly& q) {
    std::vector<Place> D;
    for (cplx z : (m.Q - q * q).roots()) D.push_back(Place::regular(z, q(z)));
    return D;
}

}  // namespace

TEST(Jacobian, SquareLatticeTau) {
    auto m = hyperelliptic_model(Poly{0.0, -1.0, 0.0, 1.0});
    auto P = periods(m);
    EXPECT_NEAR(std::abs(P.tau(0, 0) - cplx(0.0, 1.0)), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(P.A(0, 0)), 2.0 * M_PI / agm(1.0, std::sqrt(2.0)), 1e-10);
}

TEST(Jacobian, RiemannRelations) {
    for (const Poly& Q : {Poly{-1.0, 0.0, 0.0, 0.0, 0.0, 1.0}, hyperelliptic_model(spectral_curve(mumford_g2())).Q,
                          Poly{0.5, cplx(0.2, 1.0), -1.0, 0.3, cplx(0.0, 0.4), 0.0, 1.0}}) {
        auto m = hyperelliptic_model(Q);
        auto P = periods(m);
        EXPECT_LT(P.symmetry_defect, 1e-8);
        EXPECT_GT(P.min_imag_eig, 1e-10);
        // Step-doubling oracle.
        auto P2 = periods(m, 1e-14);
        EXPECT_LT((P.tau - P2.tau).norm(), 1e-8);
    }
}

TEST(Jacobian, ModelOfMumfordBenchmark) {
    auto m = hyperelliptic_model(spectral_curve(mumford_benchmark()));
    EXPECT_TRUE(m.Q.approx_equal(Poly{0.0, -1.0, 0.0, 1.0}, 1e-14));
    EXPECT_EQ(m.genus, 1);
    try {
        hyperelliptic_model(Poly{1.0, -1.0, -1.0, 1.0});  // (z - 1)^2 (z + 1)
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonReduced);
    }
}

TEST(Jacobian, AbelTheorem) {
    for (const Poly& Q : {Poly{0.0, -1.0, 0.0, 1.0}, hyperelliptic_model(spectral_curve(mumford_g2())).Q}) {
        auto m = hyperelliptic_model(Q);
        auto P = periods(m);
        auto D1 = zeros_of_line(m, Poly{0.3, cplx(0.1, 0.2)});
        auto D2 = zeros_of_line(m, Poly{-0.7, 0.4, m.genus == 2 ? cplx(0.5, -0.1) : cplx{}});
        CVec d = abel_map(m, D1, P).raw - abel_map(m, D2, P).raw;
        EXPECT_LT(lattice_distance(d, P), 1e-6);
        // A point and its conjugate sum to a lattice vector.
        Place p = Place::regular(cplx(0.4, 0.3), std::sqrt(Q(cplx(0.4, 0.3))));
        Place q = Place::regular(p.x, -p.y);
        EXPECT_LT(lattice_distance(abel_point(m, p, P) + abel_point(m, q, P), P), 1e-9);
    }
}

TEST(Jacobian, AnsatzFlowIsStraightAndMatchesPairing) {
    for (auto L : {mumford_benchmark(), mumford_g2()}) {
        auto a = at_infinity(1, -1);
        auto tr = integrate_flow(L, a, 1.0, 1e-3, Scheme::RK4, 50);
        auto m = hyperelliptic_model(spectral_curve(L));
        auto P = periods(m);
        auto rep = jacobian_linearity(tr, m, P, &a);
        EXPECT_LT(rep.maxSecondDifference, 1e-5);
        EXPECT_LT(rep.agreement, 1e-5);
        EXPECT_GT(rep.velocity[0].norm(), 0.1);
    }
}

TEST(Jacobian, ConstantFlowDoesNotMove) {
    auto L = mumford_g2();
    MProvider Mp = [](const PolyMat& X, double) { return LaurentMat{0, poly_mul(X, X)}; };
    auto tr = integrate_fixed_pole(L, Mp, 1.0, 1e-3, 50);
    auto m = hyperelliptic_model(spectral_curve(L));
    auto rep = jacobian_linearity(tr, m, periods(m));
    for (const auto& v : rep.velocity) EXPECT_LT(v.norm(), 1e-9);
}

TEST(Jacobian, CurvatureInjectionDetected) {
    auto L = mumford_g2();
    MProvider Mp = [](const PolyMat& X, double t) {
        auto A = build_m_polynomial(X, at_infinity(1, -1)), B = build_m_polynomial(X, at_infinity(1, -2));
        for (int k = B.lo; k <= B.hi(); ++k) A.c[static_cast<size_t>(k - A.lo)] += t * B.at(k);
        return A;
    };
    auto tr = integrate_fixed_pole(L, Mp, 1.0, 1e-3, 50);
    auto m = hyperelliptic_model(spectral_curve(L));
    auto rep = jacobian_linearity(tr, m, periods(m));
    EXPECT_GT(rep.maxSecondDifference, 1e-3);
}

TEST(Jacobian, StepTooLarge) {
    auto m = hyperelliptic_model(Poly{0.0, -1.0, 0.0, 1.0});
    auto P = periods(m);
    CVec a = CVec::Zero(1), b = 0.5 * P.A.col(0) + 0.4 * P.B.col(0);
    try {
        unwrap({a, b}, P);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::StepTooLarge);
    }
}
