#include "laxflow/flow.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace laxflow;

namespace {

AnsatzSpec at_infinity(int n, int m) { return {{{Place::infinity(), n, m}}, std::nullopt}; }

KricheverLax mumford_g2() {
    // u monic cubic, deg v = 1, deg w = 2: spectral curve of genus 2.
    return mumford_lax(Poly{0.3, -1.1, 0.2, 1.0}, Poly{0.4, 0.7}, Poly{1.2, -0.5, 0.8});
}

double coeff_distance(const PolyMat& a, const PolyMat& b) {
    double d = 0.0;
    for (size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
        CMat x = k < a.size() ? a[k] : CMat::Zero(2, 2);
        CMat y = k < b.size() ? b[k] : CMat::Zero(2, 2);
        d = std::max(d, (x - y).norm());
    }
    return d;
}

}  // namespace

TEST(Flow, MumfordAnsatzIsNontrivial) {
    auto L = mumford_benchmark();
    auto M = build_m_polynomial(poly_of(L), at_infinity(1, -1));
    auto V = laurent_commutator(M, {0, poly_of(L)});
    // v' = -1, u' = w' = 0 at t = 0.
    EXPECT_NEAR(std::abs(V.at(0)(0, 0) + 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(V.at(0)(1, 1) - 1.0), 0.0, 1e-15);
    for (int k = V.lo; k <= V.hi(); ++k) {
        CMat X = V.at(k);
        if (k == 0) X.diagonal().setZero();
        EXPECT_LT(X.norm(), 1e-15);
    }
    // The z L ansatz gives the trivial flow.
    auto Mt = build_m_polynomial(poly_of(L), at_infinity(1, 1));
    auto Vt = laurent_commutator(Mt, {0, poly_of(L)});
    for (const auto& X : Vt.c) EXPECT_LT(X.norm(), 1e-15);
}

TEST(Flow, IsospectralRK4) {
    for (auto L : {mumford_benchmark(), mumford_g2()}) {
        auto tr = integrate_flow(L, at_infinity(1, -1), 1.0, 1e-3, Scheme::RK4, 100);
        for (double d : isospectral_drift(tr)) EXPECT_LT(d, 1e-8);
        EXPECT_GT(coeff_distance(poly_of(tr.samples.back().L), poly_of(L)), 0.1);
        EXPECT_LT(tr.cumulative_defect, 1e-12);
    }
}

TEST(Flow, PolynomialInLIsStationary) {
    auto L = mumford_g2();
    MProvider Mp = [](const PolyMat& P, double) {
        LaurentMat M{0, poly_mul(P, P)};
        for (size_t k = 0; k < P.size(); ++k) M.c[k] += 3.0 * P[k];
        return M;
    };
    auto tr = integrate_fixed_pole(L, Mp, 0.5, 1e-2);
    EXPECT_LT(coeff_distance(poly_of(tr.samples.back().L), poly_of(L)), 1e-12);
}

TEST(Flow, BrokenCommutatorDrifts) {
    auto L = mumford_g2();
    MProvider Mp = [](const PolyMat& P, double) { return build_m_polynomial(P, at_infinity(1, -1)); };
    auto tr = integrate_fixed_pole(L, Mp, 0.5, 1e-3, 1, {true});
    double worst = 0.0;
    for (double d : isospectral_drift(tr)) worst = std::max(worst, d);
    EXPECT_GT(worst, 1e-3);
}

TEST(Flow, GaugeEquivariance) {
    auto L = mumford_g2();
    CMat W(2, 2);
    W << cplx(1.0, 0.2), 0.5, cplx(-0.3, 0.1), 1.1;
    auto LW = polynomial_lax(L.curve(), [&] {
        PolyMat P = poly_of(L);
        for (auto& X : P) X = W.inverse() * X * W;
        return P;
    }());
    auto a = at_infinity(1, -1);
    auto t1 = integrate_flow(L, a, 0.3, 1e-3, Scheme::RK4);
    auto t2 = integrate_flow(LW, a, 0.3, 1e-3, Scheme::RK4);
    PolyMat P1 = poly_of(t1.samples.back().L), P2 = poly_of(t2.samples.back().L);
    for (auto& X : P1) X = W.inverse() * X * W;
    EXPECT_LT(coeff_distance(P1, P2), 1e-10);
}

TEST(Flow, KricheverTangency) {
    auto c = BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(7);
    auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
    for (int m : {0, 1, 2}) {
        auto M = build_m(L, at_infinity(1, m));
        auto rep = tangency_check(L, M);
        EXPECT_TRUE(rep.ok()) << "m = " << m;
        for (double ang : rep.angles) EXPECT_LT(ang, 1e-8);
        if (m > 0) {
            auto V = commutator(M, L.matrix);
            EXPECT_GT(V.value_at(c->places_over(0.4)[0]).norm(), 1e-3);
        }
    }
}

TEST(Flow, TangencyNegativeControls) {
    auto c = BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(7);
    auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
    auto M = build_m(L, at_infinity(1, 1));
    CMat E = CMat::Zero(2, 2);
    E(0, 1) = 1.0;
    // Extra pole at infinity beyond K.
    auto bad1 = M + MatrixFunc::constant(c, E) * FFElement::x(c);
    auto r1 = tangency_check(L, bad1);
    ASSERT_FALSE(r1.ok());
    EXPECT_EQ(r1.failures[0].clause, "pole_order_support");
    // Untyped simple poles at the Tyurin points.
    auto bad2 = M + MatrixFunc::constant(c, E) * L.matrix(0, 0);
    auto r2 = tangency_check(L, bad2);
    ASSERT_FALSE(r2.ok());
    bool dir = false;
    for (const auto& f : r2.failures) dir = dir || f.clause == "double_pole_direction";
    EXPECT_TRUE(dir);
}

TEST(Flow, MovingPoleSecondOrder) {
    auto c = BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(11);
    auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
    auto a = at_infinity(1, 1);
    std::vector<double> cum, drift;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
        auto tr = integrate_flow(L, a, 0.05, dt, Scheme::MovingPoleRK2);
        cum.push_back(tr.cumulative_defect);
        for (const auto& s : tr.steps) EXPECT_LT(s.post_defect, 1e-10);
        EXPECT_LT(tyurin_defect(tr.samples.back().L), 1e-10);
        auto d = isospectral_drift(tr);
        drift.push_back(*std::max_element(d.begin(), d.end()));
        EXPECT_GT(std::abs(tr.samples.back().L.tyurin.points[0].gamma.x - L.tyurin.points[0].gamma.x), 1e-3);
    }
    EXPECT_GE(std::log(cum[0] / cum[2]) / std::log(4.0), 1.8);
    EXPECT_GE(std::log(drift[0] / drift[2]) / std::log(4.0), 1.8);
}
