#include "laxflow/hamiltonian.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace laxflow;

namespace {

AnsatzSpec at_infinity(int n, int m) { return {{{Place::infinity(), n, m}}, std::nullopt}; }
HamiltonianSpec h_inf(int n, int m) { return {Place::infinity(), n, m}; }

KricheverLax mumford_g2() { return mumford_lax(Poly{0.3, -1.1, 0.2, 1.0}, Poly{0.4, 0.7}, Poly{1.2, -0.5, 0.8}); }

// For traceless 2x2 L, L^2 = (v^2 + u w) I, so H_(inf,2,m) is the coefficient of z^(-m-1) in v^2 + u w.
cplx oracle_h2(const KricheverLax& L, int m) {
    PolyMat P = poly_of(L);
    Poly u, v, w;
    for (size_t k = 0; k < P.size(); ++k) {
        v = v + Poly::monomial(static_cast<int>(k), P[k](0, 0));
        w = w + Poly::monomial(static_cast<int>(k), P[k](0, 1));
        u = u + Poly::monomial(static_cast<int>(k), P[k](1, 0));
    }
    Poly q = v * v + u * w;
    int k = -m - 1;
    return k >= 0 ? q.coeff(k) : cplx(0.0);
}

}  // namespace

TEST(Hamiltonian, TracelessFirstPowerVanishes) {
    EXPECT_LT(std::abs(hamiltonian_value(mumford_benchmark(), h_inf(1, 0))), 1e-14);
    EXPECT_LT(std::abs(hamiltonian_value(mumford_g2(), h_inf(1, -3))), 1e-14);
}

TEST(Hamiltonian, SecondPowerMatchesDeterminantCoefficients) {
    for (auto L : {mumford_benchmark(), mumford_g2()})
        for (int m = -7; m <= 1; ++m) EXPECT_LT(std::abs(hamiltonian_value(L, h_inf(2, m)) - oracle_h2(L, m)), 1e-12) << m;
    EXPECT_LT(std::abs(hamiltonian_value(mumford_benchmark(), h_inf(2, -4)) - 1.0), 1e-14);
    EXPECT_LT(std::abs(hamiltonian_value(mumford_benchmark(), h_inf(2, -2)) + 1.0), 1e-14);
}

TEST(Hamiltonian, GaugeInvariance) {
    auto L = mumford_g2();
    CMat W(2, 2);
    W << cplx(1.0, 0.2), 0.5, cplx(-0.3, 0.1), 1.1;
    PolyMat P = poly_of(L);
    for (auto& X : P) X = W.inverse() * X * W;
    auto LW = polynomial_lax(L.curve(), P);
    for (int n : {2, 3, 4})
        for (int m : {-9, -6, -4}) {
            cplx a = hamiltonian_value(L, h_inf(n, m)), b = hamiltonian_value(LW, h_inf(n, m));
            EXPECT_LT(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a)));
        }
}

TEST(Hamiltonian, ConservedAlongAnsatzFlow) {
    auto tr = integrate_flow(mumford_g2(), at_infinity(1, -1), 1.0, 1e-3, Scheme::RK4, 50);
    auto rep = conservation_check(tr, {h_inf(2, -4), h_inf(2, -5), h_inf(3, -7), h_inf(4, -10)});
    for (double d : rep.drift) EXPECT_LT(d, 1e-8);
    EXPECT_GT(std::abs(rep.values[0][0]), 0.1);
}

TEST(Hamiltonian, BrokenIntegratorDrifts) {
    MProvider Mp = [](const PolyMat& P, double) { return build_m_polynomial(P, at_infinity(1, -1)); };
    auto tr = integrate_fixed_pole(mumford_g2(), Mp, 0.5, 1e-3, 10, {true});
    auto rep = conservation_check(tr, {h_inf(2, -4), h_inf(2, -5), h_inf(2, -3)});
    EXPECT_GT(*std::max_element(rep.drift.begin(), rep.drift.end()), 1e-3);
}

TEST(Hamiltonian, AnsatzFlowsCommute) {
    auto L = mumford_g2();
    auto a1 = at_infinity(1, -1), a2 = at_infinity(1, -2);
    EXPECT_LT(commuting_flows_check(L, a1, a2, 0.5, 1e-3), 1e-6);
    double d1 = commuting_flows_check(L, a1, a2, 0.5, 0.1), d2 = commuting_flows_check(L, a1, a2, 0.5, 0.05);
    EXPECT_GT(d1, 1e-12);
    EXPECT_GE(std::log2(d1 / d2), 3.5);
}

TEST(Hamiltonian, NonCommutingPairDetected) {
    auto L = mumford_g2();
    CMat C1 = CMat::Zero(2, 2), C2 = CMat::Zero(2, 2);
    C1(0, 1) = 1.0;
    C2(1, 0) = 1.0;
    MProvider M1 = [C1](const PolyMat&, double) { return LaurentMat{0, {C1}}; };
    MProvider M2 = [C2](const PolyMat&, double) { return LaurentMat{0, {C2}}; };
    double d1 = commuting_flows_check(L, M1, M2, 0.5, 1e-2), d2 = commuting_flows_check(L, M1, M2, 0.5, 5e-3);
    EXPECT_GT(d2, 1e-2);
    EXPECT_LT(std::abs(d1 - d2), 0.01 * d2);
}
