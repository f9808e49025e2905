#include "laxflow/laxmat.hpp"

#include <gtest/gtest.h>

using namespace laxflow;

namespace {

CurvePtr genus2() { return BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0}); }

CMat random_W(std::mt19937_64& rng, int l) {
    std::normal_distribution<double> G(0.0, 1.0);
    CMat W(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) W(i, j) = cplx(G(rng), G(rng)) * 0.3 + (i == j ? 1.0 : 0.0);
    return W;
}

}  // namespace

TEST(LaxMat, ExpectedDims) {
    auto d = expected_dims(2, 2);
    EXPECT_EQ(d.dimLK, 12);
    EXPECT_EQ(d.spectralGenus, 5);
    EXPECT_EQ(d.eigenDivisorDegree, 6);
    EXPECT_EQ(d.dimCotangent, 10);
    auto d3 = expected_dims(3, 2);
    EXPECT_EQ(d3.dimLK, 27);
    EXPECT_EQ(d3.spectralGenus, 10);
    EXPECT_EQ(d3.eigenDivisorDegree, 12);
    EXPECT_EQ(expected_dims(1, 4).spectralGenus, 4);
    EXPECT_EQ(expected_dims(1, 4).eigenDivisorDegree, 4);
}

TEST(LaxMat, MumfordHitchin) {
    auto L = mumford_benchmark();
    auto h = hitchin_invariants(L).h;
    EXPECT_TRUE(h[0].is_zero());
    auto line = BaseCurve::rational_line();
    EXPECT_TRUE(h[1].approx_equal(FFElement::poly(line, Poly{0.0, 1.0, 0.0, -1.0}), 1e-14));
}

TEST(LaxMat, ConstantDiagonalHitchin) {
    CMat A = CMat::Zero(2, 2);
    A(0, 0) = 3.0;
    A(1, 1) = -3.0;
    auto L = polynomial_lax(BaseCurve::rational_line(), {A});
    auto h = char_poly(L.matrix);
    EXPECT_TRUE(h[0].is_zero());
    EXPECT_NEAR(std::abs(h[1].a().coeff(0) + 9.0), 0.0, 1e-14);
}

TEST(LaxMat, ValidateHolomorphic) {
    auto L = mumford_benchmark();
    auto rep = validate_lax(L.matrix, {}, L.K);
    EXPECT_TRUE(rep.ok());
    Divisor small;
    small.add(Place::infinity(), 1);
    auto bad = validate_lax(L.matrix, {}, small);
    ASSERT_FALSE(bad.ok());
    EXPECT_EQ(bad.violations.front().clause, "pole_order_K");
}

TEST(LaxMat, ConstructRoundTripGenus2) {
    auto c = genus2();
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        int fdim = 0;
        auto p = sample_params(c, K, 2, rng, &fdim);
        auto L = construct_lax(c, K, p);
        auto rep = validate_lax(L.matrix, L.tyurin, K);
        ASSERT_TRUE(rep.ok());
        for (size_t j = 0; j < p.beta.size(); ++j) {
            EXPECT_LT((rep.lax->beta[j] - p.beta[j]).norm(), 1e-8);
            EXPECT_LT(std::abs(rep.lax->kappa[j] - p.kappa[j]), 1e-8);
        }
        EXPECT_LT(hitchin_invariants(L).max_tail, 1e-9);
        if (trial == 0) std::printf("fiber dimension over fixed (gamma, alpha): %d\n", fdim);
    }
}

TEST(LaxMat, RandomParametersAreInfeasible) {
    auto c = genus2();
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(11);
    auto p = sample_params(c, K, 2, rng);
    p.beta[0] = p.beta[0] * 2.0;  // breaks the residue-theorem moment constraint
    try {
        construct_lax(c, K, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonGenericParameters);
    }
}

TEST(LaxMat, DoublePoleReported) {
    auto c = genus2();
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(3);
    auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
    MatrixFunc m = L.matrix;
    const Place& g0 = L.tyurin.points[0].gamma;
    Poly q{-g0.x, 1.0};
    m(0, 1) = m(0, 1) + FFElement::make(c, Poly::constant(0.5), {}, q * q);
    auto rep = validate_lax(m, L.tyurin, K);
    ASSERT_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.clause == "simple_pole" && v.point == 0) {
            found = true;
            EXPECT_NEAR(v.defect, 0.5, 1e-8);
        }
    EXPECT_TRUE(found);
}

TEST(LaxMat, GaugeInvariance) {
    auto c = genus2();
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(5);
    auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
    auto h0 = char_poly(L.matrix);
    for (int t = 0; t < 3; ++t) {
        auto G = gauge_transform(L, random_W(rng, 2));
        auto rep = validate_lax(G.matrix, G.tyurin, K);
        ASSERT_TRUE(rep.ok());
        for (size_t j = 0; j < L.kappa.size(); ++j) EXPECT_LT(std::abs(rep.lax->kappa[j] - L.kappa[j]), 1e-9);
        auto h = char_poly(G.matrix);
        for (size_t d = 0; d < h.size(); ++d) EXPECT_TRUE(h[d].approx_equal(h0[d], 1e-10));
    }
    auto M = mumford_benchmark();
    auto G = gauge_transform(M, random_W(rng, 2));
    EXPECT_TRUE(validate_lax(G.matrix, G.tyurin, G.K).ok());
}
