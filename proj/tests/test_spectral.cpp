#include "laxflow/spectral.hpp"

#include <gtest/gtest.h>

using namespace laxflow;

TEST(Spectral, MumfordCurve) {
    auto L = mumford_benchmark();
    auto S = spectral_curve(L);
    EXPECT_EQ(S.genus, 1);
    EXPECT_EQ(S.branch.degree(), 4);
    EXPECT_EQ(S.branch.multiplicity(Place::infinity()), 1);
    for (double x0 : {0.0, 1.0, -1.0}) EXPECT_EQ(S.branch.multiplicity(Place::regular(x0)), 1);
    auto fib = lift_fiber(S, Place::regular(4.0));
    ASSERT_EQ(fib.size(), 2u);
    for (const auto& pt : fib) EXPECT_NEAR(std::abs(pt.mu * pt.mu - 60.0), 0.0, 1e-12);
    // Vieta: product of the fiber = (-1)^2 h_2(4) = -60.
    EXPECT_NEAR(std::abs(fib[0].mu * fib[1].mu + 60.0), 0.0, 1e-10);
}

TEST(Spectral, MumfordEigenvector) {
    auto L = mumford_benchmark();
    SpectralPoint pt{Place::regular(4.0), std::sqrt(60.0), 0};
    auto v = left_eigenvector(L, pt);
    EXPECT_NEAR(std::abs(v.psi(0) - 15.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(v.psi(1) - std::sqrt(60.0)), 0.0, 1e-14);
    auto w = left_eigenvector(L, pt, EigenNorm::LastCoordinateOne);
    EXPECT_NEAR(std::abs(w.psi(1) - 1.0), 0.0, 1e-14);
    EXPECT_LT(eigen_residual(L, w), 1e-14);
}

TEST(Spectral, MumfordEigenDivisor) {
    auto L = mumford_benchmark();
    auto S = spectral_curve(L);
    auto E = eigen_divisor(L, S);
    EXPECT_EQ(E.degree, 2);
    EXPECT_TRUE(E.degenerate);  // both points sit over branch points at t = 0
    std::vector<double> xs;
    for (const auto& p : E.points) {
        xs.push_back(p.base.x.real());
        EXPECT_NEAR(std::abs(p.mu), 0.0, 1e-12);
    }
    std::sort(xs.begin(), xs.end());
    EXPECT_NEAR(xs[0], -1.0, 1e-12);
    EXPECT_NEAR(xs[1], 1.0, 1e-12);
}

TEST(Spectral, ReducibleRejected) {
    CMat A = CMat::Zero(2, 2);
    A(0, 0) = 2.0;
    A(1, 1) = -2.0;
    try {
        spectral_curve(polynomial_lax(BaseCurve::rational_line(), {A}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonReduced);
    }
}

TEST(Spectral, KricheverGenus2) {
    auto c = BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(21);
    auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
    auto S = spectral_curve(L);
    EXPECT_EQ(S.branch.degree(), 4);
    EXPECT_EQ(S.genus, expected_dims(2, 2).spectralGenus);
    auto E = eigen_divisor(L, S);
    EXPECT_EQ(E.degree, expected_dims(2, 2).eigenDivisorDegree);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        Place p = c->places_over(cplx(U(rng), U(rng)))[k % 2];
        for (const auto& pt : lift_fiber(S, p)) {
            EXPECT_LT(eigen_residual(L, left_eigenvector(L, pt)), 1e-10);
        }
        auto fib = lift_fiber(S, p);
        EXPECT_LT(std::abs(fib[0].mu + fib[1].mu + S.h[0].value_at(p)), 1e-10 * std::max(1.0, std::abs(fib[0].mu)));
    }
}

TEST(Spectral, GenericDrawsHaveExpectedGenus) {
    auto c = BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    Divisor K = canonical_divisor(*c);
    for (int seed = 1; seed <= 12; ++seed) {
        std::mt19937_64 rng(seed);
        auto L = construct_lax(c, K, sample_params(c, K, 2, rng));
        auto S = spectral_curve(L);
        EXPECT_EQ(spectral_genus(S), expected_dims(2, 2).spectralGenus) << seed;
        // Hitchin invariants are holomorphic at the Tyurin points, so no denominator survives.
        for (const auto& h : S.h) EXPECT_EQ(h.d().degree(), 0) << seed;
    }
}
