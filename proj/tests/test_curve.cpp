#include "laxflow/curve.hpp"

#include <gtest/gtest.h>

using namespace laxflow;

namespace {

CurvePtr elliptic() { return BaseCurve::hyperelliptic(Poly{0.0, -1.0, 0.0, 1.0}); }      // y^2 = x^3 - x
CurvePtr genus2() { return BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0}); }  // y^2 = x^5 + x + 1
CurvePtr even_g1() { return BaseCurve::hyperelliptic(Poly{2.0, 0.0, -3.0, 0.0, 1.0}); }     // y^2 = (x^2-1)(x^2-2)

}  // namespace

TEST(Curve, GenusAndRejection) {
    EXPECT_EQ(elliptic()->genus(), 1);
    EXPECT_EQ(genus2()->genus(), 2);
    EXPECT_EQ(even_g1()->genus(), 1);
    try {
        BaseCurve::hyperelliptic(Poly{0.0, 0.0, 1.0, 1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonSquarefree);
    }
}

TEST(Curve, ChartsSatisfyEquation) {
    auto c = genus2();
    std::vector<Place> ps = {Place::infinity(0), c->places_over(0.3)[0], Place::branch(c->branch_x()[0])};
    for (const auto& p : ps) {
        auto cs = c->chart(p, 20);
        LaurentSeries lhs = cs.y * cs.y, rhs = LaurentSeries::compose(c->f(), cs.x);
        int hi = std::min(lhs.prec(), rhs.prec());
        for (int k = std::min(lhs.val(), rhs.val()); k < hi; ++k) EXPECT_NEAR(std::abs(lhs[k] - rhs[k]), 0.0, 1e-9) << k;
    }
}

TEST(Curve, DivisorOfY) {
    auto c = elliptic();
    Divisor D = divisor_of(FFElement::y(c));
    EXPECT_EQ(D.degree(), 0);
    EXPECT_EQ(D.multiplicity(Place::infinity()), -3);
    for (cplx r : c->branch_x()) EXPECT_EQ(D.multiplicity(Place::branch(r)), 1);
}

TEST(Curve, FieldArithmetic) {
    auto c = genus2();
    auto x = FFElement::x(c), y = FFElement::y(c);
    auto e = (y + x * x) / (x - FFElement::constant(c, 2.0));
    auto back = e * (x - FFElement::constant(c, 2.0)) - x * x;
    EXPECT_TRUE(back.approx_equal(y, 1e-10));
    EXPECT_TRUE((e * e.inverse()).approx_equal(FFElement::constant(c, 1.0), 1e-10));
    // y * y reduces to f.
    EXPECT_TRUE((y * y).approx_equal(FFElement::poly(c, c->f()), 1e-12));
}

TEST(Curve, ResidueTheoremRational) {
    auto L = BaseCurve::rational_line();
    auto e = FFElement::make(L, Poly{0.0, 1.0}, {}, Poly{-1.0, 0.0, 1.0});  // x/(x^2-1)
    cplx s = residue_at(e, Place::regular(1.0)) + residue_at(e, Place::regular(-1.0)) + residue_at(e, Place::infinity());
    EXPECT_NEAR(std::abs(s), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(residue_at(e, Place::regular(1.0)) - 0.5), 0.0, 1e-12);
}

TEST(Curve, ResidueTheoremHyperelliptic) {
    auto c = genus2();
    auto x = FFElement::x(c), y = FFElement::y(c);
    // omega = g dx with g = (y + x^3) / ((x - 0.5)(x + 1.5 i) y): residues sum to zero.
    auto g = (y + x * x * x) / (FFElement::poly(c, Poly{-0.5, 1.0}) * FFElement::poly(c, Poly{cplx(0, 1.5), 1.0}) * y);
    cplx s{};
    for (const auto& p : candidate_poles(g)) s += residue_at(g, p);
    EXPECT_NEAR(std::abs(s), 0.0, 1e-9);
}

TEST(Curve, RiemannRochDimensions) {
    for (auto c : {elliptic(), genus2(), even_g1()}) {
        int g = c->genus();
        Divisor D;
        for (const auto& p : c->infinite_places()) D.add(p, 2 * g + 1);
        int deg = D.degree();
        EXPECT_EQ(static_cast<int>(rr_basis(c, D).size()), deg - g + 1);
        EXPECT_EQ(static_cast<int>(rr_basis(c, canonical_divisor(*c)).size()), g);
        EXPECT_EQ(static_cast<int>(rr_basis(c, Divisor{}).size()), 1);
    }
    // Non-special divisor with finite support.
    auto c = genus2();
    Divisor D;
    for (double x0 : {0.2, 0.7, -0.4}) D.add(c->places_over(x0)[0], 1);
    D.add(Place::infinity(), 1);
    auto B = rr_basis(c, D);
    EXPECT_EQ(static_cast<int>(B.size()), 4 - 2 + 1);
    for (const auto& e : B)
        for (const auto& [p, m] : D.terms()) EXPECT_GE(valuation(e, p), -m);
    // Negative degree gives nothing.
    Divisor N;
    N.add(Place::infinity(), -1);
    EXPECT_TRUE(rr_basis(c, N).empty());
}
