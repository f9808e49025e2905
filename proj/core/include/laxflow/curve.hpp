#pragma once

// Base curves (the rational line and hyperelliptic curves y^2 = f(x)), their places,
// divisors and function fields.

#include "laxflow/errors.hpp"
#include "laxflow/poly.hpp"
#include "laxflow/series.hpp"

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace laxflow {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kPlaceTol = 1e-8;

/// A point of the smooth model together with its chart.
///
/// Local coordinates: FiniteRegular uses w = x - x0; FiniteBranch uses w = y;
/// Infinity uses w = 1/x, except on odd-degree models where x = w^-2 and the
/// sign of w is fixed by y = w^-(2g+1) (sqrt(lc f) + O(w)).
struct Place {
    enum class Chart { FiniteRegular, FiniteBranch, Infinity };

    Chart chart = Chart::FiniteRegular;
    cplx x{};
    cplx y{};
    int sheet = 0;

    static Place regular(cplx x0, cplx y0 = {}) { return {Chart::FiniteRegular, x0, y0, 0}; }
    static Place branch(cplx x0) { return {Chart::FiniteBranch, x0, {}, 0}; }
    static Place infinity(int sheet = 0) { return {Chart::Infinity, {}, {}, sheet}; }

    bool is_finite() const { return chart != Chart::Infinity; }
    bool same(const Place& o, double tol = kPlaceTol) const;
};

/// Series of the coordinate functions in a place's local coordinate.
struct ChartSeries {
    LaurentSeries x;
    LaurentSeries y;  // empty on the rational line
};

enum class CurveKind { RationalLine, Hyperelliptic };

class BaseCurve;
using CurvePtr = std::shared_ptr<const BaseCurve>;

class BaseCurve {
public:
    static CurvePtr rational_line();
    /// Rejects f unless it is squarefree of degree >= 3.
    static CurvePtr hyperelliptic(const Poly& f, double sep_tol = 1e-6);

    CurveKind kind() const { return kind_; }
    bool is_rational() const { return kind_ == CurveKind::RationalLine; }
    const Poly& f() const { return f_; }
    int genus() const { return genus_; }
    bool odd_degree() const { return f_.degree() % 2 == 1; }
    const std::vector<cplx>& branch_x() const { return branch_x_; }

    bool same_as(const BaseCurve& o) const;

    /// Places lying over x = x0 (one or two).
    std::vector<Place> places_over(cplx x0) const;
    std::vector<Place> infinite_places() const;
    /// Ramification index of x at p.
    int ramification(const Place& p) const;
    bool on_curve(const Place& p, double tol = kDefaultTol) const;
    /// x(w), y(w) with `terms` coefficients beyond the leading one.
    ChartSeries chart(const Place& p, int terms) const;
    /// Pole order of x and of y at the infinite places.
    int x_pole_order_at_infinity() const;
    int y_pole_order_at_infinity() const;

private:
    CurveKind kind_ = CurveKind::RationalLine;
    Poly f_;
    int genus_ = 0;
    std::vector<cplx> branch_x_;
};

/// Finite formal sum of places; places are merged within kPlaceTol.
class Divisor {
public:
    Divisor() = default;
    void add(const Place& p, int mult);
    int degree() const;
    int multiplicity(const Place& p) const;
    const std::vector<std::pair<Place, int>>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    Divisor operator+(const Divisor& o) const;
    Divisor operator-(const Divisor& o) const;
    Divisor scaled(int k) const;

private:
    std::vector<std::pair<Place, int>> terms_;
};

/// Element (a(x) + y b(x)) / d(x) of the function field; b = 0 on the rational line.
/// The representation keeps d monic with common factors of (a, b) and d removed.
class FFElement {
public:
    FFElement() = default;
    static FFElement zero(CurvePtr c);
    static FFElement constant(CurvePtr c, cplx v);
    static FFElement poly(CurvePtr c, Poly a);
    static FFElement x(CurvePtr c);
    static FFElement y(CurvePtr c);
    static FFElement make(CurvePtr c, Poly a, Poly b, Poly d);

    const CurvePtr& curve() const { return curve_; }
    const Poly& a() const { return a_; }
    const Poly& b() const { return b_; }
    const Poly& d() const { return d_; }

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool is_polynomial_in_x() const { return b_.is_zero() && d_.degree() == 0; }

    FFElement operator+(const FFElement& o) const;
    FFElement operator-(const FFElement& o) const;
    FFElement operator*(const FFElement& o) const;
    FFElement operator/(const FFElement& o) const;
    FFElement operator*(cplx s) const;
    FFElement operator-() const { return *this * cplx{-1.0}; }
    FFElement inverse() const;
    /// The hyperelliptic conjugate (a - y b)/d.
    FFElement conjugate() const;

    /// Value at a finite place (x0, y0); poles give inf.
    cplx value_at(const Place& p) const;
    /// Re-runs normalization; the identity on canonical input.
    FFElement normalized(double tol = 1e-7) const;
    bool approx_equal(const FFElement& o, double tol = kDefaultTol) const;

private:
    FFElement(CurvePtr c, Poly a, Poly b, Poly d) : curve_(std::move(c)), a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {}
    void check_same_curve(const FFElement& o) const;
    void normalize(double tol);

    CurvePtr curve_;
    Poly a_, b_, d_;
};

inline FFElement operator*(cplx s, const FFElement& e) { return e * s; }

/// Laurent expansion of e at p in the place's local coordinate, valid for exponents < prec.
LaurentSeries expand(const FFElement& e, const Place& p, int prec);

/// Coefficients of w^k for lo <= k <= hi.
std::vector<cplx> laurent_expand(const FFElement& e, const Place& p, int lo, int hi);

/// Coefficient of w^-1 in e * dx/dw at p.
cplx residue_at(const FFElement& e, const Place& p);

/// Order of vanishing of e at p (negative for poles); coefficients below
/// rel_tol times the largest inspected coefficient count as zero.
int valuation(const FFElement& e, const Place& p, double rel_tol = 1e-9, int search = 24);

/// Poles of e*dx: the places where e or dx/dw may be singular.
std::vector<Place> candidate_poles(const FFElement& e);

/// Principal divisor of a nonzero element.
Divisor divisor_of(const FFElement& e, double rel_tol = 1e-9);

/// Principal part of a Laurent expansion: coefficients of w^-N..w^-1.
struct LaurentTail {
    Place place;
    int order_bound = 0;          // N
    std::vector<cplx> coeffs;     // coeffs[k-1] multiplies w^-k, k = 1..N
    bool is_zero(double tol = 0.0) const;
};

LaurentTail tail_of(const FFElement& e, const Place& p, int order_bound);

/// Divisor of dx/y (hyperelliptic only).
Divisor canonical_divisor(const BaseCurve& c);

/// Basis of L(D) = { g : (g) + D >= 0 }; empty when L(D) = 0.
std::vector<FFElement> rr_basis(const CurvePtr& c, const Divisor& D, double rank_tol = 1e-8);

}  // namespace laxflow
