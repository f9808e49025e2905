#include "laxflow/curve.hpp"

#include "laxflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laxflow {

namespace {

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

}  // namespace

bool Place::same(const Place& o, double tol) const {
    if (chart != o.chart) return false;
    switch (chart) {
        case Chart::Infinity: return sheet == o.sheet;
        case Chart::FiniteBranch: return close(x, o.x, tol);
        case Chart::FiniteRegular: return close(x, o.x, tol) && close(y, o.y, tol);
    }
    return false;
}

// ---------------------------------------------------------------------------
// BaseCurve

CurvePtr BaseCurve::rational_line() {
    static const CurvePtr line = [] {
        auto c = std::make_shared<BaseCurve>();
        c->kind_ = CurveKind::RationalLine;
        return CurvePtr(c);
    }();
    return line;
}

CurvePtr BaseCurve::hyperelliptic(const Poly& f, double sep_tol) {
    Poly ft = f.trimmed(1e-15);
    if (ft.degree() < 3) throw Error(Errc::InvalidArgument, "hyperelliptic curve needs deg f >= 3");
    auto roots = ft.roots();
    double scale = 1.0;
    for (cplx r : roots) scale = std::max(scale, std::abs(r));
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < sep_tol * scale) {
                std::ostringstream os;
                os << "f has a repeated root near " << roots[i];
                throw Error(Errc::NonSquarefree, os.str());
            }
    auto c = std::make_shared<BaseCurve>();
    c->kind_ = CurveKind::Hyperelliptic;
    c->f_ = ft;
    c->genus_ = (ft.degree() - 1) / 2;
    c->branch_x_ = std::move(roots);
    return c;
}

bool BaseCurve::same_as(const BaseCurve& o) const {
    if (this == &o) return true;
    if (kind_ != o.kind_) return false;
    return kind_ == CurveKind::RationalLine || f_.approx_equal(o.f_, 1e-12);
}

std::vector<Place> BaseCurve::places_over(cplx x0) const {
    if (is_rational()) return {Place::regular(x0)};
    cplx fx = f_(x0);
    if (std::abs(fx) <= 1e-10 * std::max(1.0, f_.magnitude_at(x0))) return {Place::branch(x0)};
    cplx y0 = std::sqrt(fx);
    return {Place::regular(x0, y0), Place::regular(x0, -y0)};
}

std::vector<Place> BaseCurve::infinite_places() const {
    if (is_rational() || odd_degree()) return {Place::infinity(0)};
    return {Place::infinity(0), Place::infinity(1)};
}

int BaseCurve::ramification(const Place& p) const {
    if (is_rational()) return 1;
    if (p.chart == Place::Chart::FiniteBranch) return 2;
    if (p.chart == Place::Chart::Infinity && odd_degree()) return 2;
    return 1;
}

bool BaseCurve::on_curve(const Place& p, double tol) const {
    if (is_rational()) return p.chart != Place::Chart::FiniteBranch && (p.chart != Place::Chart::Infinity || p.sheet == 0);
    switch (p.chart) {
        case Place::Chart::Infinity: return p.sheet == 0 || (!odd_degree() && p.sheet == 1);
        case Place::Chart::FiniteBranch: return std::abs(f_(p.x)) <= tol * std::max(1.0, f_.magnitude_at(p.x));
        case Place::Chart::FiniteRegular:
            return std::abs(p.y * p.y - f_(p.x)) <= tol * std::max(1.0, f_.magnitude_at(p.x)) &&
                   std::abs(p.y) > tol;
    }
    return false;
}

int BaseCurve::x_pole_order_at_infinity() const { return (!is_rational() && odd_degree()) ? 2 : 1; }

int BaseCurve::y_pole_order_at_infinity() const {
    if (is_rational()) return 0;
    return odd_degree() ? f_.degree() : (genus_ + 1);
}

ChartSeries BaseCurve::chart(const Place& p, int terms) const {
    ChartSeries cs;
    int T = std::max(terms, 4);
    auto padded = [&](const Poly& q, int n) {
        std::vector<cplx> v(static_cast<size_t>(n), cplx{});
        for (int k = 0; k <= q.degree() && k < n; ++k) v[static_cast<size_t>(k)] = q.coeff(k);
        return LaurentSeries(0, std::move(v));
    };
    if (is_rational()) {
        if (p.chart == Place::Chart::Infinity) {
            std::vector<cplx> v(static_cast<size_t>(T + 1), cplx{});
            v[0] = 1.0;
            cs.x = LaurentSeries(-1, std::move(v));
        } else {
            cs.x = LaurentSeries::constant(p.x, T + 1) + LaurentSeries::variable(T + 1);
        }
        return cs;
    }
    int n = f_.degree();
    switch (p.chart) {
        case Place::Chart::FiniteRegular: {
            cs.x = LaurentSeries::constant(p.x, T + 1) + LaurentSeries::variable(T + 1);
            LaurentSeries F = padded(f_.shifted(p.x), T + 1);
            cs.y = F.sqrt_with_leading(p.y);
            break;
        }
        case Place::Chart::FiniteBranch: {
            // Solve f(x0 + u) = w^2 for u(w) by fixed-point iteration.
            Poly g = f_.shifted(p.x);
            cplx g1 = g.coeff(1);
            if (std::abs(g1) == 0.0) throw Error(Errc::NonSquarefree, "branch chart at a multiple root");
            std::vector<cplx> hc(static_cast<size_t>(std::max(0, g.degree() + 1)), cplx{});
            for (int k = 2; k <= g.degree(); ++k) hc[static_cast<size_t>(k)] = g.coeff(k);
            Poly h(hc);
            std::vector<cplx> w2(static_cast<size_t>(T + 1), cplx{});
            w2[2] = 1.0;
            LaurentSeries W2(0, w2);
            LaurentSeries u = W2 * (1.0 / g1);
            for (int it = 0; it < T / 2 + 2; ++it) {
                LaurentSeries hu = LaurentSeries::compose(h, u).truncated(T + 1);
                u = (W2 - hu) * (1.0 / g1);
            }
            cs.x = LaurentSeries::constant(p.x, T + 1) + u.truncated(T + 1);
            cs.y = LaurentSeries::variable(T + 1);
            break;
        }
        case Place::Chart::Infinity: {
            cplx lead = std::sqrt(f_.leading());
            if (p.sheet == 1) lead = -lead;
            if (odd_degree()) {
                std::vector<cplx> xv(static_cast<size_t>(T + 1), cplx{});
                xv[0] = 1.0;
                cs.x = LaurentSeries(-2, std::move(xv));
                std::vector<cplx> sv(static_cast<size_t>(T + n + 1), cplx{});
                for (int k = 0; k <= n; ++k) {
                    int e = 2 * (n - k);
                    if (e < static_cast<int>(sv.size())) sv[static_cast<size_t>(e)] = f_.coeff(k);
                }
                cs.y = LaurentSeries(0, std::move(sv)).sqrt_with_leading(lead).shifted(-n);
            } else {
                std::vector<cplx> xv(static_cast<size_t>(T + 1), cplx{});
                xv[0] = 1.0;
                cs.x = LaurentSeries(-1, std::move(xv));
                std::vector<cplx> sv(static_cast<size_t>(T + n + 1), cplx{});
                for (int k = 0; k <= n; ++k) sv[static_cast<size_t>(n - k)] = f_.coeff(k);
                cs.y = LaurentSeries(0, std::move(sv)).sqrt_with_leading(lead).shifted(-(genus_ + 1));
            }
            break;
        }
    }
    return cs;
}

// ---------------------------------------------------------------------------
// Divisor

void Divisor::add(const Place& p, int mult) {
    if (mult == 0) return;
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        if (it->first.same(p)) {
            it->second += mult;
            if (it->second == 0) terms_.erase(it);
            return;
        }
    }
    terms_.emplace_back(p, mult);
}

int Divisor::degree() const {
    int d = 0;
    for (const auto& [p, m] : terms_) d += m;
    return d;
}

int Divisor::multiplicity(const Place& p) const {
    for (const auto& [q, m] : terms_)
        if (q.same(p)) return m;
    return 0;
}

Divisor Divisor::operator+(const Divisor& o) const {
    Divisor r = *this;
    for (const auto& [p, m] : o.terms_) r.add(p, m);
    return r;
}

Divisor Divisor::operator-(const Divisor& o) const { return *this + o.scaled(-1); }

Divisor Divisor::scaled(int k) const {
    Divisor r;
    for (const auto& [p, m] : terms_) r.add(p, m * k);
    return r;
}

// ---------------------------------------------------------------------------
// FFElement

FFElement FFElement::zero(CurvePtr c) { return FFElement(std::move(c), {}, {}, Poly::constant(1.0)); }

FFElement FFElement::constant(CurvePtr c, cplx v) { return FFElement(std::move(c), Poly::constant(v), {}, Poly::constant(1.0)); }

FFElement FFElement::poly(CurvePtr c, Poly a) { return FFElement(std::move(c), std::move(a), {}, Poly::constant(1.0)); }

FFElement FFElement::x(CurvePtr c) { return poly(std::move(c), Poly{0.0, 1.0}); }

FFElement FFElement::y(CurvePtr c) {
    if (c->is_rational()) throw Error(Errc::UnsupportedRegime, "y is undefined on the rational line");
    return FFElement(std::move(c), {}, Poly::constant(1.0), Poly::constant(1.0));
}

FFElement FFElement::make(CurvePtr c, Poly a, Poly b, Poly d) {
    if (c->is_rational() && !b.is_zero()) throw Error(Errc::InvalidArgument, "y-part on the rational line");
    FFElement e(std::move(c), std::move(a), std::move(b), std::move(d));
    e.normalize(1e-7);
    return e;
}

void FFElement::normalize(double tol) {
    a_ = a_.trimmed(1e-14);
    b_ = b_.trimmed(1e-14);
    d_ = d_.trimmed(1e-14);
    if (d_.is_zero()) throw Error(Errc::DivisionByZero, "zero denominator");
    if (a_.is_zero() && b_.is_zero()) {
        d_ = Poly::constant(1.0);
        return;
    }
    // a and b are judged against the joint magnitude of a + y b, so rounding noise in either
    // part cannot block the cancellation.
    const bool hyper = curve_ && !curve_->is_rational();
    auto vanishes = [&](cplx r) {
        const double ys = hyper ? std::max(1.0, std::sqrt(curve_->f().magnitude_at(r))) : 0.0;
        const double scale = a_.magnitude_at(r) + (b_.is_zero() ? 0.0 : ys * b_.magnitude_at(r));
        const double va = a_.is_zero() ? 0.0 : std::abs(a_(r));
        const double vb = b_.is_zero() ? 0.0 : ys * std::abs(b_(r));
        return va <= tol * scale && vb <= tol * scale;
    };
    bool changed = true;
    while (changed && d_.degree() > 0) {
        changed = false;
        for (auto [r, mult] : d_.root_clusters()) {
            if (vanishes(r)) {
                a_ = a_.deflate(r);
                b_ = b_.deflate(r);
                d_ = d_.deflate(r);
                changed = true;
                break;
            }
        }
    }
    cplx lc = d_.leading();
    a_ *= 1.0 / lc;
    b_ *= 1.0 / lc;
    d_ = d_.monic();
}

FFElement FFElement::normalized(double tol) const {
    FFElement e = *this;
    e.normalize(tol);
    return e;
}

void FFElement::check_same_curve(const FFElement& o) const {
    if (!curve_ || !o.curve_ || !curve_->same_as(*o.curve_)) throw Error(Errc::CurveMismatch, "elements live on different curves");
}

FFElement FFElement::operator+(const FFElement& o) const {
    check_same_curve(o);
    if (d_.approx_equal(o.d_, 1e-13)) return make(curve_, a_ + o.a_, b_ + o.b_, d_);
    return make(curve_, a_ * o.d_ + o.a_ * d_, b_ * o.d_ + o.b_ * d_, d_ * o.d_);
}

FFElement FFElement::operator-(const FFElement& o) const { return *this + (-o); }

FFElement FFElement::operator*(const FFElement& o) const {
    check_same_curve(o);
    Poly a = a_ * o.a_;
    if (!curve_->is_rational()) a += curve_->f() * b_ * o.b_;
    Poly b = a_ * o.b_ + o.a_ * b_;
    return make(curve_, std::move(a), std::move(b), d_ * o.d_);
}

FFElement FFElement::operator*(cplx s) const {
    FFElement e = *this;
    e.a_ *= s;
    e.b_ *= s;
    if (e.is_zero()) e.d_ = Poly::constant(1.0);
    return e;
}

FFElement FFElement::inverse() const {
    if (is_zero()) throw Error(Errc::DivisionByZero, "inverse of the zero element");
    Poly norm = a_ * a_;
    if (!curve_->is_rational()) norm -= curve_->f() * b_ * b_;
    if (norm.trimmed(1e-13).is_zero()) throw Error(Errc::DivisionByZero, "element has vanishing norm");
    return make(curve_, a_ * d_, -(b_ * d_), norm);
}

FFElement FFElement::operator/(const FFElement& o) const {
    check_same_curve(o);
    return *this * o.inverse();
}

FFElement FFElement::conjugate() const { return FFElement(curve_, a_, -b_, d_); }

cplx FFElement::value_at(const Place& p) const {
    if (!p.is_finite()) throw Error(Errc::InvalidArgument, "value_at needs a finite place");
    cplx num = a_(p.x);
    if (!b_.is_zero()) {
        if (p.chart == Place::Chart::FiniteBranch) {
            // y = 0 there
        } else {
            num += p.y * b_(p.x);
        }
    }
    cplx den = d_(p.x);
    if (den == cplx{}) return {std::numeric_limits<double>::infinity(), 0.0};
    return num / den;
}

bool FFElement::approx_equal(const FFElement& o, double tol) const {
    check_same_curve(o);
    Poly l1 = a_ * o.d_, r1 = o.a_ * d_, l2 = b_ * o.d_, r2 = o.b_ * d_;
    return l1.approx_equal(r1, tol) && l2.approx_equal(r2, tol);
}

// ---------------------------------------------------------------------------
// Expansions

namespace {

LaurentSeries expand_in_chart(const FFElement& e, const ChartSeries& cs) {
    LaurentSeries num = LaurentSeries::compose(e.a(), cs.x);
    if (!e.b().is_zero()) num = num + cs.y * LaurentSeries::compose(e.b(), cs.x);
    LaurentSeries den = LaurentSeries::compose(e.d(), cs.x);
    double scale = den.max_abs();
    den = den.stripped(1e-11 * scale);
    if (den.coeffs().empty()) throw Error(Errc::DivisionByZero, "denominator vanishes identically in chart");
    return num * den.inverse();
}

}  // namespace

LaurentSeries expand(const FFElement& e, const Place& p, int prec) {
    const BaseCurve& c = *e.curve();
    int T = std::max(8, prec + 8 + 3 * (e.d().degree() + e.a().degree() + e.b().degree()));
    for (int attempt = 0; attempt < 6; ++attempt) {
        LaurentSeries s = expand_in_chart(e, c.chart(p, T));
        if (s.prec() >= prec) return s.truncated(prec);
        T *= 2;
    }
    throw Error(Errc::IllConditioned, "Laurent expansion failed to reach requested precision");
}

std::vector<cplx> laurent_expand(const FFElement& e, const Place& p, int lo, int hi) {
    if (lo > hi) throw Error(Errc::InvalidArgument, "laurent_expand: lo > hi");
    LaurentSeries s = expand(e, p, hi + 1);
    std::vector<cplx> out;
    out.reserve(static_cast<size_t>(hi - lo + 1));
    for (int k = lo; k <= hi; ++k) out.push_back(s[k]);
    return out;
}

cplx residue_at(const FFElement& e, const Place& p) {
    const BaseCurve& c = *e.curve();
    LaurentSeries dx = c.chart(p, 16).x.derivative();
    int need = -dx.val() + 1;
    LaurentSeries s = expand(e, p, need);
    int T = std::max(16, need - s.val() + 8);
    dx = c.chart(p, T).x.derivative();
    LaurentSeries prod = s * dx;
    if (prod.prec() <= -1) throw Error(Errc::IllConditioned, "residue: insufficient precision");
    return prod[-1];
}

namespace {

// Radius in the local coordinate inside which the expansion of e converges comfortably.
double chart_radius(const FFElement& e, const Place& p) {
    const BaseCurve& c = *e.curve();
    std::vector<cplx> sing;
    for (auto [r, m] : e.d().root_clusters()) sing.push_back(r);
    if (!c.is_rational() && !e.b().is_zero())
        for (cplx r : c.branch_x()) sing.push_back(r);
    if (p.chart == Place::Chart::FiniteBranch && !c.is_rational())
        for (cplx r : c.branch_x()) sing.push_back(r);
    if (!p.is_finite()) {
        double big = 1.0;
        for (cplx s : sing) big = std::max(big, std::abs(s));
        return c.x_pole_order_at_infinity() == 2 ? 0.5 / std::sqrt(big) : 0.5 / big;
    }
    double rx = 1.0;
    for (cplx s : sing) {
        double d = std::abs(s - p.x);
        if (d > 1e-7 * (1.0 + std::abs(s))) rx = std::min(rx, d);
    }
    double r = 0.5 * rx;
    if (p.chart == Place::Chart::FiniteBranch) r = 0.5 * std::sqrt(rx * std::abs(c.f().derivative()(p.x)));
    return std::clamp(r, 1e-3, 1.0);
}

}  // namespace

int valuation(const FFElement& e, const Place& p, double rel_tol, int search) {
    if (e.is_zero()) throw Error(Errc::InvalidArgument, "valuation of the zero element");
    int lo = -(e.d().degree() * 2 + 2 * (std::max(e.a().degree(), e.b().degree() + e.curve()->y_pole_order_at_infinity())) + 4);
    LaurentSeries s = expand(e, p, lo + search + 2 * std::max(0, e.d().degree() + e.a().degree() + e.b().degree()) + 8);
    double r = chart_radius(e, p);
    double scale = 0.0;
    for (int k = s.val(); k < s.prec(); ++k) scale = std::max(scale, std::abs(s[k]) * std::pow(r, k));
    for (int k = s.val(); k < s.prec(); ++k)
        if (std::abs(s[k]) * std::pow(r, k) > rel_tol * scale) return k;
    throw Error(Errc::IllConditioned, "valuation: series numerically zero");
}

std::vector<Place> candidate_poles(const FFElement& e) {
    std::vector<Place> out;
    auto push = [&](const Place& p) {
        for (const Place& q : out)
            if (q.same(p)) return;
        out.push_back(p);
    };
    for (auto [r, mult] : e.d().root_clusters())
        for (const Place& p : e.curve()->places_over(r)) push(p);
    for (const Place& p : e.curve()->infinite_places()) push(p);
    if (!e.curve()->is_rational())
        for (cplx r : e.curve()->branch_x()) push(Place::branch(r));
    return out;
}

Divisor divisor_of(const FFElement& e, double rel_tol) {
    if (e.is_zero()) throw Error(Errc::InvalidArgument, "divisor of the zero element");
    const BaseCurve& c = *e.curve();
    Poly norm = e.a() * e.a();
    if (!c.is_rational()) norm -= c.f() * e.b() * e.b();
    norm = norm.trimmed(1e-13);
    std::vector<Place> cands;
    auto push = [&](const Place& p) {
        for (const Place& q : cands)
            if (q.same(p)) return;
        cands.push_back(p);
    };
    for (auto [r, mult] : norm.root_clusters())
        for (const Place& p : c.places_over(r)) push(p);
    for (auto [r, mult] : e.d().root_clusters())
        for (const Place& p : c.places_over(r)) push(p);
    for (const Place& p : c.infinite_places()) push(p);
    Divisor D;
    for (const Place& p : cands) D.add(p, valuation(e, p, rel_tol));
    return D;
}

bool LaurentTail::is_zero(double tol) const {
    for (cplx c : coeffs)
        if (std::abs(c) > tol) return false;
    return true;
}

LaurentTail tail_of(const FFElement& e, const Place& p, int order_bound) {
    LaurentTail t;
    t.place = p;
    t.order_bound = order_bound;
    if (order_bound <= 0) return t;
    auto c = laurent_expand(e, p, -order_bound, -1);
    t.coeffs.assign(c.rbegin(), c.rend());
    return t;
}

Divisor canonical_divisor(const BaseCurve& c) {
    if (c.is_rational())
        throw Error(Errc::UnsupportedRegime,
                    "the rational line has no effective canonical divisor; use the tail-support divisor at infinity");
    Divisor K;
    int g = c.genus();
    if (c.odd_degree()) {
        K.add(Place::infinity(0), 2 * g - 2);
    } else {
        K.add(Place::infinity(0), g - 1);
        K.add(Place::infinity(1), g - 1);
    }
    return K;
}

// ---------------------------------------------------------------------------
// Riemann-Roch spaces

std::vector<FFElement> rr_basis(const CurvePtr& cp, const Divisor& D, double rank_tol) {
    const BaseCurve& c = *cp;
    // Common denominator over the finite positive part of D.
    std::vector<std::pair<cplx, int>> xs;
    int n_inf = 0;
    for (const auto& [p, m] : D.terms()) {
        if (!p.is_finite()) {
            n_inf = std::max(n_inf, m);
            continue;
        }
        if (m <= 0) continue;
        int e = c.ramification(p);
        int k = (m + e - 1) / e;
        bool found = false;
        for (auto& [x0, kk] : xs)
            if (std::abs(x0 - p.x) <= kPlaceTol * (1.0 + std::abs(x0))) {
                kk = std::max(kk, k);
                found = true;
            }
        if (!found) xs.emplace_back(p.x, k);
    }
    Poly d = Poly::constant(1.0);
    for (const auto& [x0, k] : xs)
        for (int i = 0; i < k; ++i) d *= Poly{-x0, 1.0};
    int dd = d.degree();

    std::vector<FFElement> cands;
    if (c.is_rational()) {
        for (int i = 0; i <= dd + n_inf; ++i) cands.push_back(FFElement::make(cp, Poly::monomial(i), {}, d));
    } else {
        int g = c.genus();
        int imax, jmax;
        if (c.odd_degree()) {
            imax = dd + n_inf / 2;
            int t = n_inf + 2 * dd - (2 * g + 1);
            jmax = t >= 0 ? t / 2 : -1;
        } else {
            imax = dd + n_inf;
            jmax = dd + n_inf - g - 1;
        }
        for (int i = 0; i <= imax; ++i) cands.push_back(FFElement::make(cp, Poly::monomial(i), {}, d));
        for (int j = 0; j <= jmax; ++j) cands.push_back(FFElement::make(cp, {}, Poly::monomial(j), d));
    }
    if (cands.empty()) return {};

    // Places where order conditions are imposed.
    std::vector<std::pair<Place, int>> conds;
    auto add_cond = [&](const Place& p) {
        for (const auto& [q, b] : conds)
            if (q.same(p)) return;
        conds.emplace_back(p, -D.multiplicity(p));
    };
    for (const auto& [x0, k] : xs)
        for (const Place& p : c.places_over(x0)) add_cond(p);
    for (const Place& p : c.infinite_places()) add_cond(p);
    for (const auto& [p, m] : D.terms())
        if (m < 0) add_cond(p);

    std::vector<std::vector<cplx>> rows;
    for (const auto& [p, bound] : conds) {
        std::vector<LaurentSeries> ser;
        int lo = bound;
        for (const auto& e : cands) {
            ser.push_back(expand(e, p, bound));
            lo = std::min(lo, ser.back().val());
        }
        for (int k = lo; k < bound; ++k) {
            std::vector<cplx> row;
            row.reserve(cands.size());
            for (const auto& s : ser) row.push_back(s[k]);
            rows.push_back(std::move(row));
        }
    }
    Eigen::MatrixXcd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cands.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cands.size(); ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    Eigen::MatrixXcd N = rows.empty() ? Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(cands.size()), static_cast<Eigen::Index>(cands.size()))
                                      : nullspace(A, rank_tol, true);
    std::vector<FFElement> basis;
    for (Eigen::Index col = 0; col < N.cols(); ++col) {
        FFElement acc = FFElement::zero(cp);
        Poly a, b;
        for (size_t j = 0; j < cands.size(); ++j) {
            cplx v = N(static_cast<Eigen::Index>(j), col);
            if (std::abs(v) < 1e-14) continue;
            a += cands[j].a() * v;
            b += cands[j].b() * v;
        }
        // Candidates share the monic denominator d, possibly reduced by normalization.
        (void)acc;
        basis.push_back(FFElement::make(cp, a * cplx{1.0}, b, cands.front().d()));
    }
    return basis;
}

}  // namespace laxflow
