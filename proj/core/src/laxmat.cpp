#include "laxflow/laxmat.hpp"

#include "laxflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laxflow {

// ---------------------------------------------------------------------------
// MatrixFunc

MatrixFunc MatrixFunc::zero(CurvePtr c, int l) {
    MatrixFunc m;
    m.l_ = l;
    m.e_.assign(static_cast<size_t>(l * l), FFElement::zero(c));
    m.curve_ = std::move(c);
    return m;
}

MatrixFunc MatrixFunc::identity(CurvePtr c, int l) {
    MatrixFunc m = zero(c, l);
    for (int i = 0; i < l; ++i) m(i, i) = FFElement::constant(c, 1.0);
    return m;
}

MatrixFunc MatrixFunc::constant(CurvePtr c, const CMat& A) { return polynomial(std::move(c), {A}); }

MatrixFunc MatrixFunc::polynomial(CurvePtr c, const std::vector<CMat>& coeffs) {
    if (coeffs.empty()) throw Error(Errc::InvalidArgument, "polynomial matrix needs at least one coefficient");
    int l = static_cast<int>(coeffs[0].rows());
    MatrixFunc m = zero(c, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            std::vector<cplx> pc;
            for (const auto& A : coeffs) pc.push_back(A(i, j));
            m(i, j) = FFElement::poly(c, Poly(pc).trimmed(0.0));
        }
    return m;
}

MatrixFunc MatrixFunc::operator+(const MatrixFunc& o) const {
    MatrixFunc r = *this;
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] + o.e_[k];
    return r;
}

MatrixFunc MatrixFunc::operator-(const MatrixFunc& o) const {
    MatrixFunc r = *this;
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] - o.e_[k];
    return r;
}

MatrixFunc MatrixFunc::operator*(const MatrixFunc& o) const {
    MatrixFunc r = zero(curve_, l_);
    for (int i = 0; i < l_; ++i)
        for (int j = 0; j < l_; ++j) {
            FFElement acc = FFElement::zero(curve_);
            for (int k = 0; k < l_; ++k) {
                if ((*this)(i, k).is_zero() || o(k, j).is_zero()) continue;
                acc = acc + (*this)(i, k) * o(k, j);
            }
            r(i, j) = acc;
        }
    return r;
}

MatrixFunc MatrixFunc::operator*(const FFElement& s) const {
    MatrixFunc r = *this;
    for (auto& e : r.e_) e = e * s;
    return r;
}

MatrixFunc MatrixFunc::operator*(cplx s) const {
    MatrixFunc r = *this;
    for (auto& e : r.e_) e = e * s;
    return r;
}

MatrixFunc MatrixFunc::pow(int n) const {
    if (n < 0) throw Error(Errc::InvalidArgument, "negative matrix power");
    MatrixFunc r = identity(curve_, l_);
    for (int k = 0; k < n; ++k) r = r * *this;
    return r;
}

FFElement MatrixFunc::trace() const {
    FFElement t = FFElement::zero(curve_);
    for (int i = 0; i < l_; ++i) t = t + (*this)(i, i);
    return t;
}

MatrixFunc MatrixFunc::conjugated(const CMat& W) const {
    CMat Wi = W.inverse();
    MatrixFunc r = zero(curve_, l_);
    for (int i = 0; i < l_; ++i)
        for (int k = 0; k < l_; ++k) {
            FFElement acc = FFElement::zero(curve_);
            for (int a = 0; a < l_; ++a)
                for (int b = 0; b < l_; ++b) {
                    cplx s = Wi(i, a) * W(b, k);
                    if (s == cplx{} || (*this)(a, b).is_zero()) continue;
                    acc = acc + (*this)(a, b) * s;
                }
            r(i, k) = acc;
        }
    return r;
}

CMat MatrixFunc::value_at(const Place& p) const {
    CMat A(l_, l_);
    for (int i = 0; i < l_; ++i)
        for (int j = 0; j < l_; ++j) A(i, j) = (*this)(i, j).value_at(p);
    return A;
}

std::vector<CMat> MatrixFunc::laurent(const Place& p, int lo, int hi) const {
    std::vector<CMat> out(static_cast<size_t>(hi - lo + 1), CMat::Zero(l_, l_));
    for (int i = 0; i < l_; ++i)
        for (int j = 0; j < l_; ++j) {
            if ((*this)(i, j).is_zero()) continue;
            auto c = laurent_expand((*this)(i, j), p, lo, hi);
            for (size_t k = 0; k < c.size(); ++k) out[k](i, j) = c[k];
        }
    return out;
}

std::vector<CMat> MatrixFunc::poly_coeffs() const {
    int deg = 0;
    for (const auto& e : e_) {
        if (!e.b().is_zero() || e.d().degree() != 0) throw Error(Errc::InvalidArgument, "matrix entries are not polynomials");
        deg = std::max(deg, e.a().degree());
    }
    std::vector<CMat> out(static_cast<size_t>(deg + 1), CMat::Zero(l_, l_));
    for (int i = 0; i < l_; ++i)
        for (int j = 0; j < l_; ++j) {
            const FFElement& e = (*this)(i, j);
            for (int k = 0; k <= e.a().degree(); ++k) out[static_cast<size_t>(k)](i, j) = e.a().coeff(k) / e.d().coeff(0);
        }
    return out;
}

MatrixFunc commutator(const MatrixFunc& a, const MatrixFunc& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Validation

KricheverTyurinParams KricheverLax::params() const {
    KricheverTyurinParams p;
    for (const auto& tp : tyurin.points) {
        p.gamma.push_back(tp.gamma);
        p.alpha.push_back(tp.alpha);
    }
    p.beta = beta;
    p.kappa = kappa;
    return p;
}

namespace {

int tyurin_index(const TyurinData& t, const Place& p) {
    for (size_t j = 0; j < t.points.size(); ++j)
        if (t.points[j].gamma.same(p)) return static_cast<int>(j);
    return -1;
}

}  // namespace

ValidationReport validate_lax(const MatrixFunc& m, const TyurinData& t, const Divisor& K, double tol) {
    ValidationReport rep;
    const CurvePtr& c = m.curve();
    const int l = m.size();

    for (size_t j = 0; j < t.points.size(); ++j) {
        const auto& tp = t.points[j];
        auto bad = [&](double d) { rep.violations.push_back({"tyurin_data", static_cast<int>(j), tp.gamma, -1, -1, d}); };
        if (tp.alpha.size() != l) bad(1.0);
        else if (std::abs(tp.alpha(l - 1) - 1.0) > 1e-12) bad(std::abs(tp.alpha(l - 1) - 1.0));
        if (!tp.gamma.is_finite() || !c->on_curve(tp.gamma, 1e-8)) bad(1.0);
        if (K.multiplicity(tp.gamma) != 0) bad(1.0);
        for (size_t k = 0; k < j; ++k)
            if (t.points[k].gamma.same(tp.gamma)) bad(0.0);
    }
    if (!rep.ok()) return rep;

    // Pole structure of every entry.
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) {
            const FFElement& e = m(i, k);
            if (e.is_zero()) continue;
            std::vector<Place> places;
            for (auto [r, mult] : e.d().root_clusters())
                for (const Place& p : c->places_over(r)) places.push_back(p);
            for (const Place& p : c->infinite_places()) places.push_back(p);
            for (const Place& p : places) {
                int jt = tyurin_index(t, p);
                int allowed = jt >= 0 ? 1 : std::max(0, K.multiplicity(p));
                LaurentSeries s = expand(e, p, 1);
                double scale = std::max(1.0, s.max_abs());
                double defect = 0.0;
                for (int q = s.val(); q < -allowed; ++q) defect = std::max(defect, std::abs(s[q]));
                if (defect > tol * scale) {
                    std::string clause = jt >= 0 ? "simple_pole" : (K.multiplicity(p) > 0 ? "pole_order_K" : "stray_pole");
                    rep.violations.push_back({clause, jt, p, i, k, defect});
                }
            }
        }

    KricheverLax L;
    L.matrix = m;
    L.tyurin = t;
    L.K = K;
    for (size_t j = 0; j < t.points.size(); ++j) {
        const auto& tp = t.points[j];
        auto co = m.laurent(tp.gamma, -1, 0);
        const CMat& R = co[0];
        const CMat& L0 = co[1];
        double scale = std::max({1.0, R.norm(), L0.norm()});
        int jj = static_cast<int>(j);
        Eigen::JacobiSVD<CMat> svd(R);
        auto sv = svd.singularValues();
        if (sv(0) > tol * scale && l > 1 && sv(1) / sv(0) > tol) rep.violations.push_back({"rank", jj, tp.gamma, -1, -1, sv(1) / sv(0)});
        if (std::abs(R.trace()) > tol * scale) rep.violations.push_back({"trace", jj, tp.gamma, -1, -1, std::abs(R.trace())});
        CVec beta = R.col(l - 1);
        double dir = (R - beta * tp.alpha.transpose()).norm();
        if (dir > tol * scale) rep.violations.push_back({"residue_direction", jj, tp.gamma, -1, -1, dir});
        Eigen::RowVectorXcd aL = tp.alpha.transpose() * L0;
        cplx kappa = aL(l - 1);
        double eig = (aL - kappa * tp.alpha.transpose()).norm();
        if (eig > tol * scale) rep.violations.push_back({"eigen", jj, tp.gamma, -1, -1, eig});
        L.beta.push_back(beta);
        L.kappa.push_back(kappa);
        L.L_m1.push_back(R);
        L.L_0.push_back(L0);
    }
    if (rep.ok()) rep.lax = std::move(L);
    return rep;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct TyurinSystem {
    std::vector<FFElement> basis;
    std::vector<std::vector<cplx>> res, c0;  // [j][n]
};

TyurinSystem tyurin_system(const CurvePtr& c, const Divisor& K, const std::vector<Place>& gamma) {
    TyurinSystem s;
    Divisor D = K;
    for (const auto& g : gamma) D.add(g, 1);
    s.basis = rr_basis(c, D);
    for (const auto& g : gamma) {
        std::vector<cplx> r, z;
        for (const auto& b : s.basis) {
            auto co = laurent_expand(b, g, -1, 0);
            r.push_back(co[0]);
            z.push_back(co[1]);
        }
        s.res.push_back(std::move(r));
        s.c0.push_back(std::move(z));
    }
    return s;
}

MatrixFunc assemble(const CurvePtr& c, int l, const std::vector<FFElement>& basis, const Eigen::VectorXcd& x) {
    const int N = static_cast<int>(basis.size());
    MatrixFunc m = MatrixFunc::zero(c, l);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) {
            FFElement acc = FFElement::zero(c);
            for (int n = 0; n < N; ++n) {
                cplx v = x((i * l + k) * N + n);
                if (std::abs(v) < 1e-15) continue;
                acc = acc + basis[static_cast<size_t>(n)] * v;
            }
            m(i, k) = acc;
        }
    return m;
}

}  // namespace

KricheverLax construct_lax(const CurvePtr& c, const Divisor& K, const KricheverTyurinParams& p, double rank_tol) {
    if (p.gamma.empty() || p.alpha.size() != p.gamma.size() || p.beta.size() != p.gamma.size() || p.kappa.size() != p.gamma.size())
        throw Error(Errc::InvalidArgument, "construct_lax: inconsistent parameter lengths");
    const int l = static_cast<int>(p.alpha[0].size());
    const int J = static_cast<int>(p.gamma.size());
    TyurinSystem s = tyurin_system(c, K, p.gamma);
    const int N = static_cast<int>(s.basis.size());
    const int cols = l * l * N;
    const int rows = J * (l * l + l);
    CMat A = CMat::Zero(rows, cols);
    CVec b = CVec::Zero(rows);
    int r = 0;
    for (int j = 0; j < J; ++j) {
        const CVec& al = p.alpha[static_cast<size_t>(j)];
        const CVec& be = p.beta[static_cast<size_t>(j)];
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k, ++r) {
                for (int n = 0; n < N; ++n) A(r, (i * l + k) * N + n) = s.res[static_cast<size_t>(j)][static_cast<size_t>(n)];
                b(r) = be(i) * al(k);
            }
        for (int k = 0; k < l; ++k, ++r) {
            for (int i = 0; i < l; ++i)
                for (int n = 0; n < N; ++n) A(r, (i * l + k) * N + n) = al(i) * s.c0[static_cast<size_t>(j)][static_cast<size_t>(n)];
            b(r) = p.kappa[static_cast<size_t>(j)] * al(k);
        }
    }
    int rank = numerical_rank(A, rank_tol);
    if (rank < cols) {
        std::ostringstream os;
        os << "construct_lax: rank deficiency " << (cols - rank) << " of " << cols;
        throw Error(Errc::NonGenericParameters, os.str());
    }
    auto sol = lstsq(A, b);
    if (sol.rel_residual > 1e-8) {
        std::ostringstream os;
        os << "construct_lax: parameters violate the residue constraints (relative residual " << sol.rel_residual << ")";
        throw Error(Errc::NonGenericParameters, os.str());
    }
    TyurinData t;
    for (int j = 0; j < J; ++j) t.points.push_back({p.gamma[static_cast<size_t>(j)], p.alpha[static_cast<size_t>(j)]});
    auto rep = validate_lax(assemble(c, l, s.basis, sol.x), t, K, 1e-7);
    if (!rep.ok()) {
        std::ostringstream os;
        os << "construct_lax: output fails validation (" << rep.violations.front().clause << ", defect " << rep.violations.front().defect << ")";
        throw Error(Errc::NonGenericParameters, os.str());
    }
    return *rep.lax;
}

KricheverTyurinParams sample_params(const CurvePtr& c, const Divisor& K, int l, std::mt19937_64& rng, int* fiber_dim) {
    if (c->is_rational()) throw Error(Errc::UnsupportedRegime, "sample_params needs a hyperelliptic base");
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::normal_distribution<double> G(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    const int J = l * c->genus();
    KricheverTyurinParams p;
    std::vector<cplx> xs;
    while (static_cast<int>(xs.size()) < J) {
        cplx x0(U(rng), U(rng));
        if (std::abs(c->f()(x0)) < 0.2) continue;
        bool near = false;
        for (cplx q : xs) near = near || std::abs(q - x0) < 0.25;
        if (near) continue;
        xs.push_back(x0);
        auto pl = c->places_over(x0);
        p.gamma.push_back(pl[coin(rng) ? 1 : 0]);
        CVec a(l);
        for (int i = 0; i < l - 1; ++i) a(i) = cplx(G(rng), G(rng));
        a(l - 1) = 1.0;
        p.alpha.push_back(a);
    }
    TyurinSystem s = tyurin_system(c, K, p.gamma);
    const int N = static_cast<int>(s.basis.size());
    const int nm = l * l * N;
    const int cols = nm + J * l + J;  // matrix coefficients, beta_j, kappa_j
    const int rows = J * (l * l + l + 1);
    CMat A = CMat::Zero(rows, cols);
    int r = 0;
    for (int j = 0; j < J; ++j) {
        const CVec& al = p.alpha[static_cast<size_t>(j)];
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k, ++r) {
                for (int n = 0; n < N; ++n) A(r, (i * l + k) * N + n) = s.res[static_cast<size_t>(j)][static_cast<size_t>(n)];
                A(r, nm + j * l + i) = -al(k);
            }
        for (int k = 0; k < l; ++k, ++r) {
            for (int i = 0; i < l; ++i)
                for (int n = 0; n < N; ++n) A(r, (i * l + k) * N + n) = al(i) * s.c0[static_cast<size_t>(j)][static_cast<size_t>(n)];
            A(r, nm + J * l + j) = -al(k);
        }
        for (int i = 0; i < l; ++i) A(r, nm + j * l + i) = al(i);
        ++r;
    }
    CMat Nsp = nullspace(A, 1e-10);
    if (fiber_dim) *fiber_dim = static_cast<int>(Nsp.cols());
    if (Nsp.cols() == 0) throw Error(Errc::NonGenericParameters, "sample_params: no consistent parameters for these Tyurin points");
    CVec coef(Nsp.cols());
    for (Eigen::Index q = 0; q < coef.size(); ++q) coef(q) = cplx(G(rng), G(rng));
    CVec v = Nsp * coef;
    double bn = v.segment(nm, J * l).norm();
    if (bn < 1e-12) throw Error(Errc::NonGenericParameters, "sample_params: degenerate residues");
    v *= std::sqrt(static_cast<double>(J)) / bn;
    for (int j = 0; j < J; ++j) {
        p.beta.push_back(v.segment(nm + j * l, l));
        p.kappa.push_back(v(nm + J * l + j));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Invariants and gauge

std::vector<FFElement> char_poly(const MatrixFunc& L) {
    const int l = L.size();
    const CurvePtr& c = L.curve();
    // Faddeev-LeVerrier.
    std::vector<FFElement> cc(static_cast<size_t>(l + 1), FFElement::zero(c));
    cc[static_cast<size_t>(l)] = FFElement::constant(c, 1.0);
    MatrixFunc Mk = MatrixFunc::zero(c, l);
    MatrixFunc I = MatrixFunc::identity(c, l);
    for (int k = 1; k <= l; ++k) {
        Mk = L * Mk + I * cc[static_cast<size_t>(l - k + 1)];
        cc[static_cast<size_t>(l - k)] = (L * Mk).trace() * cplx(-1.0 / k);
    }
    std::vector<FFElement> h;
    for (int k = 1; k <= l; ++k) h.push_back(cc[static_cast<size_t>(l - k)]);
    return h;
}

namespace {

// Laurent tails (orders -l..-1) of h_1..h_l at p, computed from the entry expansions by power
// sums and Newton's identities, independently of the function-field representation of h_d.
std::vector<LaurentTail> char_poly_tails(const MatrixFunc& M, const Place& p) {
    const int l = M.size();
    const int hi = 2 * l + 2;
    auto co = M.laurent(p, -1, hi);
    using Mat = std::vector<LaurentSeries>;
    auto entry = [&](int i, int j) {
        std::vector<cplx> v;
        for (const auto& A : co) v.push_back(A(i, j));
        return LaurentSeries(-1, std::move(v));
    };
    Mat A(static_cast<size_t>(l * l)), P;
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) A[static_cast<size_t>(i * l + j)] = entry(i, j);
    auto mul = [&](const Mat& X, const Mat& Y) {
        Mat Z(static_cast<size_t>(l * l));
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) {
                LaurentSeries acc = X[static_cast<size_t>(i * l)] * Y[static_cast<size_t>(j)];
                for (int k = 1; k < l; ++k) acc = acc + X[static_cast<size_t>(i * l + k)] * Y[static_cast<size_t>(k * l + j)];
                Z[static_cast<size_t>(i * l + j)] = acc;
            }
        return Z;
    };
    std::vector<LaurentSeries> psum;  // tr L^k, k = 1..l
    P = A;
    for (int k = 1; k <= l; ++k) {
        LaurentSeries tr = P[0];
        for (int i = 1; i < l; ++i) tr = tr + P[static_cast<size_t>(i * l + i)];
        psum.push_back(tr);
        if (k < l) P = mul(P, A);
    }
    // k e_k = sum_{i=1}^k (-1)^(i-1) e_(k-i) p_i; h_k = (-1)^k e_k.
    std::vector<LaurentSeries> e{LaurentSeries::constant(1.0, hi)};
    std::vector<LaurentTail> out;
    for (int k = 1; k <= l; ++k) {
        LaurentSeries acc = e[static_cast<size_t>(k - 1)] * psum[0];
        for (int i = 2; i <= k; ++i) acc = acc + e[static_cast<size_t>(k - i)] * psum[static_cast<size_t>(i - 1)] * cplx(i % 2 == 1 ? 1.0 : -1.0);
        e.push_back(acc * cplx(1.0 / k));
        LaurentSeries h = e.back() * cplx(k % 2 == 0 ? 1.0 : -1.0);
        if (h.prec() < 0) throw Error(Errc::IllConditioned, "hitchin tails: insufficient series precision");
        LaurentTail t;
        t.place = p;
        t.order_bound = l;
        for (int j = 1; j <= l; ++j) t.coeffs.push_back(h[-j]);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

HitchinInvariants hitchin_invariants(const KricheverLax& L) {
    HitchinInvariants hi;
    hi.h = char_poly(L.matrix);
    hi.tails.assign(hi.h.size(), {});
    for (const auto& tp : L.tyurin.points) {
        auto t = char_poly_tails(L.matrix, tp.gamma);
        for (size_t d = 0; d < t.size(); ++d) {
            for (cplx v : t[d].coeffs) hi.max_tail = std::max(hi.max_tail, std::abs(v));
            hi.tails[d].push_back(std::move(t[d]));
        }
    }
    return hi;
}

KricheverLax gauge_transform(const KricheverLax& L, const CMat& W0) {
    const int l = L.size();
    cplx det = W0.determinant();
    if (std::abs(det) < 1e-14) throw Error(Errc::InvalidArgument, "gauge_transform: singular W");
    CMat W = W0 / std::pow(det, 1.0 / l);
    CMat Wi = W.inverse();
    KricheverLax out = L;
    out.matrix = L.matrix.conjugated(W);
    for (size_t j = 0; j < L.tyurin.points.size(); ++j) {
        Eigen::RowVectorXcd aW = L.tyurin.points[j].alpha.transpose() * W;
        cplx last = aW(l - 1);
        if (std::abs(last) < 1e-12 * aW.norm()) {
            std::ostringstream os;
            os << "gauge_transform: alpha_" << j << " W has vanishing last coordinate";
            throw Error(Errc::RenormalizationFailure, os.str());
        }
        out.tyurin.points[j].alpha = (aW / last).transpose();
        out.beta[j] = last * (Wi * L.beta[j]);
        out.L_m1[j] = Wi * L.L_m1[j] * W;
        out.L_0[j] = Wi * L.L_0[j] * W;
    }
    return out;
}

ExpectedDims expected_dims(int l, int g) {
    ExpectedDims d;
    d.dimLK = l * l * (2 * g - 1);
    d.spectralGenus = l * l * (g - 1) + 1;
    d.eigenDivisorDegree = d.spectralGenus + l - 1;
    d.dimCotangent = 2 * d.spectralGenus;
    return d;
}

KricheverLax polynomial_lax(const CurvePtr& c, const std::vector<CMat>& coeffs) {
    KricheverLax L;
    L.matrix = MatrixFunc::polynomial(c, coeffs);
    int deg = static_cast<int>(coeffs.size()) - 1;
    int ord = c->x_pole_order_at_infinity() * deg;
    for (const auto& p : c->infinite_places()) L.K.add(p, ord);
    return L;
}

KricheverLax mumford_lax(const Poly& u, const Poly& v, const Poly& w) {
    int deg = std::max({u.degree(), v.degree(), w.degree(), 0});
    std::vector<CMat> co(static_cast<size_t>(deg + 1), CMat::Zero(2, 2));
    for (int k = 0; k <= deg; ++k) {
        co[static_cast<size_t>(k)](0, 0) = v.coeff(k);
        co[static_cast<size_t>(k)](1, 1) = -v.coeff(k);
        co[static_cast<size_t>(k)](0, 1) = w.coeff(k);
        co[static_cast<size_t>(k)](1, 0) = u.coeff(k);
    }
    return polynomial_lax(BaseCurve::rational_line(), co);
}

KricheverLax mumford_benchmark() { return mumford_lax(Poly{-1.0, 0.0, 1.0}, Poly{}, Poly{0.0, 1.0}); }

}  // namespace laxflow
