#include "laxflow/residue.hpp"

#include "laxflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laxflow {

namespace {

FFElement lift(const HyperellipticModel& m, const FFElement& e) {
    if (!e.b().is_zero()) throw Error(Errc::UnsupportedRegime, "entries must be rational functions of z");
    return FFElement::make(m.curve, e.a(), Poly{}, e.d());
}

FFElement mu_of(const HyperellipticModel& m) { return FFElement::y(m.curve) - FFElement::poly(m.curve, m.h1 * cplx(0.5)); }

void check_rational_l2(const KricheverLax& L) {
    if (L.size() != 2 || !L.curve()->is_rational()) throw Error(Errc::UnsupportedRegime, "residue sections need l = 2 over the rational line");
}

struct Lambdas {
    FFElement lam[2];
    FFElement psi[2];
};

Lambdas lambdas(const KricheverLax& L, const MatrixFunc& M, const HyperellipticModel& m) {
    Lambdas out;
    out.psi[0] = lift(m, L.matrix(1, 0));
    out.psi[1] = mu_of(m) - lift(m, L.matrix(0, 0));
    for (int k = 0; k < 2; ++k) {
        if (out.psi[k].is_zero()) continue;
        FFElement num = out.psi[0] * lift(m, M(0, k)) + out.psi[1] * lift(m, M(1, k));
        out.lam[k] = num / out.psi[k];
    }
    return out;
}

// Tails at the support with per-place orders max(n, observed over the given lambdas).
ResidueSection tails_at(const Lambdas& A, const Lambdas* Bopt, const std::vector<Place>& support, int n, double t) {
    ResidueSection r;
    r.n = n;
    r.t = t;
    for (const Place& p : support) {
        auto pick = [&](const Lambdas& X) {
            int k = 0;
            if (X.psi[0].is_zero()) k = 1;
            else if (!X.psi[1].is_zero() && valuation(X.psi[1], p) < valuation(X.psi[0], p)) k = 1;
            return k;
        };
        int ka = pick(A);
        int ord = std::max(n, -valuation(A.lam[ka], p));
        int kb = Bopt ? pick(*Bopt) : 0;
        if (Bopt) ord = std::max(ord, -valuation(Bopt->lam[kb], p));
        LaurentTail tl = tail_of(A.lam[ka], p, ord);
        // Cross-check with the other component.
        const int ko = 1 - ka;
        if (!A.psi[ko].is_zero()) {
            LaurentTail other = tail_of(A.lam[ko], p, ord);
            double diff = 0.0, nrm = 1.0;
            for (size_t i = 0; i < tl.coeffs.size(); ++i) {
                diff = std::max(diff, std::abs(tl.coeffs[i] - other.coeffs[i]));
                nrm = std::max(nrm, std::abs(tl.coeffs[i]));
            }
            if (diff > 1e-8 * nrm) {
                std::ostringstream os;
                os << "lambda tails of the two eigenvector components disagree at x = " << p.x << " (" << diff / nrm << ")";
                throw Error(Errc::NonGenericPoint, os.str());
            }
        }
        r.tails.push_back(std::move(tl));
    }
    return r;
}

}  // namespace

CVec ResidueSection::flat() const {
    std::vector<cplx> v;
    for (const auto& tl : tails) v.insert(v.end(), tl.coeffs.begin(), tl.coeffs.end());
    return Eigen::Map<const CVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Place> tail_support(const HyperellipticModel& m, const MatrixFunc& M) {
    bool at_inf = false;
    std::vector<cplx> xs;
    for (int i = 0; i < M.size(); ++i)
        for (int j = 0; j < M.size(); ++j) {
            const FFElement& e = M(i, j);
            if (e.is_zero()) continue;
            if (e.a().degree() > e.d().degree()) at_inf = true;
            for (auto [r, mult] : e.d().root_clusters()) {
                bool seen = false;
                for (cplx x : xs) seen = seen || std::abs(x - r) < 1e-9;
                if (!seen) xs.push_back(r);
            }
        }
    std::vector<Place> out;
    if (at_inf)
        for (const Place& p : m.curve->infinite_places()) out.push_back(p);
    std::sort(xs.begin(), xs.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    for (cplx x : xs)
        for (const Place& p : m.curve->places_over(x)) out.push_back(p);
    return out;
}

FFElement lambda_function(const KricheverLax& L, const MatrixFunc& M, const HyperellipticModel& m, int k) {
    check_rational_l2(L);
    auto A = lambdas(L, M, m);
    if (A.psi[k].is_zero()) throw Error(Errc::NonGenericPoint, "eigenvector component vanishes identically");
    return A.lam[k];
}

ResidueSection lambda_tails(const KricheverLax& L, const MatrixFunc& M, const HyperellipticModel& m, int n, double t) {
    check_rational_l2(L);
    return tails_at(lambdas(L, M, m), nullptr, tail_support(m, M), n, t);
}

ResidueSection section_of(const FFElement& f, const ResidueSection& like) {
    ResidueSection r;
    r.n = like.n;
    r.t = like.t;
    for (const auto& tl : like.tails) r.tails.push_back(tail_of(f, tl.place, tl.order_bound));
    return r;
}

TangentVector connecting_map(const ResidueSection& r, const HyperellipticModel& m) {
    TangentVector v;
    v.components = CVec::Zero(m.genus);
    for (int j = 0; j < m.genus; ++j) {
        // omega_j = z^j dz / nu = (nu z^j / Q) dz.
        FFElement e = FFElement::make(m.curve, Poly{}, Poly::monomial(j), m.Q);
        cplx acc = 0.0;
        for (const auto& tl : r.tails) {
            const int N = tl.order_bound;
            if (N == 0) continue;
            LaurentSeries es = expand(e, tl.place, N + 8);
            LaurentSeries dx = m.curve->chart(tl.place, N + 16).x.derivative();
            LaurentSeries w = es * dx;
            for (int k = 1; k <= N; ++k) acc += tl.coeffs[static_cast<size_t>(k - 1)] * w[k - 1];
        }
        v.components(j) = acc;
    }
    return v;
}

CMat global_tail_span(const ResidueSection& like, const HyperellipticModel& m) {
    Divisor D;
    for (const auto& tl : like.tails) D.add(tl.place, tl.order_bound);
    auto B = rr_basis(m.curve, D);
    const auto rows = like.flat().size();
    CMat G(rows, static_cast<Eigen::Index>(B.size()));
    for (size_t c = 0; c < B.size(); ++c) G.col(static_cast<Eigen::Index>(c)) = section_of(B[c], like).flat();
    return G;
}

namespace {

// Relative distance of v from the column span of G.
double span_residual(const CMat& G, const CVec& v, double scale) {
    if (v.norm() == 0.0) return 0.0;
    if (G.cols() == 0) return v.norm() / scale;
    auto sol = lstsq(G, v);
    return sol.residual / scale;
}

}  // namespace

Verdict constancy_test(const ResidueSection& r, const HyperellipticModel& m, double tol) {
    Verdict v;
    CVec f = r.flat();
    v.residual = f.norm() < 1e-14 ? 0.0 : span_residual(global_tail_span(r, m), f, f.norm());
    v.ok = v.residual < tol;
    return v;
}

Verdict linearity_test(const std::vector<ResidueSection>& s, const HyperellipticModel& m, double tol) {
    if (s.size() < 3) throw Error(Errc::InvalidArgument, "linearity_test needs at least 3 samples");
    for (const auto& r : s) {
        bool same = r.tails.size() == s[0].tails.size();
        for (size_t i = 0; same && i < r.tails.size(); ++i)
            same = r.tails[i].place.same(s[0].tails[i].place) && r.tails[i].order_bound == s[0].tails[i].order_bound;
        if (!same) throw Error(Errc::SupportMismatch, "samples have different tail supports or orders");
    }
    CMat G = global_tail_span(s[0], m);
    Verdict v;
    for (size_t i = 1; i + 1 < s.size(); ++i) {
        double h = 0.5 * (s[i + 1].t - s[i - 1].t);
        CVec d = (s[i + 1].flat() - s[i - 1].flat()) / (2.0 * h);
        CVec rho = s[i].flat();
        CMat S(G.rows(), G.cols() + 1);
        S << G, rho;
        double res = span_residual(S, d, std::max(1.0, rho.norm()));
        v.profile.push_back(res);
        v.residual = std::max(v.residual, res);
    }
    v.ok = v.residual < tol;
    return v;
}

Verdict gauge_equivalence(const KricheverLax& L, const MatrixFunc& M, const CMat& W0, int n, double tol) {
    check_rational_l2(L);
    CMat W = W0 / std::sqrt(W0.determinant());
    auto m = hyperelliptic_model(spectral_curve(L));
    KricheverLax LW = L;
    LW.matrix = L.matrix.conjugated(W);
    MatrixFunc MW = M.conjugated(W);
    auto A = lambdas(L, M, m), B = lambdas(LW, MW, m);
    auto sup = tail_support(m, M);
    auto r1 = tails_at(A, &B, sup, n, 0.0), r2 = tails_at(B, &A, sup, n, 0.0);
    Verdict v;
    v.residual = (r1.flat() - r2.flat()).norm() / std::max(1.0, r1.flat().norm());
    v.ok = v.residual < tol;
    return v;
}

Verdict qshift_equivalence(const KricheverLax& L, const MatrixFunc& M, const MatrixFunc& Q, int n, double tol) {
    check_rational_l2(L);
    const CurvePtr& c = L.curve();
    for (cplx x0 : {cplx(0.37, 0.21), cplx(-0.83, 0.45), cplx(1.21, -0.66)}) {
        Place p = c->places_over(x0)[0];
        CMat Lp = L.matrix.value_at(p), Qp = Q.value_at(p);
        if ((Qp * Lp - Lp * Qp).norm() > 1e-10 * std::max(1.0, Qp.norm() * Lp.norm()))
            throw Error(Errc::PreconditionViolation, "Q does not commute with L");
    }
    auto m = hyperelliptic_model(spectral_curve(L));
    MatrixFunc MQ = M + Q;
    auto A = lambdas(L, M, m), B = lambdas(L, MQ, m);
    auto sup = tail_support(m, MQ);
    for (const Place& p : tail_support(m, M)) {
        bool in = false;
        for (const Place& q : sup) in = in || q.same(p);
        if (!in) sup.push_back(p);
    }
    auto r1 = tails_at(A, &B, sup, n, 0.0), r2 = tails_at(B, &A, sup, n, 0.0);
    Verdict v;
    CVec d = r2.flat() - r1.flat();
    v.residual = span_residual(global_tail_span(r1, m), d, std::max(1.0, r1.flat().norm()));
    v.ok = v.residual < tol;
    return v;
}

}  // namespace laxflow
