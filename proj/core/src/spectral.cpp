#include "laxflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laxflow {

namespace {

FFElement discriminant_of(const std::vector<FFElement>& h, const CurvePtr& c) {
    const int l = static_cast<int>(h.size());
    if (l == 1) return FFElement::constant(c, 1.0);
    if (l == 2) return h[0] * h[0] - h[1] * cplx(4.0);
    if (l == 3) {
        const FFElement &a = h[0], &b = h[1], &cc = h[2];
        return a * a * b * b - b * b * b * cplx(4.0) - a * a * a * cc * cplx(4.0) - cc * cc * cplx(27.0) + a * b * cc * cplx(18.0);
    }
    throw Error(Errc::UnsupportedRegime, "discriminant implemented for l <= 3");
}

double min_separation(const std::vector<cplx>& r) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = i + 1; j < r.size(); ++j) m = std::min(m, std::abs(r[i] - r[j]));
    return m;
}

double max_abs(const std::vector<cplx>& r) {
    double m = 1.0;
    for (cplx z : r) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

Poly fiber_poly(const SpectralCurve& S, const Place& p) {
    std::vector<cplx> c(static_cast<size_t>(S.l + 1), cplx{});
    c[static_cast<size_t>(S.l)] = 1.0;
    for (int d = 1; d <= S.l; ++d) c[static_cast<size_t>(S.l - d)] = S.h[static_cast<size_t>(d - 1)].value_at(p);
    return Poly(c);
}

SpectralCurve spectral_curve(const KricheverLax& L) {
    SpectralCurve S;
    S.base = L.curve();
    S.l = L.size();
    S.h = char_poly(L.matrix);
    S.discriminant = discriminant_of(S.h, S.base);
    const FFElement& D = S.discriminant;
    double scale = 1.0;
    for (const auto& e : S.h) scale = std::max({scale, e.a().norm_inf(), e.b().norm_inf()});
    if (D.is_zero() || std::max(D.a().norm_inf(), D.b().norm_inf()) < 1e-12 * std::pow(scale, 2 * (S.l - 1)))
        throw Error(Errc::NonReduced, "characteristic polynomial has a repeated factor (vanishing discriminant)");
    if (S.l >= 2) {
        Divisor dd = divisor_of(D);
        for (const auto& [p, m] : dd.terms()) {
            if (m > 0) S.branch.add(p, m);
            else if (S.l == 2 && (-m) % 2 == 1) S.branch.add(p, 1);
        }
        if (S.branch.empty()) throw Error(Errc::NonReduced, "spectral curve has no branching and splits into sheets");
    }
    S.genus = spectral_genus(S);

    // Reference fiber: the candidate with the best separated roots.
    const cplx cands[] = {{0.3711, 0.2093}, {-0.4127, 0.6619}, {0.8123, -0.3317}, {-0.1931, -0.7071}, {1.2345, 0.5432}};
    double best = -1.0;
    for (cplx x0 : cands) {
        Place p = S.base->places_over(x0)[0];
        if (p.chart != Place::Chart::FiniteRegular) continue;
        bool pole = false;
        for (const auto& h : S.h) pole = pole || std::abs(h.d()(x0)) < 1e-6;
        if (pole) continue;
        auto r = fiber_poly(S, p).roots();
        double sep = min_separation(r) / max_abs(r);
        if (sep > best) {
            best = sep;
            S.ref_place = p;
            S.ref_mu = r;
        }
    }
    return S;
}

int spectral_genus(const SpectralCurve& S) {
    int deg = 0;
    for (const auto& [p, m] : S.branch.terms()) {
        if (m != 1) {
            std::ostringstream os;
            os << "discriminant zero of order " << m << " at x = " << p.x;
            throw Error(Errc::NonSimpleRamification, os.str());
        }
        deg += m;
    }
    if (deg % 2 != 0) throw Error(Errc::NonSimpleRamification, "odd total branching");
    return S.l * (S.base->genus() - 1) + 1 + deg / 2;
}

std::vector<SpectralPoint> lift_fiber(const SpectralCurve& S, const Place& p, double tol) {
    if (!p.is_finite()) throw Error(Errc::InvalidArgument, "lift_fiber needs a finite place");
    auto roots = fiber_poly(S, p).roots();
    double scale = max_abs(roots);
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < tol * scale) {
                std::ostringstream os;
                os << "fiber over x = " << p.x << " is near a branch point: mu = " << roots[i] << ", " << roots[j];
                throw Error(Errc::BranchProximity, os.str());
            }
    std::vector<SpectralPoint> out;
    if (!S.base->is_rational() || S.ref_mu.empty()) {
        for (size_t k = 0; k < roots.size(); ++k) out.push_back({p, roots[k], static_cast<int>(k)});
        return out;
    }
    // Continue the reference fiber along the straight segment.
    std::vector<cplx> cur = S.ref_mu;
    const int steps = 256;
    for (int s = 1; s <= steps; ++s) {
        cplx x = S.ref_place.x + (p.x - S.ref_place.x) * (static_cast<double>(s) / steps);
        auto r = s == steps ? roots : fiber_poly(S, Place::regular(x)).roots();
        std::vector<cplx> next(cur.size());
        std::vector<bool> used(r.size(), false);
        for (size_t k = 0; k < cur.size(); ++k) {
            size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (size_t q = 0; q < r.size(); ++q)
                if (!used[q] && std::abs(r[q] - cur[k]) < bd) {
                    bd = std::abs(r[q] - cur[k]);
                    best = q;
                }
            used[best] = true;
            next[k] = r[best];
        }
        cur = std::move(next);
    }
    for (size_t k = 0; k < cur.size(); ++k) out.push_back({p, cur[k], static_cast<int>(k)});
    return out;
}

EigenVector left_eigenvector(const KricheverLax& L, const SpectralPoint& pt, EigenNorm norm) {
    const int l = L.size();
    CMat Lp = L.matrix.value_at(pt.base);
    CMat A = Lp - pt.mu * CMat::Identity(l, l);
    CVec psi(l);
    double scale = std::max(1.0, Lp.norm());
    if (l == 2) {
        psi(0) = Lp(1, 0);
        psi(1) = pt.mu - Lp(0, 0);
        if (psi.norm() <= 1e-12 * scale || norm == EigenNorm::LastCoordinateOne) {
            // The adjugate row vanishes on the eigenvector divisor; fall back to the other row.
            CVec alt(2);
            alt(0) = pt.mu - Lp(1, 1);
            alt(1) = Lp(0, 1);
            if (psi.norm() <= 1e-12 * scale) {
                if (norm == EigenNorm::AdjugateRow) {
                    std::ostringstream os;
                    os << "adjugate row vanishes at (x, mu) = (" << pt.base.x << ", " << pt.mu << ")";
                    throw Error(Errc::RenormalizationFailure, os.str());
                }
                psi = alt;
            }
        }
    } else {
        Eigen::JacobiSVD<CMat> svd(A.transpose(), Eigen::ComputeFullV);
        auto sv = svd.singularValues();
        if (sv(l - 2) < 1e-8 * std::max(sv(0), 1e-300)) throw Error(Errc::IllConditioned, "eigenvalue collision: left nullspace not one-dimensional");
        psi = svd.matrixV().col(l - 1);
    }
    if (norm == EigenNorm::LastCoordinateOne) {
        if (std::abs(psi(l - 1)) < 1e-12 * psi.norm()) {
            std::ostringstream os;
            os << "last coordinate of psi vanishes at (x, mu) = (" << pt.base.x << ", " << pt.mu << ")";
            throw Error(Errc::RenormalizationFailure, os.str());
        }
        psi /= psi(l - 1);
    }
    return {pt, psi, norm};
}

double eigen_residual(const KricheverLax& L, const EigenVector& v) {
    const int l = L.size();
    CMat Lp = L.matrix.value_at(v.point.base);
    Eigen::RowVectorXcd r = v.psi.transpose() * (Lp - v.point.mu * CMat::Identity(l, l));
    return r.norm() / (std::max(Lp.norm(), 1e-300) * v.psi.norm());
}

EigenDivisor eigen_divisor(const KricheverLax& L, const SpectralCurve& S) {
    if (L.size() != 2) throw Error(Errc::UnsupportedRegime, "eigen_divisor implemented for l = 2");
    const FFElement& u = L.matrix(1, 0);
    if (u.is_zero()) throw Error(Errc::NonGenericPoint, "L21 vanishes identically");
    EigenDivisor E;
    Divisor du = divisor_of(u);
    for (const auto& [p, m] : du.terms()) {
        if (m <= 0) continue;
        if (!p.is_finite()) {
            E.degenerate = true;
            E.note += "zero of L21 at infinity; ";
            continue;
        }
        cplx mu = L.matrix(0, 0).value_at(p);
        cplx disc = S.discriminant.value_at(p);
        double dscale = std::max(1.0, S.discriminant.a().magnitude_at(p.x));
        if (std::abs(disc) < 1e-8 * dscale) {
            E.degenerate = true;
            std::ostringstream os;
            os << "point over branch point x = " << p.x << "; ";
            E.note += os.str();
        }
        for (int k = 0; k < m; ++k) E.points.push_back({p, mu, -1});
    }
    E.degree = static_cast<int>(E.points.size());
    if (E.degree != S.genus + S.l - 1) {
        E.degenerate = true;
        E.note += "degree differs from genus + l - 1; ";
    }
    return E;
}

}  // namespace laxflow
