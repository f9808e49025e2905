#include "laxflow/jacobian.hpp"

#include "laxflow/residue.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laxflow {

namespace {

constexpr int kGaussPoints = 64;

struct GaussRule {
    std::vector<double> x, w;  // on [0, 1]
};

// Newton iteration on P_n from Chebyshev starting guesses.
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        const int n = kGaussPoints;
        GaussRule r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int k = 1; k <= n; ++k) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            double w = 2.0 / ((1.0 - z * z) * dp * dp);
            r.x[i] = 0.5 * (1.0 - z);
            r.x[n - 1 - i] = 0.5 * (1.0 + z);
            r.w[i] = r.w[n - 1 - i] = 0.5 * w;
        }
        return r;
    }();
    return rule;
}

std::vector<cplx> sorted_roots(const Poly& Q) {
    auto r = Q.roots();
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return r;
}

struct Piece {
    CVec I;
    cplx nu_end;
};

// int z^(j-1) dz / nu over z(tau) = a + (b - a) tau (regular) or a + (b - a) tau^2 (a a root of Q),
// nu continued from nu_a (regular) or from the principal branch at a.
Piece integrate_piece(const HyperellipticModel& m, cplx a, cplx b, bool singular_start, cplx nu_a, double tol) {
    const GaussRule& G = gauss_rule();
    const int g = m.genus;
    Poly R = singular_start ? m.Q.deflate(a) : m.Q;
    const cplx sba = std::sqrt(b - a);
    auto z_of = [&](double t) { return singular_start ? a + (b - a) * t * t : a + (b - a) * t; };
    cplx g0 = singular_start ? std::sqrt(R(a)) : nu_a;

    CVec prev;
    cplx end{};
    for (int panels = 1; panels <= 256; panels *= 2) {
        // Evaluation parameters: quadrature nodes interleaved with a tracking grid.
        std::vector<std::pair<double, int>> ts;  // (tau, node index or -1)
        for (int p = 0; p < panels; ++p)
            for (int i = 0; i < kGaussPoints; ++i) ts.push_back({(p + G.x[static_cast<size_t>(i)]) / panels, p * kGaussPoints + i});
        const int grid = 256 * panels;
        for (int k = 1; k <= grid; ++k) ts.push_back({static_cast<double>(k) / grid, -1});
        std::sort(ts.begin(), ts.end());
        std::vector<cplx> gv(static_cast<size_t>(panels * kGaussPoints));
        cplx cur = g0;
        for (const auto& [t, idx] : ts) {
            cplx s = std::sqrt(R(z_of(t)));
            if (std::abs(s + cur) < std::abs(s - cur)) s = -s;
            if (std::abs(s - cur) > 0.5 * std::max(std::abs(cur), std::abs(s)) && std::abs(cur) > 1e-8)
                throw Error(Errc::QuadratureFailure, "square-root continuation jumped: path too close to a branch point");
            cur = s;
            if (idx >= 0) gv[static_cast<size_t>(idx)] = s;
        }
        CVec I = CVec::Zero(g);
        for (int p = 0; p < panels; ++p)
            for (int i = 0; i < kGaussPoints; ++i) {
                double t = (p + G.x[static_cast<size_t>(i)]) / panels;
                double w = G.w[static_cast<size_t>(i)] / panels;
                cplx z = z_of(t), s = gv[static_cast<size_t>(p * kGaussPoints + i)];
                cplx f = singular_start ? 2.0 * sba / s : (b - a) / s;
                cplx zp = 1.0;
                for (int j = 0; j < g; ++j) {
                    I(j) += w * f * zp;
                    zp *= z;
                }
            }
        end = singular_start ? sba * cur : cur;
        if (prev.size() && (I - prev).norm() <= tol * std::max(1.0, I.norm())) return {I, end};
        prev = I;
    }
    throw Error(Errc::QuadratureFailure, "period quadrature did not stabilize");
}

bool is_branch(const HyperellipticModel& m, cplx z, double tol = 1e-10) {
    for (cplx e : m.branch)
        if (std::abs(e - z) <= tol * std::max(1.0, std::abs(e))) return true;
    return false;
}

// Branch point to branch point, split at the midpoint.
CVec branch_segment(const HyperellipticModel& m, cplx a, cplx b, double tol) {
    cplx c = 0.5 * (a + b);
    Piece p1 = integrate_piece(m, a, c, true, {}, tol);
    Piece p2 = integrate_piece(m, b, c, true, {}, tol);
    double s = std::abs(p2.nu_end - p1.nu_end) < std::abs(p2.nu_end + p1.nu_end) ? 1.0 : -1.0;
    // Reversing direction flips the sign of the second piece.
    return p1.I - s * p2.I;
}

}  // namespace

HyperellipticModel hyperelliptic_model(const Poly& Q, const Poly& h1) {
    HyperellipticModel m;
    m.Q = Q.trimmed();
    m.h1 = h1;
    for (auto [r, mult] : m.Q.root_clusters())
        if (mult > 1) {
            std::ostringstream os;
            os << "spectral curve is singular: repeated root of Q at z = " << r;
            throw Error(Errc::NonReduced, os.str());
        }
    if (m.Q.degree() < 3) throw Error(Errc::UnsupportedRegime, "spectral curve of genus 0");
    m.curve = BaseCurve::hyperelliptic(m.Q);
    m.branch = sorted_roots(m.Q);
    m.genus = (m.Q.degree() - 1) / 2;
    return m;
}

HyperellipticModel hyperelliptic_model(const SpectralCurve& S) {
    if (S.l != 2 || !S.base->is_rational()) throw Error(Errc::UnsupportedRegime, "hyperelliptic model needs l = 2 over the rational line");
    for (const auto& h : S.h)
        if (!h.is_polynomial_in_x()) throw Error(Errc::UnsupportedRegime, "hyperelliptic model needs polynomial invariants");
    Poly h1 = S.h[0].a(), h2 = S.h[1].a();
    return hyperelliptic_model(h1 * h1 * cplx(0.25) - h2, h1);
}

Place model_place(const HyperellipticModel& m, const SpectralPoint& p) {
    if (!p.base.is_finite()) throw Error(Errc::InvalidArgument, "model_place needs a finite point");
    cplx z = p.base.x;
    cplx nu = p.mu + 0.5 * m.h1(z);
    if (is_branch(m, z, 1e-9)) return m.curve->places_over(z)[0];
    return Place::regular(z, nu);
}

Eigen::MatrixXd PeriodData::lattice_real() const {
    const auto g = A.rows();
    Eigen::MatrixXd Lr(2 * g, 2 * g);
    for (Eigen::Index c = 0; c < 2 * g; ++c) {
        CVec col = c < g ? CVec(A.col(c)) : CVec(B.col(c - g));
        Lr.block(0, c, g, 1) = col.real();
        Lr.block(g, c, g, 1) = col.imag();
    }
    return Lr;
}

PeriodData periods(const HyperellipticModel& m, double tol) {
    const int g = m.genus;
    for (size_t i = 0; i < m.branch.size(); ++i)
        for (size_t j = i + 1; j < m.branch.size(); ++j)
            if (std::abs(m.branch[i] - m.branch[j]) < 1e-6) throw Error(Errc::IllConditioned, "branch points closer than 1e-6");
    PeriodData P;
    const int segs = 2 * g;
    const int all = static_cast<int>(m.branch.size()) - 1;
    P.halfPeriods = CMat(g, all);
    for (int s = 0; s < all; ++s) P.halfPeriods.col(s) = branch_segment(m, m.branch[static_cast<size_t>(s)], m.branch[static_cast<size_t>(s + 1)], tol);

    // a_k = loop over segment 2k-1, b_k = loops over segments 2k, 2k+2, ..., 2g (chain basis);
    // orientations fixed by the Riemann conditions.
    double best = std::numeric_limits<double>::infinity();
    const int combos = 1 << (segs + g);
    for (int mask = 0; mask < combos; ++mask) {
        auto eps = [&](int bit) { return (mask >> bit) & 1 ? -1.0 : 1.0; };
        CMat A(g, g), B = CMat::Zero(g, g);
        for (int k = 0; k < g; ++k) {
            A.col(k) = 2.0 * eps(2 * k) * P.halfPeriods.col(2 * k);
            for (int i = k; i < g; ++i) B.col(k) += 2.0 * eps(2 * i + 1) * P.halfPeriods.col(2 * i + 1);
            B.col(k) *= eps(segs + k);
        }
        CMat tau = A.fullPivLu().solve(B);
        double sym = (tau - tau.transpose()).norm() / std::max(1.0, tau.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (tau.imag() + tau.imag().transpose()));
        double mine = es.eigenvalues()(0);
        if (mine <= 0.0) continue;
        if (sym < best - 1e-12) {
            best = sym;
            P.A = A;
            P.B = B;
            P.tau = tau;
            P.symmetry_defect = sym;
            P.min_imag_eig = mine;
            P.signs.clear();
            for (int b = 0; b < segs + g; ++b) P.signs.push_back(static_cast<int>(eps(b)));
        }
    }
    if (P.tau.size() == 0 || P.symmetry_defect > 1e-8) {
        std::ostringstream os;
        os << "no cycle orientation satisfies the Riemann relations (best symmetry defect " << best << ")";
        throw Error(Errc::QuadratureFailure, os.str());
    }
    return P;
}

CVec abel_point(const HyperellipticModel& m, const Place& P, const PeriodData& per, double tol) {
    if (!P.is_finite()) throw Error(Errc::InvalidArgument, "abel_point needs a finite place");
    const cplx z = P.x;
    // Start from the nearest branch point e_k; int_{e_1}^{e_k} is a sum of half-periods modulo the lattice.
    size_t k = 0;
    for (size_t i = 1; i < m.branch.size(); ++i)
        if (std::abs(m.branch[i] - z) < std::abs(m.branch[k] - z)) k = i;
    CVec base = CVec::Zero(m.genus);
    for (size_t i = 0; i < k; ++i) base += per.halfPeriods.col(static_cast<Eigen::Index>(i));
    if (std::abs(z - m.branch[k]) < 1e-12 * std::max(1.0, std::abs(z))) return base;
    Piece p = integrate_piece(m, m.branch[k], z, true, {}, tol);
    // The lift ending on the sheet of P.
    double s = std::abs(p.nu_end + P.y) < std::abs(p.nu_end - P.y) ? -1.0 : 1.0;
    return base + s * p.I;
}

AbelImage abel_map(const HyperellipticModel& m, const std::vector<Place>& D, const PeriodData& P) {
    AbelImage out;
    out.raw = CVec::Zero(m.genus);
    for (const Place& p : D) out.raw += abel_point(m, p, P);
    const auto g = m.genus;
    Eigen::VectorXd v(2 * g);
    v << out.raw.real(), out.raw.imag();
    out.lattice = P.lattice_real().fullPivLu().solve(v);
    Eigen::VectorXd fl = out.lattice.array().floor();
    Eigen::VectorXd red = P.lattice_real() * (out.lattice - fl);
    out.reduced = red.head(g).cast<cplx>() + cplx(0.0, 1.0) * red.tail(g).cast<cplx>();
    return out;
}

std::vector<CVec> unwrap(const std::vector<CVec>& raw, const PeriodData& P) {
    std::vector<CVec> out;
    if (raw.empty()) return out;
    Eigen::MatrixXd Lr = P.lattice_real();
    auto lu = Lr.fullPivLu();
    const auto g = raw[0].size();
    out.push_back(raw[0]);
    for (size_t k = 1; k < raw.size(); ++k) {
        CVec d = raw[k] - out.back();
        Eigen::VectorXd v(2 * g);
        v << d.real(), d.imag();
        Eigen::VectorXd c = lu.solve(v);
        Eigen::VectorXd n = c.array().round();
        if ((c - n).cwiseAbs().maxCoeff() > 0.25) {
            std::ostringstream os;
            os << "Abel image moved " << (c - n).cwiseAbs().maxCoeff() << " lattice cells between samples " << k - 1 << " and " << k;
            throw Error(Errc::StepTooLarge, os.str());
        }
        Eigen::VectorXd shift = Lr * n;
        out.push_back(raw[k] - (shift.head(g).cast<cplx>() + cplx(0.0, 1.0) * shift.tail(g).cast<cplx>()));
    }
    return out;
}

JacobianLinearityReport jacobian_linearity(const Trajectory& tr, const HyperellipticModel& m, const PeriodData& P,
                                           const AnsatzSpec* a) {
    if (tr.samples.size() < 5) throw Error(Errc::InvalidArgument, "jacobian_linearity needs at least 5 samples");
    JacobianLinearityReport rep;
    std::vector<CVec> raw;
    for (const auto& s : tr.samples) {
        auto S = spectral_curve(s.L);
        auto E = eigen_divisor(s.L, S);
        std::vector<Place> D;
        for (const auto& pt : E.points) D.push_back(model_place(m, pt));
        raw.push_back(abel_map(m, D, P).raw);
        rep.t.push_back(s.t);
    }
    rep.images = unwrap(raw, P);
    const size_t N = rep.images.size();
    for (size_t i = 1; i + 1 < N; ++i) {
        double h = 0.5 * (rep.t[i + 1] - rep.t[i - 1]);
        CVec v = (rep.images[i + 1] - rep.images[i - 1]) / (2.0 * h);
        CVec d2 = (rep.images[i + 1] - 2.0 * rep.images[i] + rep.images[i - 1]) / (h * h);
        rep.velocity.push_back(v);
        rep.maxSecondDifference = std::max(rep.maxSecondDifference, d2.norm() / std::max(1.0, v.norm()));
        if (a) {
            const auto& L = tr.samples[i].L;
            MatrixFunc M = build_m(L, *a);
            int n = 0;
            for (const auto& e : a->entries) n = std::max(n, e.m + e.n);
            CVec r = connecting_map(lambda_tails(L, M, m, std::max(n, 1), tr.samples[i].t), m).components;
            rep.residuePairingVelocity.push_back(r);
            rep.agreement = std::max(rep.agreement, (v - r).norm() / std::max(r.norm(), 1e-300));
        }
    }
    return rep;
}

}  // namespace laxflow
