#include "laxflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace laxflow {

CMat LaurentMat::at(int k) const {
    if (c.empty()) return CMat();
    if (k < lo || k > hi()) return CMat::Zero(c[0].rows(), c[0].cols());
    return c[static_cast<size_t>(k - lo)];
}

PolyMat poly_mul(const PolyMat& a, const PolyMat& b) {
    if (a.empty() || b.empty()) return {};
    PolyMat r(a.size() + b.size() - 1, CMat::Zero(a[0].rows(), b[0].cols()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

LaurentMat laurent_mul(const LaurentMat& a, const LaurentMat& b) {
    return {a.lo + b.lo, poly_mul(a.c, b.c)};
}

LaurentMat laurent_commutator(const LaurentMat& a, const LaurentMat& b) {
    LaurentMat ab = laurent_mul(a, b), ba = laurent_mul(b, a);
    for (size_t k = 0; k < ab.c.size(); ++k) ab.c[k] -= ba.c[k];
    return ab;
}

namespace {

bool is_origin(const Place& p) { return p.is_finite() && std::abs(p.x) < 1e-14; }

PolyMat poly_pow(const PolyMat& L, int n) {
    const auto l = L[0].rows();
    PolyMat r{CMat::Identity(l, l)};
    for (int k = 0; k < n; ++k) r = poly_mul(r, L);
    return r;
}

LaurentMat add(const LaurentMat& a, const LaurentMat& b) {
    if (a.c.empty()) return b;
    if (b.c.empty()) return a;
    int lo = std::min(a.lo, b.lo), hi = std::max(a.hi(), b.hi());
    LaurentMat r{lo, {}};
    for (int k = lo; k <= hi; ++k) r.c.push_back(a.at(k) + b.at(k));
    return r;
}

}  // namespace

LaurentMat build_m_polynomial(const PolyMat& L, const AnsatzSpec& a) {
    if (L.empty()) throw Error(Errc::InvalidArgument, "empty Lax matrix");
    const auto l = L[0].rows();
    LaurentMat M{0, {CMat::Zero(l, l)}};
    for (const auto& e : a.entries) {
        if (e.n < 0) throw Error(Errc::InvalidArgument, "ansatz needs n >= 0");
        PolyMat Ln = poly_pow(L, e.n);
        LaurentMat part;
        if (!e.p.is_finite()) {
            // w = 1/z: w^-m L^n = z^m L^n; keep nonnegative powers.
            int lo = std::max(0, e.m);
            for (int k = lo; k <= e.m + static_cast<int>(Ln.size()) - 1; ++k) part.c.push_back(Ln[static_cast<size_t>(k - e.m)]);
            part.lo = lo;
        } else if (is_origin(e.p)) {
            // w = z: principal part of z^-m L^n at 0.
            int hi = std::min(-1, -e.m + static_cast<int>(Ln.size()) - 1);
            part.lo = -e.m;
            for (int k = -e.m; k <= hi; ++k) part.c.push_back(Ln[static_cast<size_t>(k + e.m)]);
        } else {
            throw Error(Errc::InvalidArgument, "rational-line ansatz places are 0 and infinity");
        }
        if (!part.c.empty()) M = add(M, part);
    }
    return M;
}

PolyMat poly_of(const KricheverLax& L) { return L.matrix.poly_coeffs(); }

Eigen::VectorXcd flatten(const PolyMat& P) {
    if (P.empty()) return {};
    const auto n = P[0].size();
    Eigen::VectorXcd v(static_cast<Eigen::Index>(P.size()) * n);
    for (size_t k = 0; k < P.size(); ++k) v.segment(static_cast<Eigen::Index>(k) * n, n) = P[k].reshaped();
    return v;
}

Trajectory integrate_fixed_pole(const KricheverLax& L0, const MProvider& Mp, double tEnd, double dt, int stride,
                                FixedPoleOptions opt) {
    if (dt <= 0.0 || tEnd < 0.0) throw Error(Errc::InvalidArgument, "integrate: need dt > 0 and tEnd >= 0");
    if (!L0.tyurin.points.empty()) throw Error(Errc::UnsupportedRegime, "fixed-pole integration needs a polynomial Lax matrix");
    const CurvePtr curve = L0.curve();
    PolyMat P = poly_of(L0);
    const size_t len = P.size();
    const auto l = P[0].rows();
    double leak = 0.0;

    auto rhs = [&](const PolyMat& X, double t) {
        LaurentMat M = Mp(X, t);
        LaurentMat Lx{0, X};
        LaurentMat V = opt.break_antisymmetry ? laurent_mul(M, Lx) : laurent_commutator(M, Lx);
        PolyMat out(len, CMat::Zero(l, l));
        double lk = 0.0;
        for (int k = V.lo; k <= V.hi(); ++k) {
            if (k >= 0 && k < static_cast<int>(len)) out[static_cast<size_t>(k)] = V.at(k);
            else lk = std::max(lk, V.at(k).norm());
        }
        leak = std::max(leak, lk);
        return out;
    };
    auto axpy = [&](const PolyMat& X, double s, const PolyMat& Y) {
        PolyMat r = X;
        for (size_t k = 0; k < len; ++k) r[k] += s * Y[k];
        return r;
    };
    auto state = [&](double t, const PolyMat& X) {
        KricheverLax Lt = polynomial_lax(curve, X);
        Lt.K = L0.K;
        return FlowState{t, std::move(Lt), FlowRegime::FixedPole};
    };

    Trajectory tr;
    const long nsteps = std::lround(tEnd / dt);
    tr.samples.push_back(state(0.0, P));
    for (long s = 0; s < nsteps; ++s) {
        double t = static_cast<double>(s) * dt;
        leak = 0.0;
        PolyMat k1 = rhs(P, t);
        PolyMat k2 = rhs(axpy(P, dt / 2, k1), t + dt / 2);
        PolyMat k3 = rhs(axpy(P, dt / 2, k2), t + dt / 2);
        PolyMat k4 = rhs(axpy(P, dt, k3), t + dt);
        for (size_t k = 0; k < len; ++k) P[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        tr.steps.push_back({t + dt, dt, leak, leak, 0.0});
        tr.cumulative_defect += leak;
        if ((s + 1) % stride == 0 || s + 1 == nsteps) tr.samples.push_back(state(static_cast<double>(s + 1) * dt, P));
    }
    return tr;
}

std::vector<std::vector<double>> isospectral_drift_profile(const Trajectory& tr) {
    std::vector<std::vector<double>> out;
    if (tr.samples.empty()) return out;
    auto h0 = char_poly(tr.samples.front().L.matrix);
    const CurvePtr& c = tr.samples.front().L.curve();
    // Probe places for non-polynomial invariants.
    std::vector<Place> probes;
    for (cplx x0 : {cplx(0.61, 0.23), cplx(-0.37, 0.81), cplx(1.13, -0.44), cplx(-0.92, -0.58)})
        for (const Place& p : c->places_over(x0)) probes.push_back(p);
    for (const auto& s : tr.samples) {
        auto h = char_poly(s.L.matrix);
        std::vector<double> row(h0.size(), 0.0);
        for (size_t d = 0; d < h.size(); ++d) {
            double dist = 0.0, scale = 1.0;
            if (h[d].is_polynomial_in_x() && h0[d].is_polynomial_in_x()) {
                Poly diff = h[d].a() - h0[d].a();
                dist = diff.norm_inf();
                scale = std::max(1.0, h0[d].a().norm_inf());
            } else {
                for (const Place& p : probes) {
                    cplx v0 = h0[d].value_at(p);
                    dist = std::max(dist, std::abs(h[d].value_at(p) - v0));
                    scale = std::max(scale, std::abs(v0));
                }
            }
            row[d] = dist / scale;
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<double> isospectral_drift(const Trajectory& tr) {
    std::vector<double> drift;
    for (const auto& row : isospectral_drift_profile(tr)) {
        drift.resize(row.size(), 0.0);
        for (size_t d = 0; d < row.size(); ++d) drift[d] = std::max(drift[d], row[d]);
    }
    return drift;
}

}  // namespace laxflow
