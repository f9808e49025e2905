#include "laxflow/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace laxflow {

cplx hamiltonian_value(const KricheverLax& L, const HamiltonianSpec& h) {
    if (h.n < 1) throw Error(Errc::InvalidArgument, "Hamiltonian needs n >= 1");
    const CurvePtr& c = L.curve();
    Place p = h.p;
    if (!p.is_finite())
        for (const Place& q : c->infinite_places())
            if (q.same(p)) p = q;
    FFElement tr = L.matrix.pow(h.n).trace();
    if (tr.is_zero()) return 0.0;
    // Series of tr(L^n) w^-m dz/dw known through exponent -1.
    LaurentSeries dx = c->chart(p, 24).x.derivative();
    int need = -1 + h.m - dx.val();  // tr(L^n) exponents required
    LaurentSeries s = expand(tr, p, std::max(need + 1, 1)).shifted(-h.m) * dx;
    return -s[-1] / static_cast<double>(h.n);
}

ConservationReport conservation_check(const Trajectory& tr, const std::vector<HamiltonianSpec>& hs) {
    if (tr.samples.empty()) throw Error(Errc::InvalidArgument, "empty trajectory");
    ConservationReport r;
    for (const auto& h : hs) {
        std::vector<cplx> v;
        double d = 0.0;
        for (const auto& s : tr.samples) {
            v.push_back(hamiltonian_value(s.L, h));
            d = std::max(d, std::abs(v.back() - v.front()));
        }
        r.values.push_back(std::move(v));
        r.drift.push_back(d);
    }
    return r;
}

double commuting_flows_check(const KricheverLax& L0, const MProvider& M1, const MProvider& M2, double t, double dt) {
    auto run = [&](const KricheverLax& L, const MProvider& M) { return integrate_fixed_pole(L, M, t, dt, 1 << 30).samples.back().L; };
    PolyMat a = poly_of(run(run(L0, M2), M1)), b = poly_of(run(run(L0, M1), M2));
    double d = 0.0;
    for (size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
        CMat x = k < a.size() ? a[k] : CMat::Zero(2, 2), y = k < b.size() ? b[k] : CMat::Zero(2, 2);
        d = std::max(d, (x - y).cwiseAbs().maxCoeff());
    }
    return d;
}

double commuting_flows_check(const KricheverLax& L0, const AnsatzSpec& a1, const AnsatzSpec& a2, double t, double dt) {
    MProvider M1 = [a1](const PolyMat& P, double) { return build_m_polynomial(P, a1); };
    MProvider M2 = [a2](const PolyMat& P, double) { return build_m_polynomial(P, a2); };
    return commuting_flows_check(L0, M1, M2, t, dt);
}

}  // namespace laxflow
