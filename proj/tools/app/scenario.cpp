#include "scenario.hpp"

#include "laxflow/jacobian.hpp"
#include "laxflow/residue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace laxflow::app {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::Configuration, what); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LaurentMat axpy(LaurentMat A, cplx s, const LaurentMat& B) {
    if (B.c.empty()) return A;
    if (A.c.empty()) {
        A.lo = B.lo;
        A.c.assign(1, CMat::Zero(B.c[0].rows(), B.c[0].cols()));
    }
    const int lo = std::min(A.lo, B.lo), hi = std::max(A.hi(), B.hi());
    const auto l = A.c[0].rows();
    LaurentMat R{lo, std::vector<CMat>(static_cast<size_t>(hi - lo + 1), CMat::Zero(l, l))};
    for (int k = A.lo; k <= A.hi(); ++k) R.c[static_cast<size_t>(k - lo)] += A.at(k);
    for (int k = B.lo; k <= B.hi(); ++k) R.c[static_cast<size_t>(k - lo)] += s * B.at(k);
    return R;
}

bool rational_l2(const KricheverLax& L) { return L.curve()->is_rational() && L.size() == 2 && L.tyurin.points.empty(); }

// Samples with uniform spacing from the first two (drops a shorter final interval).
Trajectory uniform(const Trajectory& tr) {
    if (tr.samples.size() < 3) return tr;
    Trajectory out = tr;
    out.samples.clear();
    const double h = tr.samples[1].t - tr.samples[0].t;
    for (size_t i = 0; i < tr.samples.size(); ++i)
        if (std::abs(tr.samples[i].t - tr.samples[0].t - static_cast<double>(i) * h) < 1e-9 * std::max(1.0, std::abs(tr.samples[i].t)))
            out.samples.push_back(tr.samples[i]);
        else
            break;
    return out;
}

json violation_json(const Violation& v) {
    json j;
    j["clause"] = v.clause;
    j["point"] = v.point;
    if (v.place) j["place"] = io::to_json(*v.place);
    j["entry"] = json::array({v.entry_i, v.entry_j});
    j["defect"] = v.defect;
    return j;
}

std::vector<HamiltonianSpec> default_hamiltonians(const KricheverLax& L) {
    std::vector<HamiltonianSpec> hs;
    if (L.curve()->is_rational() && L.tyurin.points.empty()) {
        const int D = static_cast<int>(poly_of(L).size()) - 1;
        for (int n = 2; n <= std::max(2, L.size()); ++n)
            for (int m = -1; m >= -n * D - 1; --m) hs.push_back({Place::infinity(), n, m});
    } else {
        for (int m = -4; m <= 2; ++m) hs.push_back({Place::infinity(), 2, m});
    }
    return hs;
}

std::string spec_label(const HamiltonianSpec& h) {
    std::string where = h.p.is_finite() ? "p" : "inf";
    return "H_" + where + "_n" + std::to_string(h.n) + "_m" + std::to_string(h.m);
}

CMat random_w(std::mt19937_64& rng, int l) {
    std::normal_distribution<double> G(0.0, 1.0);
    CMat W(l, l);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) W(i, k) = cplx(G(rng), G(rng));
    return W;
}

}  // namespace

MProvider Generator::provider() const {
    switch (kind) {
        case Kind::Ansatz: return [a = ansatz](const PolyMat& P, double) { return build_m_polynomial(P, a); };
        case Kind::PolynomialInL:
            return [c = coeffs](const PolyMat& P, double) {
                const auto l = P[0].rows();
                LaurentMat M{0, {CMat::Identity(l, l) * (c.empty() ? cplx{} : c[0])}};
                PolyMat X = P;
                for (size_t k = 1; k < c.size(); ++k) {
                    M = axpy(M, c[k], LaurentMat{0, X});
                    if (k + 1 < c.size()) X = poly_mul(X, P);
                }
                return M;
            };
        case Kind::Curvature:
            return [a = ansatz, b = injected, s = strength](const PolyMat& P, double t) {
                return axpy(build_m_polynomial(P, a), s * t, build_m_polynomial(P, b));
            };
    }
    return {};
}

MatrixFunc Generator::at(const KricheverLax& L, double t) const {
    switch (kind) {
        case Kind::Ansatz: return build_m(L, ansatz);
        case Kind::PolynomialInL: {
            MatrixFunc M = MatrixFunc::identity(L.curve(), L.size()) * (coeffs.empty() ? cplx{} : coeffs[0]);
            for (size_t k = 1; k < coeffs.size(); ++k) M = M + L.matrix.pow(static_cast<int>(k)) * coeffs[k];
            return M;
        }
        case Kind::Curvature: return build_m(L, ansatz) + build_m(L, injected) * cplx(strength * t);
    }
    return {};
}

json Generator::to_json() const {
    json j;
    switch (kind) {
        case Kind::Ansatz:
            j["kind"] = "ansatz";
            j["ansatz"] = io::to_json(ansatz);
            break;
        case Kind::PolynomialInL: {
            j["kind"] = "polynomial_in_L";
            json c = json::array();
            for (cplx x : coeffs) c.push_back(io::to_json(x));
            j["coeffs"] = c;
            break;
        }
        case Kind::Curvature:
            j["kind"] = "curvature";
            j["ansatz"] = io::to_json(ansatz);
            j["injected"] = io::to_json(injected);
            j["strength"] = strength;
            break;
    }
    return j;
}

Generator Generator::from_json(const json& j) {
    Generator g;
    std::string kind = j.value("kind", std::string("ansatz"));
    if (kind == "ansatz") {
        if (!j.contains("ansatz")) bad("generator 'ansatz' needs an ansatz");
        g.ansatz = io::ansatz_from(j["ansatz"]);
    } else if (kind == "polynomial_in_L") {
        g.kind = Kind::PolynomialInL;
        if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty()) bad("polynomial_in_L needs coeffs");
        for (const auto& c : j["coeffs"]) g.coeffs.push_back(io::cplx_from(c));
    } else if (kind == "curvature") {
        g.kind = Kind::Curvature;
        if (!j.contains("ansatz") || !j.contains("injected")) bad("curvature generator needs ansatz and injected");
        g.ansatz = io::ansatz_from(j["ansatz"]);
        g.injected = io::ansatz_from(j["injected"]);
        g.strength = j.value("strength", 1.0);
    } else {
        bad("unknown generator kind '" + kind + "'");
    }
    return g;
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) bad("scenario must be a JSON object");
    static const std::set<std::string> keys = {"name", "curve", "lax", "ansatz", "generator", "integration", "analyses", "tolerances", "hamiltonian", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) bad("unknown scenario field '" + it.key() + "'");
    Scenario s;
    s.base_dir = base_dir;
    try {
        s.name = j.value("name", std::string("scenario"));
        if (!j.contains("lax")) bad("scenario needs a lax source");
        s.lax_source = j["lax"];
        if (j.contains("curve")) s.lax_source["curve"] = j["curve"];
        const bool builtin = s.lax_source.is_object() && s.lax_source.contains("builtin");
        if (j.contains("generator")) s.generator = Generator::from_json(j["generator"]);
        else if (j.contains("ansatz")) s.generator.ansatz = io::ansatz_from(j["ansatz"]);
        else if (builtin) s.generator.ansatz = {{{Place::infinity(), 1, -1}}, std::nullopt};
        else bad("scenario needs an ansatz or a generator");
        if (j.contains("integration")) {
            const json& in = j["integration"];
            s.tEnd = in.value("tEnd", s.tEnd);
            s.dt = in.value("dt", s.dt);
            s.stride = in.value("stride", s.stride);
            if (in.contains("scheme")) {
                std::string sc = in["scheme"].get<std::string>();
                if (sc == "rk4") s.scheme = Scheme::RK4;
                else if (sc == "moving_pole_rk2") s.scheme = Scheme::MovingPoleRK2;
                else bad("unknown scheme '" + sc + "'");
            }
        }
        if (!(s.dt > 0.0) || !(s.tEnd > 0.0) || s.stride < 1) bad("integration needs tEnd > 0, dt > 0, stride >= 1");
        if (!j.contains("analyses") || !j["analyses"].is_array()) bad("scenario needs an analyses array");
        for (const auto& a : j["analyses"]) {
            std::string name = a.get<std::string>();
            if (std::find(kAnalyses.begin(), kAnalyses.end(), name) == kAnalyses.end()) bad("unknown analysis '" + name + "'");
            s.analyses.insert(name);
        }
        for (const char* dep : {"linearity", "abel"})
            if (s.analyses.count(dep) && !s.analyses.count("flow")) bad(std::string("analysis '") + dep + "' requires 'flow'");
        if (j.contains("tolerances")) {
            std::map<std::string, double*> t = {
                {"validate", &s.tol.validate}, {"h_tail", &s.tol.h_tail}, {"eigen", &s.tol.eigen}, {"drift", &s.tol.drift},
                {"defect", &s.tol.defect}, {"moving_drift", &s.tol.moving_drift}, {"constancy", &s.tol.constancy}, {"linearity", &s.tol.linearity}, {"gauge", &s.tol.gauge},
                {"second_difference", &s.tol.second_difference}, {"velocity_agreement", &s.tol.velocity_agreement},
                {"hamiltonian", &s.tol.hamiltonian}, {"commuting", &s.tol.commuting}, {"tangency", &s.tol.tangency}};
            for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
                auto f = t.find(it.key());
                if (f == t.end()) bad("unknown tolerance '" + it.key() + "'");
                *f->second = it.value().get<double>();
                if (!(*f->second > 0.0)) bad("tolerance '" + it.key() + "' must be positive");
            }
        }
        if (j.contains("hamiltonian")) {
            const json& h = j["hamiltonian"];
            if (h.contains("specs"))
                for (const auto& e : io::ansatz_from(h["specs"]).entries) s.hamiltonians.push_back(e);
            if (h.contains("commuting_with"))
                for (const auto& a : h["commuting_with"]) s.commuting_with.push_back(io::ansatz_from(a));
            s.commuting_t = h.value("t", s.commuting_t);
        }
        s.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        bad(std::string("malformed scenario: ") + e.what());
    }
    if (s.lax_source.is_object() && s.lax_source.contains("file")) {
        auto p = base_dir / s.lax_source["file"].get<std::string>();
        if (!std::filesystem::exists(p)) bad("lax file not found: " + p.string());
    }
    return s;
}

Scenario builtin_scenario(const std::string& name) {
    if (name != "mumford-g1") bad("unknown builtin '" + name + "'");
    json j = {{"name", "mumford-g1"},
              {"lax", {{"builtin", "mumford-g1"}}},
              {"ansatz", json::array({{{"place", "infinity"}, {"n", 1}, {"m", -1}}})},
              {"integration", {{"tEnd", 1.0}, {"dt", 1e-3}, {"scheme", "rk4"}, {"stride", 100}}},
              {"analyses", json::array({"validate", "spectral", "flow", "linearity", "abel", "hamiltonian"})},
              {"seed", 0}};
    return parse_scenario(j, ".");
}

void override_tolerance(Scenario& s, double tol) {
    if (!(tol > 0.0)) bad("--tol must be positive");
    if (s.analyses.count("validate")) s.tol.validate = tol;
    if (s.analyses.count("spectral")) s.tol.eigen = tol;
    if (s.analyses.count("flow")) s.tol.drift = tol;
    if (s.analyses.count("linearity")) s.tol.linearity = tol;
    if (s.analyses.count("abel")) s.tol.second_difference = tol;
    if (s.analyses.count("hamiltonian")) s.tol.hamiltonian = tol;
}

namespace {

json lax_json_of(const Scenario& s) {
    const json& src = s.lax_source;
    if (src.is_string() || (src.is_object() && src.contains("file"))) {
        auto p = s.base_dir / (src.is_string() ? src.get<std::string>() : src["file"].get<std::string>());
        return io::read_json(p);
    }
    if (!src.is_object()) bad("lax source must be an object");
    if (src.contains("builtin")) {
        if (src["builtin"] != "mumford-g1") bad("unknown builtin '" + src["builtin"].dump() + "'");
        return io::lax_to_json(mumford_benchmark());
    }
    if (src.contains("mumford")) {
        const json& m = src["mumford"];
        if (!m.contains("u") || !m.contains("v") || !m.contains("w")) bad("mumford source needs u, v, w");
        return io::lax_to_json(mumford_lax(io::poly_from(m["u"]), io::poly_from(m["v"]), io::poly_from(m["w"])));
    }
    if (src.contains("params")) {
        const json& p = src["params"];
        if (!src.contains("curve")) bad("params source needs a curve");
        CurvePtr c = io::curve_from(src["curve"]);
        if (c->is_rational()) bad("params source needs a hyperelliptic curve");
        Divisor K = canonical_divisor(*c);
        if (p.contains("K") && !(p["K"].is_string() && p["K"] == "canonical")) K = io::divisor_from(p["K"]);
        std::mt19937_64 rng(s.seed);
        auto L = construct_lax(c, K, sample_params(c, K, p.value("l", 2), rng));
        return io::lax_to_json(L);
    }
    bad("lax source must be builtin, file, mumford or params");
}

}  // namespace

KricheverLax load_lax(const Scenario& s) {
    try {
        return io::lax_from(lax_json_of(s));
    } catch (const Error& e) {
        if (e.code() == Errc::Configuration) throw;
        bad(std::string("invalid Lax matrix: ") + e.what());
    }
}

Section analyze_validate(const json& lax_json, const Tolerances& tol) {
    Section out;
    CurvePtr c = io::curve_from(lax_json.at("curve"));
    const json& mj = lax_json.at("matrix");
    const int l = static_cast<int>(mj.size());
    MatrixFunc M = MatrixFunc::zero(c, l);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) M(i, k) = io::element_from(c, mj.at(static_cast<size_t>(i)).at(static_cast<size_t>(k)));
    TyurinData T;
    if (lax_json.contains("tyurin"))
        for (const auto& tp : lax_json["tyurin"]) T.points.push_back({io::place_from(tp.at("gamma")), io::cvec_from(tp.at("alpha"))});
    Divisor K = lax_json.contains("K") ? io::divisor_from(lax_json["K"]) : Divisor{};
    json viol = json::array();
    double max_tail = 0.0;
    bool ok = true;
    if (c->is_rational() && T.points.empty()) {
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k)
                if (!M(i, k).is_polynomial_in_x()) {
                    viol.push_back(json{{"clause", "stray_pole"}, {"point", -1}, {"entry", json::array({i, k})}, {"defect", 1.0}});
                    ok = false;
                }
    } else {
        auto rep = validate_lax(M, T, K, tol.validate);
        for (const auto& v : rep.violations) viol.push_back(violation_json(v));
        ok = rep.ok();
        if (ok && !T.points.empty()) max_tail = hitchin_invariants(*rep.lax).max_tail;
    }
    out.report["regime"] = T.points.empty() ? "polynomial" : "krichever";
    out.report["ok"] = ok;
    out.report["violations"] = viol;
    out.report["max_h_tail"] = max_tail;
    out.pass = ok && max_tail < tol.h_tail;
    return out;
}

Section analyze_spectral(const KricheverLax& L, const Tolerances& tol) {
    Section out;
    auto S = spectral_curve(L);
    out.report["genus"] = S.genus;
    json h = json::array();
    for (const auto& e : S.h) h.push_back(io::to_json(e));
    out.report["h"] = h;
    out.report["branch"] = io::to_json(S.branch);
    if (rational_l2(L)) {
        auto m = hyperelliptic_model(S);
        json b = json::array();
        for (cplx x : m.branch) b.push_back(io::to_json(x));
        out.report["branch_points"] = b;
        out.report["Q"] = io::to_json(m.Q);
    }
    auto E = eigen_divisor(L, S);
    json pts = json::array();
    double worst = 0.0;
    io::Table tab{{"base_x_re", "base_x_im", "mu_re", "mu_im", "eigen_residual"}, {}};
    for (const auto& p : E.points) {
        // The adjugate row can vanish at degenerate points; fall back to the other normalization.
        double r = kNaN;
        for (EigenNorm nm : {EigenNorm::AdjugateRow, EigenNorm::LastCoordinateOne}) {
            try {
                r = eigen_residual(L, left_eigenvector(L, p, nm));
                break;
            } catch (const Error&) {
            }
        }
        if (std::isfinite(r)) worst = std::max(worst, r);
        pts.push_back(json{{"place", io::to_json(p.base)}, {"mu", io::to_json(p.mu)}, {"residual", r}});
        tab.rows.push_back({p.base.x.real(), p.base.x.imag(), p.mu.real(), p.mu.imag(), r});
    }
    out.report["eigen_divisor"] = json{{"degree", E.degree}, {"degenerate", E.degenerate}, {"note", E.note}, {"points", pts}};
    out.report["max_eigen_residual"] = worst;
    out.tables["eigen_divisor"] = tab;
    out.pass = worst < tol.eigen;
    return out;
}

Section analyze_flow(const KricheverLax& L, const Scenario& s, Trajectory& tr) {
    Section out;
    const bool poly = L.curve()->is_rational() && L.tyurin.points.empty();
    Scheme scheme = s.scheme.value_or(poly ? Scheme::RK4 : Scheme::MovingPoleRK2);
    if (scheme == Scheme::RK4) {
        if (!poly) bad("rk4 needs a polynomial Lax matrix over the rational line");
        tr = integrate_fixed_pole(L, s.generator.provider(), s.tEnd, s.dt, s.stride);
    } else {
        if (s.generator.kind != Generator::Kind::Ansatz) bad("moving_pole_rk2 needs an ansatz generator");
        tr = integrate_moving_pole(L, s.generator.ansatz, s.tEnd, s.dt, s.stride);
    }
    auto prof = isospectral_drift_profile(tr);
    auto drift = isospectral_drift(tr);
    double max_drift = drift.empty() ? 0.0 : *std::max_element(drift.begin(), drift.end());
    double max_post = 0.0;
    for (const auto& st : tr.steps) max_post = std::max(max_post, st.post_defect);
    out.report["scheme"] = scheme == Scheme::RK4 ? "rk4" : "moving_pole_rk2";
    out.report["generator"] = s.generator.to_json();
    out.report["tEnd"] = s.tEnd;
    out.report["dt"] = s.dt;
    out.report["samples"] = tr.samples.size();
    out.report["drift"] = drift;
    out.report["max_drift"] = max_drift;
    out.report["cumulative_defect"] = tr.cumulative_defect;
    out.report["max_post_defect"] = max_post;
    out.report["rejections"] = tr.rejections;
    io::Table d{{"t"}, {}};
    for (size_t k = 0; k < drift.size(); ++k) d.header.push_back("drift_h" + std::to_string(k + 1));
    for (size_t i = 0; i < tr.samples.size(); ++i) {
        std::vector<double> row{tr.samples[i].t};
        row.insert(row.end(), prof[i].begin(), prof[i].end());
        d.rows.push_back(row);
    }
    io::Table st{{"t", "dt", "constraint_defect", "post_defect", "fit_residual"}, {}};
    for (const auto& x : tr.steps) st.rows.push_back({x.t, x.dt, x.constraint_defect, x.post_defect, x.fit_residual});
    out.tables["drift"] = d;
    out.tables["steps"] = st;
    const double budget = scheme == Scheme::RK4 ? s.tol.drift : s.tol.moving_drift;
    out.report["drift_budget"] = budget;
    out.pass = max_drift < budget && max_post < s.tol.defect && tr.rejections == 0;
    return out;
}

Section analyze_linearity(const Trajectory& tr0, const Generator& g, const Tolerances& tol, std::uint64_t seed) {
    Section out;
    Trajectory tr = uniform(tr0);
    if (tr.samples.size() < 3) bad("linearity needs at least 3 uniformly spaced samples");
    const KricheverLax& L0 = tr.samples.front().L;
    if (!rational_l2(L0)) bad("linearity needs a 2x2 polynomial Lax matrix over the rational line");
    auto m = hyperelliptic_model(spectral_curve(L0));
    std::vector<MatrixFunc> Ms;
    int n = 1;
    for (const auto& st : tr.samples) {
        Ms.push_back(g.at(st.L, st.t));
        for (const auto& tl : lambda_tails(st.L, Ms.back(), m, 1, st.t).tails) n = std::max(n, tl.order_bound);
    }
    std::vector<ResidueSection> secs;
    for (size_t i = 0; i < tr.samples.size(); ++i) secs.push_back(lambda_tails(tr.samples[i].L, Ms[i], m, n, tr.samples[i].t));
    auto cst = constancy_test(secs.front(), m, tol.constancy);
    auto lin = linearity_test(secs, m, tol.linearity);
    std::mt19937_64 rng(seed);
    double gauge = 0.0;
    for (int k = 0; k < 5; ++k) gauge = std::max(gauge, gauge_equivalence(L0, Ms.front(), random_w(rng, 2), n, tol.gauge).residual);
    out.report["genus"] = m.genus;
    out.report["tail_order"] = n;
    out.report["constancy"] = cst.ok;
    out.report["constancy_residual"] = cst.residual;
    out.report["linearity"] = lin.ok;
    out.report["linearity_residual"] = lin.residual;
    out.report["linearity_profile"] = lin.profile;
    out.report["equivalence"] = gauge < tol.gauge;
    out.report["gauge_residual"] = gauge;
    if (m.genus == 1)
        out.report["note"] = "genus 1: the Jacobian tangent space is one-dimensional, so the linearity residual cannot detect curvature";
    io::Table p{{"t", "linearity_residual"}, {}};
    for (size_t i = 0; i < lin.profile.size(); ++i) p.rows.push_back({tr.samples[i + 1].t, lin.profile[i]});
    out.tables["linearity_profile"] = p;
    out.pass = lin.ok && gauge < tol.gauge;
    return out;
}

Section analyze_abel(const Trajectory& tr0, const Generator& g, const Tolerances& tol) {
    Section out;
    Trajectory tr = uniform(tr0);
    const KricheverLax& L0 = tr.samples.front().L;
    if (!rational_l2(L0)) bad("abel needs a 2x2 polynomial Lax matrix over the rational line");
    auto m = hyperelliptic_model(spectral_curve(L0));
    auto P = periods(m);
    const AnsatzSpec* a = g.kind == Generator::Kind::Ansatz ? &g.ansatz : nullptr;
    auto rep = jacobian_linearity(tr, m, P, a);
    out.report["genus"] = m.genus;
    out.report["tau"] = io::to_json(P.tau);
    out.report["riemann_symmetry_defect"] = P.symmetry_defect;
    out.report["min_imag_eig"] = P.min_imag_eig;
    out.report["maxSecondDifference"] = rep.maxSecondDifference;
    out.report["linear"] = rep.maxSecondDifference < tol.second_difference;
    bool ok = rep.maxSecondDifference < tol.second_difference;
    if (a) {
        out.report["velocityAgreement"] = rep.agreement;
        ok = ok && rep.agreement < tol.velocity_agreement;
    }
    io::Table t{{"t"}, {}};
    for (int j = 0; j < m.genus; ++j) {
        t.header.push_back("A" + std::to_string(j + 1) + "_re");
        t.header.push_back("A" + std::to_string(j + 1) + "_im");
    }
    t.header.push_back("second_difference");
    const size_t N = rep.images.size();
    for (size_t i = 0; i < N; ++i) {
        std::vector<double> row{rep.t[i]};
        for (int j = 0; j < m.genus; ++j) {
            row.push_back(rep.images[i](j).real());
            row.push_back(rep.images[i](j).imag());
        }
        double d2 = kNaN;
        if (i > 0 && i + 1 < N) {
            double h = 0.5 * (rep.t[i + 1] - rep.t[i - 1]);
            d2 = (rep.images[i + 1] - 2.0 * rep.images[i] + rep.images[i - 1]).norm() / (h * h);
        }
        row.push_back(d2);
        t.rows.push_back(row);
    }
    out.tables["abel"] = t;
    out.pass = ok;
    return out;
}

Section analyze_hamiltonian(const KricheverLax& L0, const Trajectory* tr, const Scenario& s) {
    Section out;
    auto hs = s.hamiltonians.empty() ? default_hamiltonians(L0) : s.hamiltonians;
    json specs = json::array();
    io::Table t{{"t"}, {}};
    for (const auto& h : hs) {
        specs.push_back(json{{"label", spec_label(h)}, {"place", io::to_json(h.p)}, {"n", h.n}, {"m", h.m}, {"value", io::to_json(hamiltonian_value(L0, h))}});
        t.header.push_back(spec_label(h) + "_re");
        t.header.push_back(spec_label(h) + "_im");
    }
    out.report["specs"] = specs;
    bool ok = true;
    // Gauge invariance under a seeded random conjugation.
    std::mt19937_64 rng(s.seed + 17);
    KricheverLax LW = gauge_transform(L0, random_w(rng, L0.size()));
    double gauge = 0.0;
    for (const auto& h : hs) {
        cplx a = hamiltonian_value(L0, h), b = hamiltonian_value(LW, h);
        gauge = std::max(gauge, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    out.report["gauge_residual"] = gauge;
    ok = ok && gauge < 1e-10;
    if (tr) {
        auto rep = conservation_check(*tr, hs);
        double worst = 0.0, worst_rel = 0.0;
        std::vector<double> rel;
        for (size_t k = 0; k < rep.drift.size(); ++k) {
            worst = std::max(worst, rep.drift[k]);
            rel.push_back(rep.drift[k] / std::max(1.0, std::abs(rep.values[k].front())));
            worst_rel = std::max(worst_rel, rel.back());
        }
        const bool moving = tr->samples.back().regime == FlowRegime::MovingPole;
        const double budget = moving ? s.tol.moving_drift : s.tol.hamiltonian;
        out.report["drift"] = rep.drift;
        out.report["relative_drift"] = rel;
        out.report["max_drift"] = worst;
        out.report["max_relative_drift"] = worst_rel;
        out.report["drift_budget"] = budget;
        ok = ok && worst_rel < budget;
        for (size_t i = 0; i < tr->samples.size(); ++i) {
            std::vector<double> row{tr->samples[i].t};
            for (const auto& v : rep.values) {
                row.push_back(v[i].real());
                row.push_back(v[i].imag());
            }
            t.rows.push_back(row);
        }
    } else {
        std::vector<double> row{0.0};
        for (const auto& sp : specs) {
            cplx v = io::cplx_from(sp["value"]);
            row.push_back(v.real());
            row.push_back(v.imag());
        }
        t.rows.push_back(row);
    }
    if (!s.commuting_with.empty()) {
        if (!rational_l2(L0) || s.generator.kind != Generator::Kind::Ansatz) bad("commuting_with needs an ansatz flow of a polynomial Lax matrix");
        json cw = json::array();
        for (const auto& b : s.commuting_with) {
            double d = commuting_flows_check(L0, s.generator.ansatz, b, s.commuting_t, s.dt);
            cw.push_back(json{{"ansatz", io::to_json(b)}, {"t", s.commuting_t}, {"dt", s.dt}, {"discrepancy", d}});
            ok = ok && d < s.tol.commuting;
        }
        out.report["commuting"] = cw;
    }
    out.tables["hamiltonians"] = t;
    out.pass = ok;
    return out;
}

json trajectory_json(const Trajectory& tr, const Generator& g) {
    json j;
    j["generator"] = g.to_json();
    json body = io::trajectory_to_json(tr);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j;
}

void write_tables(const std::map<std::string, io::Table>& tables, const std::filesystem::path& dir, const std::string& format) {
    for (const auto& [name, t] : tables) {
        if (format == "json") io::write_text(dir / (name + ".json"), io::dump(t.as_json()));
        else io::write_text(dir / (name + ".csv"), t.csv());
    }
}

json error_json(const std::string& code, const std::string& message) { return json{{"error", {{"code", code}, {"message", message}}}}; }

Outcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir, const std::string& format) {
    if (format != "csv" && format != "json") bad("--format must be json or csv");
    // Everything that can be rejected as configuration is checked before the first analysis.
    json lax_json = lax_json_of(s);
    KricheverLax L0 = load_lax(s);
    if ((s.analyses.count("linearity") || s.analyses.count("abel")) && !rational_l2(L0))
        bad("linearity and abel need a 2x2 polynomial Lax matrix over the rational line");
    if (s.analyses.count("flow")) {
        const bool poly = L0.curve()->is_rational() && L0.tyurin.points.empty();
        Scheme sc = s.scheme.value_or(poly ? Scheme::RK4 : Scheme::MovingPoleRK2);
        if (sc == Scheme::RK4 && !poly) bad("rk4 needs a polynomial Lax matrix over the rational line");
        if (sc == Scheme::MovingPoleRK2 && s.generator.kind != Generator::Kind::Ansatz) bad("moving_pole_rk2 needs an ansatz generator");
    }

    Outcome res;
    json analyses = json::object(), summary = json::object();
    std::map<std::string, io::Table> tables;
    bool all = true;
    Trajectory tr;
    bool have_tr = false;
    auto run = [&](const std::string& name, auto&& fn) {
        if (!s.analyses.count(name)) return;
        Section sec;
        try {
            sec = fn();
        } catch (const Error& e) {
            if (e.code() == Errc::Configuration) throw;
            sec.report = error_json(errc_name(e.code()), e.what());
            sec.pass = false;
        }
        sec.report["pass"] = sec.pass;
        all = all && sec.pass;
        summary[name] = sec.pass;
        for (auto& [k, v] : sec.tables) tables[name + "_" + k] = v;
        analyses[name] = sec.report;
    };
    auto need_tr = [&] {
        if (!have_tr) throw Error(Errc::PreconditionViolation, "flow did not produce a trajectory");
    };
    run("validate", [&] { return analyze_validate(lax_json, s.tol); });
    run("spectral", [&] { return analyze_spectral(L0, s.tol); });
    run("flow", [&] {
        auto sec = analyze_flow(L0, s, tr);
        have_tr = true;
        return sec;
    });
    run("linearity", [&] {
        need_tr();
        return analyze_linearity(tr, s.generator, s.tol, s.seed);
    });
    run("abel", [&] {
        need_tr();
        return analyze_abel(tr, s.generator, s.tol);
    });
    run("hamiltonian", [&] { return analyze_hamiltonian(L0, have_tr ? &tr : nullptr, s); });

    auto copy = [&](const char* sec, const char* key, const char* as) {
        if (analyses.contains(sec) && analyses[sec].contains(key)) summary[as] = analyses[sec][key];
    };
    copy("flow", "max_drift", "maxDrift");
    copy("linearity", "constancy", "constancy");
    copy("linearity", "linearity", "linearity");
    copy("linearity", "linearity_residual", "linearityResidual");
    copy("abel", "maxSecondDifference", "maxSecondDifference");
    copy("abel", "velocityAgreement", "velocityAgreement");
    copy("hamiltonian", "max_drift", "hamiltonianDrift");

    res.report["name"] = s.name;
    res.report["seed"] = s.seed;
    res.report["pass"] = all;
    res.report["summary"] = summary;
    res.report["analyses"] = analyses;
    io::write_text(out_dir / "report.json", io::dump(res.report));
    if (have_tr) io::write_text(out_dir / "trajectory.json", io::dump(trajectory_json(tr, s.generator)));
    write_tables(tables, out_dir / "tables", format);
    res.exit_code = all ? 0 : 1;
    return res;
}

}  // namespace laxflow::app
