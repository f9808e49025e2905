#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace laxflow::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::Configuration, what); }

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' '), pad0(static_cast<size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) { out += ","; out += nl; }
                first = false;
                out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
                dump_rec(it.value(), indent, depth + 1, out);
            }
            out += nl + pad0 + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            // Arrays of scalars, or of arrays of scalars (complex pairs, rows), stay on one line.
            bool flat = true;
            for (const auto& e : j) {
                if (e.is_object()) flat = false;
                if (e.is_array())
                    for (const auto& x : e) flat = flat && !x.is_structured();
            }
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? ", " : ",";
                if (!flat) out += nl + pad;
                first = false;
                dump_rec(e, indent, depth + 1, out);
            }
            if (!flat) out += nl + pad0;
            out += "]";
            return;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) { out += "null"; return; }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s = buf;
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            out += s;
            return;
        }
        default: out += j.dump();
    }
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) bad("complex numbers are [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const Poly& p) {
    json a = json::array();
    for (cplx c : p.coeffs()) a.push_back(to_json(c));
    return a;
}

Poly poly_from(const json& j) {
    if (!j.is_array()) bad("polynomials are arrays of coefficients in ascending order");
    std::vector<cplx> c;
    for (const auto& e : j) c.push_back(cplx_from(e));
    return Poly(std::move(c));
}

json to_json(const CMat& A) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < A.cols(); ++k) r.push_back(to_json(A(i, k)));
        rows.push_back(r);
    }
    return rows;
}

CMat cmat_from(const json& j) {
    if (!j.is_array() || j.empty()) bad("matrices are non-empty arrays of rows");
    CMat A(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != static_cast<size_t>(A.cols())) bad("ragged matrix");
        for (size_t k = 0; k < j[i].size(); ++k) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cplx_from(j[i][k]);
    }
    return A;
}

json to_json(const CVec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
    return a;
}

CVec cvec_from(const json& j) {
    if (!j.is_array()) bad("vectors are arrays");
    CVec v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = cplx_from(j[i]);
    return v;
}

json curve_to_json(const BaseCurve& c) {
    json j;
    if (c.is_rational()) {
        j["kind"] = "rational";
    } else {
        j["kind"] = "hyperelliptic";
        j["f"] = to_json(c.f());
    }
    return j;
}

CurvePtr curve_from(const json& j) {
    std::string kind = j.is_string() ? j.get<std::string>() : need(j, "kind").get<std::string>();
    if (kind == "rational") return BaseCurve::rational_line();
    if (kind == "hyperelliptic") return BaseCurve::hyperelliptic(poly_from(need(j, "f")));
    bad("unknown curve kind '" + kind + "'");
}

json to_json(const Place& p) {
    json j;
    switch (p.chart) {
        case Place::Chart::FiniteRegular:
            j["chart"] = "finite_regular";
            j["x"] = to_json(p.x);
            j["y"] = to_json(p.y);
            break;
        case Place::Chart::FiniteBranch:
            j["chart"] = "finite_branch";
            j["x"] = to_json(p.x);
            break;
        case Place::Chart::Infinity:
            j["chart"] = "infinity";
            j["sheet"] = p.sheet;
            break;
    }
    return j;
}

Place place_from(const json& j) {
    if (j.is_string() && j.get<std::string>() == "infinity") return Place::infinity();
    std::string chart = need(j, "chart").get<std::string>();
    if (chart == "finite_regular") return Place::regular(cplx_from(need(j, "x")), j.contains("y") ? cplx_from(j["y"]) : cplx{});
    if (chart == "finite_branch") return Place::branch(cplx_from(need(j, "x")));
    if (chart == "infinity") return Place::infinity(j.value("sheet", 0));
    bad("unknown chart '" + chart + "'");
}

json to_json(const Divisor& D) {
    json a = json::array();
    for (const auto& [p, k] : D.terms()) a.push_back(json{{"place", to_json(p)}, {"mult", k}});
    return a;
}

Divisor divisor_from(const json& j) {
    if (!j.is_array()) bad("divisors are arrays of {place, mult}");
    Divisor D;
    for (const auto& t : j) D.add(place_from(need(t, "place")), need(t, "mult").get<int>());
    return D;
}

json to_json(const FFElement& e) { return json{{"a", to_json(e.a())}, {"b", to_json(e.b())}, {"d", to_json(e.d())}}; }

FFElement element_from(const CurvePtr& c, const json& j) {
    if (j.is_array() || j.is_number()) return FFElement::poly(c, j.is_number() ? Poly{cplx_from(j)} : poly_from(j));
    Poly b = j.contains("b") ? poly_from(j["b"]) : Poly{};
    Poly d = j.contains("d") ? poly_from(j["d"]) : Poly{1.0};
    if (c->is_rational() && !b.is_zero()) bad("elements on the rational line have b = 0");
    return FFElement::make(c, poly_from(need(j, "a")), b, d);
}

json lax_to_json(const KricheverLax& L) {
    json j;
    j["curve"] = curve_to_json(*L.curve());
    j["l"] = L.size();
    json m = json::array();
    for (int i = 0; i < L.size(); ++i) {
        json r = json::array();
        for (int k = 0; k < L.size(); ++k) r.push_back(to_json(L.matrix(i, k)));
        m.push_back(r);
    }
    j["matrix"] = m;
    json t = json::array();
    for (const auto& tp : L.tyurin.points) t.push_back(json{{"gamma", to_json(tp.gamma)}, {"alpha", to_json(tp.alpha)}});
    j["tyurin"] = t;
    j["K"] = to_json(L.K);
    return j;
}

KricheverLax lax_from(const json& j) {
    CurvePtr c = curve_from(need(j, "curve"));
    const json& mj = need(j, "matrix");
    const int l = static_cast<int>(mj.size());
    if (l < 1) bad("empty Lax matrix");
    MatrixFunc M = MatrixFunc::zero(c, l);
    for (int i = 0; i < l; ++i) {
        if (mj[static_cast<size_t>(i)].size() != static_cast<size_t>(l)) bad("Lax matrix must be square");
        for (int k = 0; k < l; ++k) M(i, k) = element_from(c, mj[static_cast<size_t>(i)][static_cast<size_t>(k)]);
    }
    TyurinData T;
    if (j.contains("tyurin"))
        for (const auto& tp : j["tyurin"]) T.points.push_back({place_from(need(tp, "gamma")), cvec_from(need(tp, "alpha"))});
    Divisor K = j.contains("K") ? divisor_from(j["K"]) : Divisor{};
    if (T.points.empty() && c->is_rational()) {
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k)
                if (!M(i, k).is_polynomial_in_x()) bad("rational-line Lax matrices without Tyurin points must be polynomial");
        return polynomial_lax(c, M.poly_coeffs());
    }
    auto rep = validate_lax(M, T, K);
    if (!rep.ok()) {
        std::ostringstream os;
        os << "Lax matrix violates its Tyurin constraints:";
        for (const auto& v : rep.violations) os << ' ' << v.clause << '(' << v.defect << ')';
        throw Error(Errc::InvalidArgument, os.str());
    }
    return *rep.lax;
}

json to_json(const AnsatzSpec& a) {
    json e = json::array();
    for (const auto& x : a.entries) e.push_back(json{{"place", to_json(x.p)}, {"n", x.n}, {"m", x.m}});
    return e;
}

AnsatzSpec ansatz_from(const json& j) {
    AnsatzSpec a;
    const json& arr = j.is_object() ? need(j, "entries") : j;
    if (!arr.is_array() || arr.empty()) bad("ansatz needs at least one (place, n, m) entry");
    for (const auto& e : arr) {
        AnsatzEntry x;
        x.p = e.contains("place") ? place_from(e["place"]) : Place::infinity();
        x.n = need(e, "n").get<int>();
        x.m = need(e, "m").get<int>();
        if (x.n < 1) bad("ansatz n must be >= 1");
        a.entries.push_back(x);
    }
    if (j.is_object() && j.contains("p0")) a.p0 = place_from(j["p0"]);
    return a;
}

json trajectory_to_json(const Trajectory& tr) {
    json j;
    json s = json::array();
    for (const auto& st : tr.samples)
        s.push_back(json{{"t", st.t}, {"regime", st.regime == FlowRegime::FixedPole ? "fixed_pole" : "moving_pole"}, {"lax", lax_to_json(st.L)}});
    j["samples"] = s;
    json d = json::array();
    for (const auto& st : tr.steps)
        d.push_back(json{{"t", st.t}, {"dt", st.dt}, {"constraint_defect", st.constraint_defect}, {"post_defect", st.post_defect}, {"fit_residual", st.fit_residual}});
    j["steps"] = d;
    j["cumulative_defect"] = tr.cumulative_defect;
    j["rejections"] = tr.rejections;
    return j;
}

Trajectory trajectory_from(const json& j) {
    Trajectory tr;
    for (const auto& s : need(j, "samples")) {
        FlowState st;
        st.t = need(s, "t").get<double>();
        st.regime = s.value("regime", std::string("fixed_pole")) == "moving_pole" ? FlowRegime::MovingPole : FlowRegime::FixedPole;
        st.L = lax_from(need(s, "lax"));
        tr.samples.push_back(std::move(st));
    }
    if (j.contains("steps"))
        for (const auto& s : j["steps"])
            tr.steps.push_back({s.value("t", 0.0), s.value("dt", 0.0), s.value("constraint_defect", 0.0), s.value("post_defect", 0.0), s.value("fit_residual", 0.0)});
    tr.cumulative_defect = j.value("cumulative_defect", 0.0);
    tr.rejections = j.value("rejections", 0);
    if (tr.samples.empty()) bad("trajectory has no samples");
    return tr;
}

std::string dump(const json& j, int indent) {
    std::string out;
    dump_rec(j, indent, 0, out);
    out += "\n";
    return out;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::Configuration, "cannot write " + p.string());
    f << s;
}

json read_json(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) bad("cannot read " + p.string());
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        bad("malformed JSON in " + p.string() + ": " + e.what());
    }
}

std::string Table::csv() const {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    char buf[40];
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", r[i]);
            out += (i ? "," : "");
            out += buf;
        }
        out += "\n";
    }
    return out;
}

json Table::as_json() const {
    json rs = json::array();
    for (const auto& r : rows) {
        json o;
        for (size_t i = 0; i < header.size() && i < r.size(); ++i) o[header[i]] = r[i];
        rs.push_back(o);
    }
    return rs;
}

}  // namespace laxflow::io
