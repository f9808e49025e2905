#include "laxflow/poly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace laxflow {

Poly::Poly(std::initializer_list<cplx> coeffs) : c_(coeffs) { strip_exact_zeros(); }

Poly::Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { strip_exact_zeros(); }

Poly Poly::constant(cplx c) { return Poly(std::vector<cplx>{c}); }

Poly Poly::monomial(int k, cplx c) {
    std::vector<cplx> v(static_cast<size_t>(k) + 1, cplx{});
    v.back() = c;
    return Poly(std::move(v));
}

Poly Poly::from_roots(std::span<const cplx> roots) {
    Poly p = constant(1.0);
    for (cplx r : roots) p *= Poly{-r, 1.0};
    return p;
}

void Poly::strip_exact_zeros() {
    while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
}

cplx Poly::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return {};
    return c_[static_cast<size_t>(k)];
}

cplx Poly::operator()(cplx x) const {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double Poly::magnitude_at(cplx x) const {
    double ax = std::abs(x), acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
    return acc;
}

double Poly::norm_inf() const {
    double m = 0.0;
    for (cplx c : c_) m = std::max(m, std::abs(c));
    return m;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Poly(std::move(d));
}

Poly Poly::shifted(cplx shift) const {
    // Repeated synthetic division gives the Taylor coefficients at `shift`.
    std::vector<cplx> work = c_, out;
    out.reserve(c_.size());
    while (!work.empty()) {
        for (size_t i = work.size() - 1; i > 0; --i) work[i - 1] += shift * work[i];
        out.push_back(work.front());
        work.erase(work.begin());
    }
    return Poly(std::move(out));
}

Poly Poly::monic() const {
    if (c_.empty()) throw std::domain_error("monic: zero polynomial");
    return *this * (1.0 / c_.back());
}

Poly Poly::trimmed(double rel) const {
    double cut = rel * norm_inf();
    std::vector<cplx> v = c_;
    while (!v.empty() && std::abs(v.back()) <= cut) v.pop_back();
    return Poly(std::move(v));
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    strip_exact_zeros();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    strip_exact_zeros();
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        return *this;
    }
    std::vector<cplx> r(c_.size() + o.c_.size() - 1, cplx{});
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    c_ = std::move(r);
    strip_exact_zeros();
    return *this;
}

Poly& Poly::operator*=(cplx s) {
    for (cplx& c : c_) c *= s;
    strip_exact_zeros();
    return *this;
}

Poly Poly::operator-() const { return *this * cplx{-1.0}; }

void Poly::divmod(const Poly& divisor, Poly& quotient, Poly& remainder) const {
    if (divisor.is_zero()) throw std::domain_error("divmod: division by zero polynomial");
    std::vector<cplx> r = c_;
    int dd = divisor.degree();
    if (degree() < dd) {
        quotient = Poly{};
        remainder = *this;
        return;
    }
    std::vector<cplx> q(static_cast<size_t>(degree() - dd + 1), cplx{});
    cplx lead = divisor.leading();
    for (int k = degree() - dd; k >= 0; --k) {
        cplx t = r[static_cast<size_t>(k + dd)] / lead;
        q[static_cast<size_t>(k)] = t;
        for (int j = 0; j <= dd; ++j) r[static_cast<size_t>(k + j)] -= t * divisor.c_[static_cast<size_t>(j)];
    }
    r.resize(static_cast<size_t>(dd));
    quotient = Poly(std::move(q));
    remainder = Poly(std::move(r));
}

Poly Poly::deflate(cplx r) const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> q(c_.size() - 1);
    cplx acc{};
    for (size_t i = c_.size(); i-- > 1;) {
        acc = acc * r + c_[i];
        q[i - 1] = acc;
    }
    return Poly(std::move(q));
}

cplx polish_root(const Poly& p, cplx z, int max_iter) {
    Poly dp = p.derivative();
    double last = std::abs(p(z));
    for (int it = 0; it < max_iter; ++it) {
        cplx d = dp(z);
        if (d == cplx{}) break;
        cplx step = p(z) / d;
        cplx zn = z - step;
        double vn = std::abs(p(zn));
        if (!(vn < last) && std::abs(step) > 1e-15 * (1.0 + std::abs(z))) break;
        z = zn;
        last = vn;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

std::vector<cplx> Poly::roots() const {
    int n = degree();
    if (n < 1) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    cplx lead = leading();
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c_[static_cast<size_t>(i)] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(polish_root(*this, es.eigenvalues()(i)));
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

std::vector<std::pair<cplx, int>> Poly::root_clusters(double rel_tol) const {
    std::vector<std::pair<cplx, int>> out;
    std::vector<std::vector<cplx>> groups;
    for (cplx r : roots()) {
        bool placed = false;
        for (auto& g : groups)
            if (std::abs(g.front() - r) <= rel_tol * (1.0 + std::abs(r))) {
                g.push_back(r);
                placed = true;
                break;
            }
        if (!placed) groups.push_back({r});
    }
    for (const auto& g : groups) {
        cplx mean{};
        for (cplx r : g) mean += r;
        mean /= static_cast<double>(g.size());
        Poly d = *this;
        for (size_t k = 1; k < g.size(); ++k) d = d.derivative();
        cplx pol = polish_root(d, mean);
        if (std::abs(pol - mean) <= rel_tol * (1.0 + std::abs(mean))) mean = pol;
        out.emplace_back(mean, static_cast<int>(g.size()));
    }
    return out;
}

bool Poly::approx_equal(const Poly& o, double tol) const {
    size_t n = std::max(c_.size(), o.c_.size());
    double scale = std::max({1.0, norm_inf(), o.norm_inf()});
    for (size_t i = 0; i < n; ++i)
        if (std::abs(coeff(static_cast<int>(i)) - o.coeff(static_cast<int>(i))) > tol * scale) return false;
    return true;
}

std::string Poly::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == cplx{}) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c_[k].real() << (c_[k].imag() < 0 ? "" : "+") << c_[k].imag() << "i)";
        if (k > 0) os << "x^" << k;
    }
    return os.str();
}

}  // namespace laxflow
