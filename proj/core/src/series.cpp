#include "laxflow/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace laxflow {

LaurentSeries LaurentSeries::constant(cplx c, int prec) {
    if (prec <= 0) return LaurentSeries(prec, {});
    std::vector<cplx> v(static_cast<size_t>(prec), cplx{});
    v[0] = c;
    return LaurentSeries(0, std::move(v));
}

LaurentSeries LaurentSeries::variable(int prec) {
    if (prec <= 1) return LaurentSeries(prec, {});
    std::vector<cplx> v(static_cast<size_t>(prec - 1), cplx{});
    v[0] = 1.0;
    return LaurentSeries(1, std::move(v));
}

cplx LaurentSeries::operator[](int k) const {
    if (k >= prec()) throw std::out_of_range("LaurentSeries: coefficient beyond precision");
    if (k < val_) return {};
    return c_[static_cast<size_t>(k - val_)];
}

LaurentSeries LaurentSeries::truncated(int p) const {
    if (p >= prec()) return *this;
    if (p <= val_) return LaurentSeries(p, {});
    return LaurentSeries(val_, std::vector<cplx>(c_.begin(), c_.begin() + (p - val_)));
}

LaurentSeries LaurentSeries::stripped(double abs_cut) const {
    size_t i = 0;
    while (i < c_.size() && std::abs(c_[i]) <= abs_cut) ++i;
    return LaurentSeries(val_ + static_cast<int>(i), std::vector<cplx>(c_.begin() + static_cast<long>(i), c_.end()));
}

double LaurentSeries::max_abs() const {
    double m = 0.0;
    for (cplx c : c_) m = std::max(m, std::abs(c));
    return m;
}

LaurentSeries LaurentSeries::operator+(const LaurentSeries& o) const {
    int v = std::min(val_, o.val_), p = std::min(prec(), o.prec());
    if (p <= v) return LaurentSeries(p, {});
    std::vector<cplx> r(static_cast<size_t>(p - v), cplx{});
    for (int k = v; k < p; ++k) r[static_cast<size_t>(k - v)] = (*this)[k] + o[k];
    return LaurentSeries(v, std::move(r));
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& o) const { return *this + (-o); }

LaurentSeries LaurentSeries::operator*(const LaurentSeries& o) const {
    int v = val_ + o.val_;
    int p = std::min(prec() + o.val_, o.prec() + val_);
    if (p <= v) return LaurentSeries(p, {});
    size_t n = static_cast<size_t>(p - v);
    std::vector<cplx> r(n, cplx{});
    for (size_t i = 0; i < c_.size() && i < n; ++i) {
        if (c_[i] == cplx{}) continue;
        for (size_t j = 0; j < o.c_.size() && i + j < n; ++j) r[i + j] += c_[i] * o.c_[j];
    }
    return LaurentSeries(v, std::move(r));
}

LaurentSeries LaurentSeries::operator*(cplx s) const {
    std::vector<cplx> r = c_;
    for (cplx& c : r) c *= s;
    return LaurentSeries(val_, std::move(r));
}

LaurentSeries LaurentSeries::inverse() const {
    if (c_.empty() || c_[0] == cplx{}) throw std::domain_error("LaurentSeries::inverse: zero leading coefficient");
    size_t n = c_.size();
    std::vector<cplx> r(n, cplx{});
    cplx inv0 = 1.0 / c_[0];
    r[0] = inv0;
    for (size_t k = 1; k < n; ++k) {
        cplx acc{};
        for (size_t i = 1; i <= k; ++i) acc += c_[i] * r[k - i];
        r[k] = -acc * inv0;
    }
    return LaurentSeries(-val_, std::move(r));
}

LaurentSeries LaurentSeries::sqrt_with_leading(cplx lead) const {
    if (val_ % 2 != 0) throw std::domain_error("LaurentSeries::sqrt: odd valuation");
    if (c_.empty()) return LaurentSeries(prec() / 2, {});
    size_t n = c_.size();
    std::vector<cplx> r(n, cplx{});
    r[0] = lead;
    for (size_t k = 1; k < n; ++k) {
        cplx acc = c_[k];
        for (size_t i = 1; i < k; ++i) acc -= r[i] * r[k - i];
        r[k] = acc / (2.0 * lead);
    }
    return LaurentSeries(val_ / 2, std::move(r));
}

LaurentSeries LaurentSeries::derivative() const {
    std::vector<cplx> r;
    r.reserve(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r.push_back(c_[i] * static_cast<double>(val_ + static_cast<int>(i)));
    // d/dw drops the w^0 term; val shifts by one.
    LaurentSeries out(val_ - 1, std::move(r));
    return out;
}

LaurentSeries LaurentSeries::shifted(int k) const { return LaurentSeries(val_ + k, c_); }

LaurentSeries LaurentSeries::compose(const Poly& p, const LaurentSeries& x) {
    // Constants carry enough precision that the product with x decides it.
    int big = x.prec() - std::min(0, x.val()) + 1;
    if (p.is_zero()) return LaurentSeries::constant(cplx{}, std::max(1, x.prec()));
    LaurentSeries acc = LaurentSeries::constant(p.leading(), big);
    for (int k = p.degree() - 1; k >= 0; --k) {
        acc = acc * x;
        acc = acc + LaurentSeries::constant(p.coeff(k), std::max(acc.prec(), big));
    }
    if (p.degree() == 0) acc = acc.truncated(std::max(1, x.prec()));
    return acc;
}

}  // namespace laxflow
