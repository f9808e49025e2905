#pragma once

#include "laxflow/poly.hpp"

#include <vector>

namespace laxflow {

/// Truncated Laurent series sum_{k=val}^{prec-1} c_k w^k.
/// Coefficients at exponents >= prec are unknown, not zero.
class LaurentSeries {
public:
    LaurentSeries() = default;
    LaurentSeries(int val, std::vector<cplx> coeffs) : val_(val), c_(std::move(coeffs)) {}
    /// The constant c known to exponent prec-1.
    static LaurentSeries constant(cplx c, int prec);
    /// The local coordinate w itself, known to exponent prec-1.
    static LaurentSeries variable(int prec);

    int val() const { return val_; }
    int prec() const { return val_ + static_cast<int>(c_.size()); }
    const std::vector<cplx>& coeffs() const { return c_; }
    /// Coefficient of w^k; zero below val, throws at or above prec.
    cplx operator[](int k) const;

    /// Truncates to exponents < prec.
    LaurentSeries truncated(int prec) const;
    /// Drops leading coefficients with |c| <= abs_cut, shifting val up.
    LaurentSeries stripped(double abs_cut) const;
    double max_abs() const;

    LaurentSeries operator+(const LaurentSeries& o) const;
    LaurentSeries operator-(const LaurentSeries& o) const;
    LaurentSeries operator*(const LaurentSeries& o) const;
    LaurentSeries operator*(cplx s) const;
    LaurentSeries operator-() const { return *this * cplx{-1.0}; }
    /// Multiplicative inverse; the leading coefficient must be nonzero.
    LaurentSeries inverse() const;
    /// Square root with leading coefficient `lead` (lead^2 must match); val must be even.
    LaurentSeries sqrt_with_leading(cplx lead) const;
    /// d/dw.
    LaurentSeries derivative() const;
    /// w^k * this.
    LaurentSeries shifted(int k) const;

    /// p(x(w)) by Horner.
    static LaurentSeries compose(const Poly& p, const LaurentSeries& x);

private:
    int val_ = 0;
    std::vector<cplx> c_;
};

}  // namespace laxflow
