#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace laxflow {

using cplx = std::complex<double>;

/// Dense univariate polynomial over C, coefficients in ascending order.
/// The zero polynomial has no coefficients and degree -1.
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<cplx> coeffs);
    explicit Poly(std::vector<cplx> coeffs);
    static Poly constant(cplx c);
    static Poly monomial(int k, cplx c = 1.0);
    static Poly from_roots(std::span<const cplx> roots);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    cplx coeff(int k) const;
    cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx operator()(cplx x) const;
    /// Sum of |c_k||x|^k, the natural scale for judging |p(x)| against roundoff.
    double magnitude_at(cplx x) const;
    double norm_inf() const;

    Poly derivative() const;
    /// p(x + shift), the Taylor shift.
    Poly shifted(cplx shift) const;
    Poly monic() const;

    /// Drops trailing coefficients below rel * max|c|.
    Poly trimmed(double rel = 1e-14) const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(cplx s);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
    friend Poly operator*(Poly a, cplx s) { return a *= s; }
    friend Poly operator*(cplx s, Poly a) { return a *= s; }
    Poly operator-() const;

    /// Euclidean division; divisor must be nonzero.
    void divmod(const Poly& divisor, Poly& quotient, Poly& remainder) const;
    /// Exact division by (x - r), dropping the remainder.
    Poly deflate(cplx r) const;

    /// Roots from companion-matrix eigenvalues, Newton-polished.
    std::vector<cplx> roots() const;
    /// Roots grouped into clusters within rel_tol*(1+|r|); each cluster is replaced by
    /// its mean polished on the (m-1)-th derivative, m the cluster size.
    std::vector<std::pair<cplx, int>> root_clusters(double rel_tol = 1e-4) const;

    bool approx_equal(const Poly& o, double tol) const;
    std::string str() const;

private:
    void strip_exact_zeros();
    std::vector<cplx> c_;
};

/// Newton polishing of an approximate simple root; stops when the step stalls.
cplx polish_root(const Poly& p, cplx z, int max_iter = 50);

}  // namespace laxflow
