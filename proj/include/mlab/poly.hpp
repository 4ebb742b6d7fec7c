#pragma once

#include "mlab/rational.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace mlab {

// Univariate polynomial over Q in the variable h.  Coefficients are stored
// low degree first; the zero polynomial has an empty coefficient vector and
// degree() == -1.  Every mutating operation re-trims trailing zeros so that
// degree() is always exact.
class PolyQ {
public:
    PolyQ() = default;
    explicit PolyQ(const Rat& c);
    PolyQ(std::initializer_list<Rat> coeffs_low_first);
    static PolyQ monomial(int degree, const Rat& c);
    static PolyQ variable(); // the polynomial h

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const Rat& coeff(int k) const; // 0 outside stored range
    void set_coeff(int k, const Rat& v);
    const std::vector<Rat>& coeffs() const { return c_; }

    PolyQ operator+(const PolyQ& o) const;
    PolyQ operator-(const PolyQ& o) const;
    PolyQ operator-() const;
    PolyQ operator*(const PolyQ& o) const;
    PolyQ operator*(const Rat& s) const;
    PolyQ& operator+=(const PolyQ& o);
    PolyQ& operator-=(const PolyQ& o);
    bool operator==(const PolyQ& o) const { return c_ == o.c_; }
    bool operator!=(const PolyQ& o) const { return c_ != o.c_; }

    PolyQ derivative() const;
    Rat eval(const Rat& x) const;
    long double eval_ld(long double x) const;

    // Division with remainder: *this = q * d + r, deg r < deg d.
    // Throws ZeroPolynomial when d is zero.
    void divrem(const PolyQ& d, PolyQ& q, PolyQ& r) const;
    PolyQ divide_exact(const PolyQ& d) const; // throws if remainder nonzero

    // Leading-coefficient-1 copy (zero polynomial stays zero).
    PolyQ monic() const;

    std::string to_string(const std::string& var = "h") const;

private:
    void trim();
    std::vector<Rat> c_;
};

PolyQ operator*(const Rat& s, const PolyQ& p);

// Greatest common divisor, returned monic.  gcd(0,0) = 0.
PolyQ poly_gcd(PolyQ a, PolyQ b);

// p with repeated roots collapsed: p / gcd(p, p').
PolyQ squarefree_part(const PolyQ& p);

// Number of distinct real roots of p in the OPEN interval (a, b), by Sturm
// chains over exact rationals.  Roots at the endpoints are excluded: after
// taking the squarefree part, factors (h-a) and (h-b) are divided out before
// the variation count.  Requires a < b; throws ZeroPolynomial on p == 0.
int sturm_count(const PolyQ& p, const Rat& a, const Rat& b);

} // namespace mlab
