#pragma once

#include <cmath>

namespace mlab {

// Value together with first three derivatives with respect to the energy
// parameter h.  Arithmetic propagates derivatives exactly (truncated Leibniz
// rules), which gives the quadrature layer analytic h-derivatives of the
// integrals without finite differencing.
struct Jet3 {
    long double v = 0, d1 = 0, d2 = 0, d3 = 0;

    static Jet3 constant(long double c) { return {c, 0, 0, 0}; }
    static Jet3 indep(long double h) { return {h, 1, 0, 0}; }

    Jet3 operator+(const Jet3& o) const { return {v + o.v, d1 + o.d1, d2 + o.d2, d3 + o.d3}; }
    Jet3 operator-(const Jet3& o) const { return {v - o.v, d1 - o.d1, d2 - o.d2, d3 - o.d3}; }
    Jet3 operator-() const { return {-v, -d1, -d2, -d3}; }

    Jet3 operator*(const Jet3& o) const {
        return {v * o.v,
                d1 * o.v + v * o.d1,
                d2 * o.v + 2 * d1 * o.d1 + v * o.d2,
                d3 * o.v + 3 * d2 * o.d1 + 3 * d1 * o.d2 + v * o.d3};
    }
    Jet3 operator*(long double s) const { return {v * s, d1 * s, d2 * s, d3 * s}; }

    Jet3 operator/(const Jet3& o) const {
        Jet3 q;
        q.v = v / o.v;
        q.d1 = (d1 - q.v * o.d1) / o.v;
        q.d2 = (d2 - q.v * o.d2 - 2 * q.d1 * o.d1) / o.v;
        q.d3 = (d3 - q.v * o.d3 - 3 * q.d1 * o.d2 - 3 * q.d2 * o.d1) / o.v;
        return q;
    }

    Jet3& operator+=(const Jet3& o) { *this = *this + o; return *this; }
    Jet3& operator-=(const Jet3& o) { *this = *this - o; return *this; }
};

inline Jet3 operator*(long double s, const Jet3& j) { return j * s; }

inline Jet3 jet_sqrt(const Jet3& f) {
    Jet3 s;
    s.v = std::sqrt(f.v);
    s.d1 = f.d1 / (2 * s.v);
    s.d2 = (f.d2 - 2 * s.d1 * s.d1) / (2 * s.v);
    s.d3 = (f.d3 - 6 * s.d1 * s.d2) / (2 * s.v);
    return s;
}

inline Jet3 jet_pow(Jet3 base, int e) {
    Jet3 r = Jet3::constant(1.0L);
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

} // namespace mlab
