#include "mlab/oval.hpp"

#include "mlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mlab {

namespace {

std::vector<long double> ld_coeffs(const PolyQ& p) {
    std::vector<long double> c(static_cast<size_t>(p.degree() + 1));
    for (int k = 0; k <= p.degree(); ++k) c[static_cast<size_t>(k)] = to_ld(p.coeff(k));
    return c;
}

long double horner(const std::vector<long double>& c, long double x) {
    long double acc = 0.0L;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

// Root of f(x) = H1(x) - h inside [lo, hi] where f changes sign: Newton with
// a maintained bracket and bisection fallback, relative step tolerance.
long double bracketed_newton(const std::vector<long double>& H1c,
                             const std::vector<long double>& dH1c,
                             long double h, long double lo, long double hi) {
    auto f = [&](long double x) { return horner(H1c, x) - h; };
    long double flo = f(lo), fhi = f(hi);
    if (flo == 0.0L) return lo;
    if (fhi == 0.0L) return hi;
    if ((flo > 0) == (fhi > 0))
        fail(ErrorCode::OutsideAnnulus, "endpoint bracket lost its sign change");

    long double x = 0.5L * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        long double fx = f(x);
        if (fx == 0.0L) return x;
        if ((fx > 0) == (flo > 0)) lo = x; else hi = x;
        long double d = horner(dH1c, x);
        long double xn;
        if (d != 0.0L) {
            xn = x - fx / d;
            if (!(xn > lo && xn < hi)) xn = 0.5L * (lo + hi);
        } else {
            xn = 0.5L * (lo + hi);
        }
        long double step = std::abs(xn - x);
        x = xn;
        if (step <= kEndpointNewtonTol * std::max(1.0L, std::abs(x)))
            return x;
    }
    return x;
}

long double march_for_bracket(const std::vector<long double>& H1c, long double h,
                              long double x0, long double dir, long double f_inner) {
    long double step = 0.25L;
    for (int it = 0; it < 200; ++it) {
        long double x = x0 + dir * step;
        long double fx = horner(H1c, x) - h;
        if (fx == 0.0L || (fx > 0) != (f_inner > 0)) return x;
        step *= 2.0L;
    }
    fail(ErrorCode::OutsideAnnulus, "no outward sign change found for oval endpoint");
}

} // namespace

OvalEndpoints oval_endpoints(const FamilyCase& fc, const Annulus& an, const Rat& h) {
    if (!an.contains(h))
        fail(ErrorCode::OutsideAnnulus, "h = " + rat_to_string(h) + " outside annulus");
    return oval_endpoints(fc, an, to_ld(h));
}

OvalEndpoints oval_endpoints(const FamilyCase& fc, const Annulus& an, long double h) {
    if (!(to_ld(an.lo()) < h && h < to_ld(an.hi())))
        fail(ErrorCode::OutsideAnnulus, "h outside annulus");

    std::vector<long double> H1c = ld_coeffs(h_on_axis(fc));
    std::vector<long double> dH1c = ld_coeffs(hx_on_axis(fc));

    long double cx = to_ld(an.center_x);
    long double f_center = horner(H1c, cx) - h;

    // Candidate separators: critical abscissae of H(x,0) plus, for the
    // triangle, the pole of y^2 at x = -1/2 (where H(x,0) is back at the
    // polycycle level 1/6 > h).
    std::vector<long double> seps;
    if (dH1c.size() == 3) {
        long double a = dH1c[2], b = dH1c[1], c = dH1c[0];
        long double disc = b * b - 4 * a * c;
        if (disc >= 0) {
            long double s = std::sqrt(disc);
            seps.push_back((-b - s) / (2 * a));
            seps.push_back((-b + s) / (2 * a));
        }
    } else if (dH1c.size() == 2) {
        seps.push_back(-dH1c[0] / dH1c[1]);
    }
    if (fc.kind == FamilyKind::Triangle) seps.push_back(-0.5L);

    auto bracket_end = [&](long double dir) {
        // nearest separator on side dir of the center abscissa where the
        // level function has the opposite sign; march outward when none
        long double best = 0.0L;
        bool found = false;
        for (long double s : seps) {
            if (dir > 0 ? s <= cx : s >= cx) continue;
            long double fs = horner(H1c, s) - h;
            if ((fs > 0) == (f_center > 0)) continue;
            if (!found || std::abs(s - cx) < std::abs(best - cx)) { best = s; found = true; }
        }
        if (!found) best = march_for_bracket(H1c, h, cx, dir, f_center);
        return best;
    };

    OvalEndpoints e;
    e.xa = bracketed_newton(H1c, dH1c, h, bracket_end(-1.0L), cx);
    e.xb = bracketed_newton(H1c, dH1c, h, cx, bracket_end(+1.0L));
    return e;
}

long double y_squared(const FamilyCase& fc, long double h, long double x) {
    long double num, den;
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        long double l = to_ld(fc.lambda);
        num = h - (l * x * x * x - 3.0L * (l - 1.0L) * x * x + 3.0L * (l - 2.0L) * x);
        den = x;
        break;
    }
    case FamilyKind::Parabolic:
        num = h - (0.5L * x * x - 2.0L * x);
        den = x;
        break;
    case FamilyKind::Triangle:
        num = h - (0.5L * x * x - x * x * x / 3.0L);
        den = 0.5L + x;
        break;
    default:
        fail(ErrorCode::BadInput, "bad family");
    }
    long double y2 = num / den;
    if (y2 < 0.0L) {
        if (y2 < -kRadicandClampTol)
            fail(ErrorCode::NegativeRadicand, "y^2 negative beyond tolerance");
        y2 = 0.0L;
    }
    return y2;
}

long double upper_y(const FamilyCase& fc, long double h, long double x,
                    const OvalEndpoints& ends) {
    long double margin = 1e-12L * std::max(1.0L, std::abs(ends.xb - ends.xa));
    if (x < ends.xa - margin || x > ends.xb + margin)
        fail(ErrorCode::OutsideArc, "x outside the oval span");
    x = std::clamp(x, ends.xa, ends.xb);
    return std::sqrt(y_squared(fc, h, x));
}

long double dx_dh_on_axis(const FamilyCase& fc, long double x) {
    long double d = hx_on_axis(fc).eval_ld(x);
    if (std::abs(d) < kCriticalAbscissaTol)
        fail(ErrorCode::CriticalAbscissa, "H_x(x,0) vanishes at this abscissa");
    return 1.0L / d;
}

long double third_root(const FamilyCase& fc, const OvalEndpoints& ends) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        long double l = to_ld(fc.lambda);
        return 3.0L * (l - 1.0L) / l - ends.xa - ends.xb;
    }
    case FamilyKind::Parabolic:
        return 0.0L; // quadratic level set, no third root
    case FamilyKind::Triangle:
        return 1.5L - ends.xa - ends.xb;
    }
    fail(ErrorCode::BadInput, "bad family");
}

long double rho_factor(const FamilyCase& fc, long double x, long double x3) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        long double l = to_ld(fc.lambda);
        return l * (x - x3) / x;
    }
    case FamilyKind::Parabolic:
        return 0.5L / x;
    case FamilyKind::Triangle:
        return (x3 - x) / (3.0L * (0.5L + x));
    }
    fail(ErrorCode::BadInput, "bad family");
}

} // namespace mlab
