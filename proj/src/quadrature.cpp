#include "mlab/quadrature.hpp"

#include "mlab/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <type_traits>

namespace mlab {

namespace {

long double ipow(long double b, int e) {
    long double r = 1.0L;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

} // namespace

const std::pair<std::vector<long double>, std::vector<long double>>&
gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<long double>, std::vector<long double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Roots of the Legendre polynomial P_n by Newton from the Chebyshev-like
    // initial guess; weights 2 / ((1-x^2) P_n'(x)^2).
    std::vector<long double> xs(static_cast<size_t>(n)), ws(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        long double x = std::cos(3.14159265358979323846264338327950288L *
                                 (static_cast<long double>(k) + 0.75L) /
                                 (static_cast<long double>(n) + 0.5L));
        long double dp = 0.0L;
        for (int it2 = 0; it2 < 100; ++it2) {
            long double p0 = 1.0L, p1 = x;
            for (int m = 2; m <= n; ++m) {
                long double p2 = ((2.0L * m - 1.0L) * x * p1 - (m - 1.0L) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        xs[static_cast<size_t>(n - 1 - k)] = x;
        ws[static_cast<size_t>(n - 1 - k)] = 2.0L / ((1.0L - x * x) * dp * dp);
    }
    auto [pos, ok] = cache.emplace(n, std::make_pair(std::move(xs), std::move(ws)));
    (void)ok;
    return pos->second;
}

namespace {

constexpr long double kHalfPi = 1.57079632679489661923132169163975144L;

// Composite Gauss-Legendre over [0, pi/2] with doubling panel refinement.
// F maps theta to the integrand value (long double or Jet3).
template <class T, class F>
T integrate_panels(const F& f, const QuadratureSettings& qs) {
    const auto& [nodes, weights] = gauss_legendre(qs.nodes);
    auto pass = [&](int panels) {
        T total{};
        for (int p = 0; p < panels; ++p) {
            long double a = kHalfPi * p / panels;
            long double b = kHalfPi * (p + 1) / panels;
            long double mid = 0.5L * (a + b), half = 0.5L * (b - a);
            T sum{};
            for (size_t k = 0; k < nodes.size(); ++k)
                sum += f(mid + half * nodes[k]) * weights[k];
            total += sum * half;
        }
        return total;
    };
    auto close_enough = [&](long double prev, long double cur) {
        return std::abs(cur - prev) <= qs.rel_tol * std::max(1.0L, std::abs(cur));
    };

    T prev = pass(1);
    int panels = 1;
    for (int r = 0; r < qs.max_refinements; ++r) {
        panels *= 2;
        T cur = pass(panels);
        bool ok;
        if constexpr (std::is_same_v<T, Jet3>) {
            ok = close_enough(prev.v, cur.v) && close_enough(prev.d1, cur.d1) &&
                 close_enough(prev.d2, cur.d2) && close_enough(prev.d3, cur.d3);
        } else {
            ok = close_enough(prev, cur);
        }
        if (ok) return cur;
        prev = cur;
    }
    fail(ErrorCode::NonConvergence, "oval quadrature did not reach tolerance");
}

void check_level(const Annulus& an, long double h) {
    if (!(h > to_ld(an.lo()) + kAnnulusMargin && h < to_ld(an.hi()) - kAnnulusMargin))
        fail(ErrorCode::OutsideAnnulus, "h too close to or outside the annulus ends");
}

void check_indices(int i, int j) {
    if (i < 0 || j < 0 || i > 40 || j > 40)
        fail(ErrorCode::UnsupportedIndex, "monomial exponents out of range");
}

// Jet of an oval endpoint as h varies: repeated implicit differentiation of
// H(X(h), 0) = h gives X' = 1/H1', X'' = -H1'' X'^3,
// X''' = -(H1''' X'^3 + 3 H1'' X' X'') X'.
Jet3 endpoint_jet(const FamilyCase& fc, long double x) {
    PolyQ H1 = h_on_axis(fc);
    PolyQ d1 = H1.derivative(), d2 = d1.derivative(), d3 = d2.derivative();
    long double h1 = d1.eval_ld(x), h2 = d2.eval_ld(x), h3 = d3.eval_ld(x);
    Jet3 X;
    X.v = x;
    X.d1 = 1.0L / h1;
    X.d2 = -h2 * X.d1 * X.d1 * X.d1;
    X.d3 = -(h3 * X.d1 * X.d1 * X.d1 + 3.0L * h2 * X.d1 * X.d2) * X.d1;
    return X;
}

Jet3 rho_jet(const FamilyCase& fc, const Jet3& x, const Jet3& x3) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic:
        return (x - x3) * to_ld(fc.lambda) / x;
    case FamilyKind::Parabolic:
        return Jet3::constant(0.5L) / x;
    case FamilyKind::Triangle:
        return (x3 - x) / ((x + Jet3::constant(0.5L)) * 3.0L);
    }
    fail(ErrorCode::BadInput, "bad family");
}

Jet3 third_root_jet(const FamilyCase& fc, const Jet3& xa, const Jet3& xb) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        long double l = to_ld(fc.lambda);
        return Jet3::constant(3.0L * (l - 1.0L) / l) - xa - xb;
    }
    case FamilyKind::Parabolic:
        return Jet3::constant(0.0L);
    case FamilyKind::Triangle:
        return Jet3::constant(1.5L) - xa - xb;
    }
    fail(ErrorCode::BadInput, "bad family");
}

// rho^(m/2) for integer m >= -1 (half powers via jet_sqrt).
Jet3 rho_half_power(const Jet3& rho, int m) {
    if (m == -1) return Jet3::constant(1.0L) / jet_sqrt(rho);
    if (m % 2 == 0) return jet_pow(rho, m / 2);
    return jet_pow(rho, m / 2) * jet_sqrt(rho);
}

// Upper-arc integral of x^i y^m dx in jet arithmetic, m >= -1.
Jet3 arc_power_integral(const FamilyCase& fc, const OvalEndpoints& ends,
                        int i, int m, const QuadratureSettings& qs) {
    Jet3 xa = endpoint_jet(fc, ends.xa);
    Jet3 xb = endpoint_jet(fc, ends.xb);
    Jet3 L = xb - xa;
    Jet3 x3 = third_root_jet(fc, xa, xb);

    auto f = [&](long double theta) -> Jet3 {
        long double st = std::sin(theta), ct = std::cos(theta);
        long double s2 = st * st;
        Jet3 x = xa + L * s2;
        Jet3 rho = rho_jet(fc, x, x3);
        return jet_pow(x, i) * jet_pow(L, m + 1) * rho_half_power(rho, m) *
               (2.0L * ipow(st * ct, m + 1));
    };
    return integrate_panels<Jet3>(f, qs);
}

} // namespace

Jet3 j_integral_jet(const FamilyCase& fc, const Annulus& an, long double h,
                    int i, int j, const QuadratureSettings& qs) {
    check_indices(i, j);
    check_level(an, h);
    OvalEndpoints ends = oval_endpoints(fc, an, h);
    if (j == 0) {
        Jet3 xa = endpoint_jet(fc, ends.xa);
        Jet3 xb = endpoint_jet(fc, ends.xb);
        return (jet_pow(xb, i + 1) - jet_pow(xa, i + 1)) * (1.0L / (i + 1.0L));
    }
    return arc_power_integral(fc, ends, i, j, qs);
}

long double j_integral(const FamilyCase& fc, const Annulus& an, long double h,
                       int i, int j, const QuadratureSettings& qs) {
    return j_integral_jet(fc, an, h, i, j, qs).v;
}

long double j_integral(const FamilyCase& fc, const Annulus& an, const Rat& h,
                       int i, int j, const QuadratureSettings& qs) {
    return j_integral(fc, an, to_ld(h), i, j, qs);
}

long double j_derivative(const FamilyCase& fc, const Annulus& an, long double h,
                         int i, int j, const QuadratureSettings& qs) {
    check_indices(i, j);
    check_level(an, h);
    OvalEndpoints ends = oval_endpoints(fc, an, h);
    if (j == 0)
        return ipow(ends.xb, i) * dx_dh_on_axis(fc, ends.xb) -
               ipow(ends.xa, i) * dx_dh_on_axis(fc, ends.xa);

    // (j/2) * integral of x^i y^(j-2) dy2/dh dx, evaluated in plain long
    // double as an independent check on the jet route.
    long double xa = ends.xa, xb = ends.xb, L = xb - xa;
    long double x3 = third_root(fc, ends);
    int m = j - 2;
    auto f = [&](long double theta) -> long double {
        long double st = std::sin(theta), ct = std::cos(theta);
        long double x = xa + L * st * st;
        long double rho = rho_factor(fc, x, x3);
        long double rpow;
        if (m == -1)
            rpow = 1.0L / std::sqrt(rho);
        else if (m % 2 == 0)
            rpow = ipow(rho, m / 2);
        else
            rpow = ipow(rho, m / 2) * std::sqrt(rho);
        long double w = (fc.kind == FamilyKind::Triangle) ? 1.0L / (0.5L + x) : 1.0L / x;
        return ipow(x, i) * ipow(L, m + 1) * rpow * 2.0L * ipow(st * ct, m + 1) * w;
    };
    return 0.5L * j * integrate_panels<long double>(f, qs);
}

long double lower_arc_integral(const FamilyCase& fc, const Annulus& an, long double h,
                               int i, int j, LowerArcMode mode,
                               const QuadratureSettings& qs) {
    check_indices(i, j);
    if (mode == LowerArcMode::Symmetry) {
        long double J = j_integral(fc, an, h, i, j, qs);
        return (j % 2 == 0) ? -J : J; // (-1)^(j+1) J
    }
    check_level(an, h);
    OvalEndpoints ends = oval_endpoints(fc, an, h);
    long double xa = ends.xa, xb = ends.xb, L = xb - xa;
    long double x3 = third_root(fc, ends);
    // Traverse from x_B to x_A: x = x_B - L sin^2(theta), y = -upper_y(x).
    auto f = [&](long double theta) -> long double {
        long double st = std::sin(theta), ct = std::cos(theta);
        long double x = xb - L * st * st;
        long double dxdtheta = -2.0L * L * st * ct;
        long double rho = rho_factor(fc, x, x3);
        long double y_upper = L * st * ct * std::sqrt(rho); // (x-xa)(xb-x) = (L st ct)^2
        return ipow(x, i) * ipow(-y_upper, j) * dxdtheta;
    };
    return integrate_panels<long double>(f, qs);
}

const std::vector<std::pair<int, int>>& generator_indices(FamilyKind kind) {
    static const std::vector<std::pair<int, int>> cubic = {
        {0, 0}, {1, 0}, {0, 2}, {0, 1}, {1, 1}, {2, 1}};
    static const std::vector<std::pair<int, int>> parabolic = {
        {0, 1}, {1, 1}, {1, 0}, {0, 2}};
    return kind == FamilyKind::Parabolic ? parabolic : cubic;
}

std::vector<Jet3> generator_vector(const FamilyCase& fc, const Annulus& an,
                                   long double h, const QuadratureSettings& qs) {
    std::vector<Jet3> out;
    for (auto [i, j] : generator_indices(fc.kind))
        out.push_back(j_integral_jet(fc, an, h, i, j, qs));
    return out;
}

} // namespace mlab
