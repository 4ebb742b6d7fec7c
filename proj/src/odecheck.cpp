#include "mlab/odecheck.hpp"

#include "mlab/errors.hpp"
#include "mlab/oval.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

namespace mlab {

namespace {

using State = std::array<long double, 2>;
using Stepper = boost::numeric::odeint::runge_kutta_fehlberg78<State, long double, State,
                                                               long double>;

constexpr long double kOdeTol = 1e-12L;

struct SidePoly {
    std::vector<std::tuple<int, int, long double>> terms;

    explicit SidePoly(const Poly2& p) {
        for (const auto& [ij, c] : p) terms.emplace_back(ij.first, ij.second, to_ld(c));
    }
    long double eval(long double x, long double y) const {
        long double s = 0;
        for (const auto& [i, j, c] : terms) s += c * std::pow(x, i) * std::pow(y, j);
        return s;
    }
};

struct Field {
    const FamilyCase& fc;
    const SidePoly& p;
    const SidePoly& q;
    long double eps;

    void operator()(const State& s, State& d, long double) const {
        d[0] = Hy_ld(fc, s[0], s[1]) + eps * p.eval(s[0], s[1]);
        d[1] = -Hx_ld(fc, s[0], s[1]) + eps * q.eval(s[0], s[1]);
    }
};

int sign_of(long double v) { return (v > 0) - (v < 0); }

} // namespace

Trajectory flow_piecewise(const FamilyCase& fc, const PerturbationSpec& ps, long double eps,
                          long double x0, long double y0, long double t_max,
                          long long max_events) {
    if (std::fabs(eps) > kMaxEps)
        fail(ErrorCode::BadInput, "flow_piecewise: |eps| above the supported band");

    SidePoly pp(ps.p_plus), qp(ps.q_plus), pm(ps.p_minus), qm(ps.q_minus);
    Field up{fc, pp, qp, eps}, down{fc, pm, qm, eps};

    State s{x0, y0};
    {
        State d;
        (y0 >= 0 ? up : down)(s, d, 0);
        if (std::hypot(static_cast<double>(d[0]), static_cast<double>(d[1])) < 1e-12)
            fail(ErrorCode::BadInput, "flow_piecewise: start point has vanishing field");
    }

    Trajectory traj;
    traj.samples.push_back({0, s[0], s[1]});
    // A start on the switching plane flows into the upper half plane.
    int side = (y0 < 0) ? -1 : 1;
    long double t = 0, dt = 1e-3L;
    auto ctrl = boost::numeric::odeint::make_controlled(kOdeTol, kOdeTol, Stepper());
    Stepper plain; // fixed steps for event localization

    while (t < t_max) {
        if (std::fabs(s[0]) > kBlowupNorm || std::fabs(s[1]) > kBlowupNorm)
            fail(ErrorCode::Blowup, "flow_piecewise: trajectory left the safety region");
        const Field& f = (side > 0) ? up : down;
        State s0 = s;
        long double t0 = t;
        dt = std::min(dt, t_max - t);
        auto res = ctrl.try_step(f, s, t, dt);
        if (res == boost::numeric::odeint::fail) {
            ++traj.rejected;
            if (dt < 1e-16L)
                fail(ErrorCode::NonConvergence, "flow_piecewise: step size collapsed");
            continue;
        }
        ++traj.steps;

        if (sign_of(s0[1]) != 0 && sign_of(s[1]) != 0 && sign_of(s[1]) != sign_of(s0[1])) {
            // Crossing inside the accepted step: bisect the step length.
            long double lo = 0, hi = t - t0;
            while (hi - lo > kEventTolT) {
                long double mid = 0.5L * (lo + hi);
                State sm = s0;
                plain.do_step(f, sm, t0, mid);
                if (sign_of(sm[1]) == sign_of(s0[1]))
                    lo = mid;
                else
                    hi = mid;
            }
            State se = s0;
            plain.do_step(f, se, t0, hi); // just past the crossing
            s = se;
            t = t0 + hi;
            traj.events.push_back({t, s[0]});
            side = -side;
            traj.samples.push_back({t, s[0], s[1]});
            if (static_cast<long long>(traj.events.size()) > kMaxEvents)
                fail(ErrorCode::EventStall, "flow_piecewise: event budget exhausted");
            if (max_events >= 0 && static_cast<long long>(traj.events.size()) >= max_events)
                return traj;
            continue;
        }
        traj.samples.push_back({t, s[0], s[1]});
    }
    return traj;
}

long double displacement_map(const FamilyCase& fc, const Annulus& an,
                             const PerturbationSpec& ps, long double eps, long double h) {
    if (eps != 0 && (std::fabs(eps) < 1e-4L || std::fabs(eps) > 1e-2L))
        fail(ErrorCode::BadInput, "displacement_map: eps must be 0 or |eps| in [1e-4, 1e-2]");
    long double alo = to_ld(an.lo()), ahi = to_ld(an.hi());
    long double margin = 0.05L * (ahi - alo);
    if (h < alo + margin || h > ahi - margin)
        fail(ErrorCode::OutsideAnnulus, "displacement_map: h outside the margined annulus");

    OvalEndpoints e = oval_endpoints(fc, an, h);
    long double h0 = hamiltonian_ld(fc, e.xa, 0);
    // Generous time cap: several multiples of any annulus period seen here.
    Trajectory traj = flow_piecewise(fc, ps, eps, e.xa, 0, 1e4L, 2);
    if (traj.events.size() < 2)
        fail(ErrorCode::EventStall, "displacement_map: turn did not close before t_max");
    const TrajectorySample& end = traj.samples.back();
    return hamiltonian_ld(fc, end.x, end.y) - h0;
}

std::vector<long double> detect_limit_cycles(const FamilyCase& fc, const Annulus& an,
                                             const PerturbationSpec& ps, long double eps,
                                             int grid) {
    if (grid < 3) fail(ErrorCode::BadInput, "detect_limit_cycles: grid too small");
    long double alo = to_ld(an.lo()), ahi = to_ld(an.hi());
    long double margin = 0.05L * (ahi - alo);
    long double lo = alo + margin, hi = ahi - margin;

    std::vector<long double> hs(static_cast<size_t>(grid)), dv(static_cast<size_t>(grid));
    std::vector<char> ok(static_cast<size_t>(grid), 0);
    for (int k = 0; k < grid; ++k)
        hs[static_cast<size_t>(k)] = lo + (hi - lo) * k / (grid - 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int k = 0; k < grid; ++k) {
        try {
            dv[static_cast<size_t>(k)] = displacement_map(fc, an, ps, eps, hs[static_cast<size_t>(k)]);
            ok[static_cast<size_t>(k)] = 1;
        } catch (const Error&) {
        }
    }

    std::vector<long double> found;
    const long double htol = 1e-6L * (ahi - alo);
    for (size_t k = 0; k + 1 < hs.size(); ++k) {
        if (!ok[k] || !ok[k + 1]) continue;
        if (sign_of(dv[k]) * sign_of(dv[k + 1]) >= 0) continue;
        long double blo = hs[k], bhi = hs[k + 1], flo = dv[k];
        while (bhi - blo > htol) {
            long double mid = 0.5L * (blo + bhi);
            long double fm;
            try {
                fm = displacement_map(fc, an, ps, eps, mid);
            } catch (const Error&) {
                break;
            }
            if (fm == 0) {
                blo = bhi = mid;
                break;
            }
            if (sign_of(fm) == sign_of(flo)) {
                blo = mid;
                flo = fm;
            } else {
                bhi = mid;
            }
        }
        found.push_back(0.5L * (blo + bhi));
    }
    std::sort(found.begin(), found.end());
    return found;
}

} // namespace mlab
