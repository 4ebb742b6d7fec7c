#pragma once

#include "mlab/family.hpp"
#include "mlab/pert.hpp"
#include "mlab/quadrature.hpp"

#include <vector>

namespace mlab {

// Direct simulation of the piecewise field
//   x' = H_y(x,y) + eps p(x,y),   y' = -H_x(x,y) + eps q(x,y),
// with (p,q) = (p+,q+) for y > 0 and (p-,q-) for y < 0, switching on y = 0.

struct TrajectorySample {
    long double t, x, y;
};

struct SwitchEvent {
    long double t, x;
};

struct Trajectory {
    std::vector<TrajectorySample> samples; // one per accepted step
    std::vector<SwitchEvent> events;       // y = 0 crossings, in time order
    long long steps = 0;
    long long rejected = 0;
};

inline constexpr long double kMaxEps = 0.05L;        // largest |eps| accepted
inline constexpr long double kEventTolT = 1e-12L;    // crossing localized in t
inline constexpr long double kBlowupNorm = 1e6L;     // safety region bound
inline constexpr long long kMaxEvents = 1000000;     // stall guard

// Flow from (x0, y0) until t_max, or until max_events y=0 crossings have
// been resolved (max_events < 0: no event cap).  A start on y = 0 flows
// into the upper half plane.  Crossings are transversal in the annuli and
// are localized by bisection of a single embedded step to kEventTolT.
// Throws Blowup outside the safety region, EventStall past the event
// budget, NonConvergence when the adaptive step collapses, BadInput for
// |eps| > kMaxEps or a start where the field vanishes.
Trajectory flow_piecewise(const FamilyCase& fc, const PerturbationSpec& ps, long double eps,
                          long double x0, long double y0, long double t_max,
                          long long max_events = -1);

// Energy displacement after one full piecewise turn from the left oval end
// A(h): flow through y > 0 to the next crossing, back through y < 0, and
// report H(end) - H(start).  First-order theory makes this proportional to
// eps * M(h) up to a fixed nonvanishing factor.
// pre: h interior with a 0.05*length margin; eps = 0 (unperturbed closure
// check) or |eps| in [1e-4, 1e-2].
long double displacement_map(const FamilyCase& fc, const Annulus& an,
                             const PerturbationSpec& ps, long double eps, long double h);

// Sign changes of the displacement map over a uniform h-grid (same margin),
// each refined by bisection in h.  Returns the detected periodic-orbit
// energies, sorted.
std::vector<long double> detect_limit_cycles(const FamilyCase& fc, const Annulus& an,
                                             const PerturbationSpec& ps, long double eps,
                                             int grid = 40);

} // namespace mlab
