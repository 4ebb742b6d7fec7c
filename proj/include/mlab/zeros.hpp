#pragma once

#include "mlab/family.hpp"
#include "mlab/pert.hpp"
#include "mlab/quadrature.hpp"
#include "mlab/reduction.hpp"

#include <vector>

namespace mlab {

// Direct line-integral evaluation of M(h).  q dx monomials integrate as raw
// J_{i,j} quadratures; p dy monomials fold through integration by parts
// (x^i y^j dy -> -(i/(j+1)) x^{i-1} y^{j+1} dx, boundary-free because the
// arcs end on y = 0, and the i = 0 terms vanish outright); lower-arc pieces
// fold by the parity of the y power.  No recurrence or generator reduction
// is involved, so this is a route independent of the symbolic pipeline.
long double melnikov_numeric(const FamilyCase& fc, const Annulus& an,
                             const PerturbationSpec& ps, long double h,
                             const QuadratureSettings& qs = {});

// Value of a generator combination at one level by quadrature.
long double combination_value(const FamilyCase& fc, const Annulus& an,
                              const GeneratorCombination& gc, long double h,
                              const QuadratureSettings& qs = {});

// Generator values tabulated over an h-grid.  Points are evaluated
// independently, in parallel through OpenMP when requested (MLAB_THREADS
// caps the team size).  A point whose quadrature fails is retried once with
// a deeper refinement budget and dropped (ok = 0) when it fails again.  The
// parallel and serial paths produce bitwise-identical tables.
struct GeneratorGrid {
    std::vector<long double> hs;
    std::vector<std::vector<long double>> values; // values[k][g] at hs[k]
    std::vector<char> ok;
    int dropped = 0;
};
GeneratorGrid generator_grid(const FamilyCase& fc, const Annulus& an,
                             const std::vector<long double>& hs,
                             const QuadratureSettings& qs = {}, bool parallel = true);

// Thread count for grid evaluation: MLAB_THREADS when set and positive,
// otherwise the OpenMP default (1 without OpenMP).
int grid_threads();

// Fraction of the annulus length excluded as a safety margin at both ends
// of every scan.
inline constexpr long double kScanMarginFrac = 1e-4L;

// A strict local minimum of |M| on the grid with no adjacent sign change is
// flagged as a tangency suspect when it dips below this fraction of the
// largest |M| seen on the grid.
inline constexpr long double kTangencyRel = 1e-5L;

enum class ZeroKind { SignChange, TangencySuspect };

struct ZeroBracket {
    long double lo = 0, hi = 0; // bracket, interior to the scanned interval
    long double h_star = 0;     // refined zero, or the dip location
    ZeroKind kind = ZeroKind::SignChange;
};

struct ZeroReport {
    Annulus annulus;
    int grid_size = 0;
    std::vector<ZeroBracket> zeros; // sorted by h, pairwise disjoint
    int count_sign_changes = 0;     // suspects are reported, never counted
    int bound = 0;
    bool within_bound = false;
    int dropped_points = 0; // grid points dropped after a failed retry
};

// Uniform-grid sign scan of M over the annulus (margins excluded), with
// every sign change refined by bisection to refine_tol in h.  M is
// evaluated through the symbolic generator combination; each bracket is one
// grid cell.  The bound column uses the perturbation degree, raised to the
// family's minimum theorem degree when the input is of lower degree (a low
// degree perturbation is also one of the minimum degree, with zero top
// coefficients).
ZeroReport scan_zeros(const FamilyCase& fc, const Annulus& an, const PerturbationSpec& ps,
                      int grid_size = 2000, long double refine_tol = 1e-10L,
                      const QuadratureSettings& qs = {});

// Zero-count bound for degree-n perturbations: 25n+161 for the elliptic and
// hyperbolic cases (n >= 3), 24n+126 for the triangle (n >= 3), 12n+24 for
// the parabolic (n >= 2).  Throws DegreeTooSmall below the threshold.
int theorem_bound(const FamilyCase& fc, int n);

} // namespace mlab
