#pragma once

#include "mlab/family.hpp"

namespace mlab {

// Geometry of a single closed level oval {H = h} inside a period annulus.
// Each oval crosses the x-axis at exactly two points x_A < x_B and is
// symmetric about the axis, with the upper arc given by y = upper_y(x).

struct OvalEndpoints {
    long double xa, xb;
};

inline constexpr long double kEndpointNewtonTol = 1e-14L; // relative step size
inline constexpr long double kRadicandClampTol = 1e-14L;  // tolerated negative y^2
inline constexpr long double kCriticalAbscissaTol = 1e-13L;

// Axis crossings of the oval at level h.  Solves H(x,0) = h by Newton with a
// maintained bracket; brackets come from the critical abscissae of H(x,0)
// (outward doubling search when unbounded on one side).  Throws
// OutsideAnnulus when h is not strictly inside the annulus.
OvalEndpoints oval_endpoints(const FamilyCase& fc, const Annulus& an, const Rat& h);
OvalEndpoints oval_endpoints(const FamilyCase& fc, const Annulus& an, long double h);

// y^2 on the oval as a function of x, from the closed-form solve of
// H(x, y) = h for y^2.  Negative values within kRadicandClampTol of zero are
// clamped to zero (endpoint roundoff); more negative raises NegativeRadicand.
long double y_squared(const FamilyCase& fc, long double h, long double x);

// Upper-arc height.  Checks x against [xa, xb] and raises OutsideArc beyond
// a small margin.
long double upper_y(const FamilyCase& fc, long double h, long double x,
                    const OvalEndpoints& ends);

// Rate of motion of an axis crossing as h varies: dx/dh = 1 / H_x(x,0).
// Raises CriticalAbscissa when |H_x(x,0)| < kCriticalAbscissaTol.
long double dx_dh_on_axis(const FamilyCase& fc, long double x);

// Factorized form of y^2 used by the quadrature substitution:
//   y^2 = (x - xa)(xb - x) * rho(x)
// with rho smooth and positive on [xa, xb].  third_root returns the constant
// needed by rho (the remaining root of the cubic, or 0 when unused).
long double third_root(const FamilyCase& fc, const OvalEndpoints& ends);
long double rho_factor(const FamilyCase& fc, long double x, long double x3);

} // namespace mlab
