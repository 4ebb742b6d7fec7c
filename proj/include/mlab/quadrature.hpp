#pragma once

#include "mlab/family.hpp"
#include "mlab/jet.hpp"
#include "mlab/oval.hpp"

#include <utility>
#include <vector>

namespace mlab {

// Line integrals J_{i,j}(h) = integral over the upper arc of the oval
// {H = h}, oriented from (x_A,0) to (x_B,0), of x^i y^j dx.
//
// The substitution x = x_A + (x_B - x_A) sin^2(theta) maps [0, pi/2] onto
// the arc and absorbs both square-root endpoint singularities:
//   y = (x_B - x_A) sin(theta) cos(theta) sqrt(rho(x)),
// with rho the smooth positive cofactor of y^2 (see oval.hpp), so the
// transformed integrand is analytic.  Composite Gauss-Legendre panels with
// doubling refinement evaluate it; h-derivatives come from running the same
// quadrature in Jet3 arithmetic (the endpoints move with h at rate 1/H_x).

struct QuadratureSettings {
    long double rel_tol = 1e-11L;
    int nodes = 64;          // Gauss-Legendre points per panel
    int max_refinements = 8; // panel count doubles each refinement
};

// Levels closer than this (absolute, in h) to an annulus end are rejected.
inline constexpr long double kAnnulusMargin = 1e-6L;

long double j_integral(const FamilyCase& fc, const Annulus& an, long double h,
                       int i, int j, const QuadratureSettings& qs = {});
long double j_integral(const FamilyCase& fc, const Annulus& an, const Rat& h,
                       int i, int j, const QuadratureSettings& qs = {});

// Value and first three h-derivatives of J_{i,j}.
Jet3 j_integral_jet(const FamilyCase& fc, const Annulus& an, long double h,
                    int i, int j, const QuadratureSettings& qs = {});

// First derivative by the independent differentiate-under-the-integral
// route: d/dh J_{i,j} = (j/2) * integral of x^i y^(j-2) * d(y^2)/dh dx for
// j >= 1 (d(y^2)/dh = 1/x resp. 1/(1/2+x)), and the endpoint-motion formula
// x_B^i / H_x(x_B,0) - x_A^i / H_x(x_A,0) for j = 0.
long double j_derivative(const FamilyCase& fc, const Annulus& an, long double h,
                         int i, int j, const QuadratureSettings& qs = {});

// Integral of x^i y^j dx over the lower (return) arc from (x_B,0) to
// (x_A,0).  Direct mode parameterizes the lower arc and integrates it with
// its own quadrature loop; Symmetry mode folds to (-1)^(j+1) J_{i,j}.
enum class LowerArcMode { Direct, Symmetry };
long double lower_arc_integral(const FamilyCase& fc, const Annulus& an, long double h,
                               int i, int j, LowerArcMode mode,
                               const QuadratureSettings& qs = {});

// The generator monomials (i,j) whose integrals span all J_{i,j} after
// algebraic reduction: six for the cubic-level families, four parabolic.
const std::vector<std::pair<int, int>>& generator_indices(FamilyKind kind);

// Jets of all generators at one level.
std::vector<Jet3> generator_vector(const FamilyCase& fc, const Annulus& an,
                                   long double h, const QuadratureSettings& qs = {});

// Gauss-Legendre nodes/weights on [-1,1], computed once per node count.
const std::pair<std::vector<long double>, std::vector<long double>>&
gauss_legendre(int n);

} // namespace mlab
