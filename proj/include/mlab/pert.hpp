#pragma once

#include "mlab/rational.hpp"

#include <map>
#include <random>
#include <string>
#include <utility>

namespace mlab {

// Bivariate polynomial over Q, sparse: (i,j) -> coefficient of x^i y^j.
using Poly2 = std::map<std::pair<int, int>, Rat>;

// Largest accepted total degree for perturbation monomials.
inline constexpr int kMaxMonomialDegree = 12;

// A piecewise polynomial perturbation of the Hamiltonian field: the vector
// field gains eps*(p,q) with (p,q) = (p_plus,q_plus) in y > 0 and
// (p_minus,q_minus) in y < 0.  n bounds the total degree of all monomials.
struct PerturbationSpec {
    int n = 0;
    Poly2 p_plus, q_plus, p_minus, q_minus;
};

// JSON wire format:
// {"n":3,"plus":{"p":[[i,j,"c"],...],"q":[...]},"minus":{"p":[...],"q":[...]}}
// Coefficients are strings ("3/4", "0.25", "-1e-2") or integer literals;
// noninteger JSON numbers are rejected to keep the input exact.
PerturbationSpec perturbation_from_json(const std::string& text);
std::string perturbation_to_json(const PerturbationSpec& ps);

// Dense random perturbation with small rational coefficients; deterministic
// for a given engine state.
PerturbationSpec random_perturbation(std::mt19937_64& rng, int n);

// Scale all four polynomials by c.
PerturbationSpec scale_perturbation(const PerturbationSpec& ps, const Rat& c);

// Collapse the piecewise line integral of q dx - p dy over the two arcs into
// a single combination  M(h) = sum_{I,J} rho_{I,J} J_{I,J}(h)  of upper-arc
// basic integrals.  Uses the exact boundary identities on the switching line:
// dy-terms integrate by parts to dx-terms (boundary terms vanish since both
// arc ends sit on y = 0), and lower-arc integrals fold to upper-arc ones by
// the y -> -y symmetry of the oval:
//   rho_{I,J} = [b+ + (-1)^{J+1} b-]_{I,J}
//             + ((I+1)/J) [a+ + (-1)^{J+1} a-]_{I+1,J-1}   (J >= 1)
//   rho_{I,0} = b+_{I,0} - b-_{I,0}
// where a are p-coefficients and b are q-coefficients.
Poly2 rho_assembly(const PerturbationSpec& ps);

} // namespace mlab
