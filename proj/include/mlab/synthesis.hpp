#pragma once

#include "mlab/family.hpp"
#include "mlab/pf.hpp"
#include "mlab/poly.hpp"
#include "mlab/reduction.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mlab {

// From the generator form M = sum c_g J_g, rewrite M over the derivative
// basis (J00', J10', J02', J01', J11', J21') using U_b = A_b U_b':
// the odd and even blocks each turn into a row-vector-times-matrix product.
// Cubic-level families only; the parabolic case has its own reduced form.
std::vector<PolyQ> jprime_expand(const PFSystem& pf, const std::vector<PolyQ>& c);

// Coefficients of M and of M' over the same derivative basis
// (M' adds the c' terms back on the diagonal).
struct JPrimeForms {
    std::vector<PolyQ> M, Mp;
};
JPrimeForms melnikov_jprime_forms(const PFSystem& pf, const GeneratorCombination& gc);

// A function written over labeled derivative-basis elements with polynomial
// parts and one cleared denominator:
//   value(h) = (1 / denominator(h)) * sum_k parts[k](h) * basis_k(h).
// The first phi1_count labels form the two-generator piece the annihilating
// operator targets; the rest is the even-block remainder.
struct ReducedForm {
    FamilyKind kind;
    std::vector<std::string> labels;
    std::vector<PolyQ> parts;
    PolyQ denominator{Rat(1)};
    int phi1_count = 2;

    std::vector<PolyQ> phi1() const {
        return {parts.begin(), parts.begin() + phi1_count};
    }
    std::vector<PolyQ> phi2() const {
        return {parts.begin() + phi1_count, parts.end()};
    }
};

// Eliminate the J02' slot between M and M'.  With gamma1 the J02'
// coefficient of the M' expansion and gamma2 that of the M expansion,
//   gamma1 M - gamma2 M' = F1
// falls in the span of (J00', J10', J01', J11', J21'); F1 carries those
// five coefficients.  When both gammas vanish identically M never loads
// the eliminated slot: the result is flagged degenerate and F1 is the
// gamma-free direct expansion of M itself (zero for M = 0).
struct EliminationResult {
    PolyQ gamma1, gamma2;
    bool degenerate = false;
    ReducedForm F1;
};
EliminationResult eliminate_and_form_F1(const PFSystem& pf, const GeneratorCombination& gc);

// Numeric audit of gamma1 M - gamma2 M' = F1 . (J')  at one level.
long double elimination_identity_residual(const PFSystem& pf, const GeneratorCombination& gc,
                                          const EliminationResult& el, long double h,
                                          const QuadratureSettings& qs = {});

// Parabolic analog of the elimination output: M itself in reduced labels
//   M = alpha J01 + beta J11 + rho1 J10'' + rho2 J02',
// using the elementary chain J10 = -(2h+4)^2 J10'',
// J02 = -(h+2)(2h+4) J10'' + h J02'.
ReducedForm reduced_melnikov_form(const FamilyCase& fc, const GeneratorCombination& gc);

// Residual of a ReducedForm against the direct generator sum of the source
// combination, both by quadrature, restricted to what the form represents
// (the full M for the parabolic reduced form, the even block for R-forms).
long double reduced_form_residual(const FamilyCase& fc, const GeneratorCombination& gc,
                                  const ReducedForm& rf, long double h,
                                  const QuadratureSettings& qs = {});

// Ceilings for the F1 coefficient degrees as a function of n (cubic only).
std::vector<int> f1_degree_ceilings(FamilyKind kind, int n);

// Order cap m2 for the annihilator coefficients: deg P2 <= m2,
// deg P1 <= m2-1, deg P0 <= m2-2.
int synthesis_order(FamilyKind kind, int n);

// A second-order operator L = P2 d^2/dh^2 + P1 d/dh + P0 annihilating
// Phi1 = alpha v1 + beta v2, where (v1, v2) is the closed pair of the
// family:
//   cubic:     (J00', J10')  with  D1 (v1,v2)' = G (v1,v2),  G from S1
//   parabolic: (J01,  J11)   with  D1 (v1,v2)' = G (v1,v2),  G = adj(A1)
// Annihilation is equivalent to two polynomial identities
//   P2 N2x + P1 D1 N1x + P0 D1^2 alpha = 0   (and the y-analog)
// whose coefficient equations form a linear system in the coefficients of
// (P2, P1, P0); rows run to the actual degrees of the three products.  The
// returned solution is deterministic: smallest P2 degree with a nonempty
// kernel, then the lexicographically smallest of the normalized kernel
// basis vectors (coprime integer coefficients, leading P2 coefficient
// positive).  Throws NoKernel when no degree admits one.
struct Annihilator {
    PolyQ P2, P1, P0;
    int m2 = 0;
    int rows = 0, cols = 0; // dimensions of the full synthesis system
    int kernel_dim = 0;     // nullity of the full system
    int min_deg_p2 = 0;
};

Annihilator synthesize_L(const FamilyCase& fc, const PolyQ& alpha, const PolyQ& beta, int m2);
// Convenience: alpha, beta taken from the phi1 part of a reduced form.
Annihilator synthesize_L(const FamilyCase& fc, const ReducedForm& rf, int m2);

// |P2 Phi1'' + P1 Phi1' + P0 Phi1| / max(|P2 Phi1''|, |P1 Phi1'|, |P0 Phi1|,
// tiny) with Phi1 evaluated from quadrature jets at level h.
long double annihilator_residual(const FamilyCase& fc, const PolyQ& alpha, const PolyQ& beta,
                                 const Annihilator& L, long double h,
                                 const QuadratureSettings& qs = {});

// The remainder R = L(phi2 part of rf), computed symbolically: the phi2
// labels are first converted to the family's closed derivative-chain basis,
//   elliptic/hyperbolic: (J01', J11', Z')   d/dh via the conjugated system
//   triangle:            (J01', J21'')      via the collapsed stage (the
//                        identically-zero J11' track is dropped)
//   parabolic:           (J10'', J02')      via the elementary chain
// and L is applied with all denominators cleared, so
//   R = (1 / D^2) sum_k parts[k] basis_k,   D the chain denominator.
// The result has phi1_count = 0.
ReducedForm apply_L_to_phi2(const FamilyCase& fc, const ReducedForm& rf, const Annihilator& L);

// Numeric audit: R against P2 phi2'' + P1 phi2' + P0 phi2 by quadrature.
long double apply_L_residual(const FamilyCase& fc, const ReducedForm& rf, const Annihilator& L,
                             const ReducedForm& R, long double h,
                             const QuadratureSettings& qs = {});

// Parabolic elementary-chain identities, audited by quadrature:
//   which = 0:  J10' + (2h+4) J10'' = 0
//   which = 1:  h J02'' - (h+2) J10'' = 0
long double parabolic_chain_residual(long double h, int which,
                                     const QuadratureSettings& qs = {});

// Zero-count cap for F = P0(h) + sum_j Pj(h) sqrt(h - c_j) on an interval
// where every radicand is positive and the c_j are distinct:
//   Z(F) <= k (1 + max_j deg Pj) + deg P0,   deg 0 = -1,
// with k the number of nonzero radical parts (zero Pj drop out of F).
// Throws ZeroPolynomial when everything vanishes.
int sqrt_mix_zero_bound(const PolyQ& P0, const std::vector<std::pair<PolyQ, Rat>>& parts);

} // namespace mlab
