#pragma once

#include "mlab/family.hpp"
#include "mlab/linalg.hpp"
#include "mlab/poly.hpp"
#include "mlab/quadrature.hpp"

#include <utility>
#include <vector>

namespace mlab {

// First-order systems U = A(h) U' satisfied by the generator integrals,
// split by the parity of the y-exponent:
//   cubic families:  U1 = (J00, J10, J02),  U2 = (J01, J11, J21)
//   parabolic:       U1 = (J01, J11),       U2 = (J10, J02)
// The matrices are derived exactly, at construction time, from the reduction
// table plus the derivative identity of the family
//   J_{i,j} = (2/(j+2)) d/dh J_{i+1,j+2}                 (d(y^2)/dh = 1/x)
//   (j+2) J_{i,j} = d/dh [ J_{i,j+2} + 2 J_{i+1,j+2} ]   (d(y^2)/dh = 1/(1/2+x))
// and every entry comes out linear in h (asserted), so A = B h + C with
// constant B, C.
//
// Second-order layer: differentiating U = A U' gives D U'' = S U' with
// D = det A and S = adj(A) (E - A').  For the first block of the cubic
// families the third column of S vanishes identically (asserted), closing a
// 2x2 system for (J00', J10') alone.
struct PFSystem {
    FamilyCase fc;
    std::vector<std::pair<int, int>> block1, block2;
    PolyMat A1, A2; // U_b = A_b U_b'
    PolyQ D1, D2;   // det A_1, det A_2
    PolyMat S1, S2; // D_b U_b'' = S_b U_b'

    // The h-linear split A_b = B h + C.
    MatQ B(int block) const;
    MatQ C(int block) const;
};

PFSystem make_pf_system(const FamilyCase& fc);

// Elliptic / hyperbolic only: the conjugated second block W = T U2 with
// T = [[1,0,0],[0,1,0],[0,s,t]], s = (3/8)(1/lambda - 1), t = 1/4, whose
// third entry is Z = s J11 + t J21.  The second-order matrix
// K = adj(AW) (E - AW') then has an identically zero second column
// (asserted; this also guards the transcription of s and t), closing a
// system for (J01', Z') alone.
struct KSystem {
    Rat s, t;
    PolyMat AW; // W = AW W'
    PolyQ D2;   // det AW
    PolyMat K;  // D2 W'' = K W'
};

KSystem make_k_system(const FamilyCase& fc);

// Triangle only: J11 vanishes identically and the second block collapses to
// a first-order system for V = (J01', J21''):
//   D3 V' = L V,  D3 = 3h(6h-1),  L = [[-(6h-1), 6h-1], [1, -(12h+1)]],
// with the first derivative recovered by J21' = ((6h-1) J21'' + J01') / 2.
struct TriangleStage {
    PolyQ D3;
    PolyMat L;
};

TriangleStage make_triangle_stage();

// Numeric audits at one level, all returning a relative residual.
long double pf_first_residual(const PFSystem& pf, int block, long double h,
                              const QuadratureSettings& qs = {});
long double pf_second_residual(const PFSystem& pf, int block, long double h,
                               const QuadratureSettings& qs = {});
long double k_system_residual(const KSystem& ks, const FamilyCase& fc, long double h,
                              const QuadratureSettings& qs = {});
long double triangle_stage_residual(const TriangleStage& ts, long double h,
                                    const QuadratureSettings& qs = {});

// Independent transcription audit: recover all 2n entries of row r of block b
// from least squares over sampled levels (each level contributes the row
// identity U_r = sum_c (B h + C)[r][c] U_c'), then report the largest
// absolute deviation from the entries actually carried by the system.
long double recover_row_deviation(const PFSystem& pf, int block, int row,
                                  const std::vector<long double>& hs,
                                  const QuadratureSettings& qs = {});

// Ratio dynamics.  Each named ratio om satisfies the scalar equation
//   D om' = c2 om^2 + c1 om + c0
// with polynomial data taken from the matching system above:
//   FirstRatio,  cubic:     om = J10'/J00'   (from S1 rows 1,2)
//   FirstRatio,  parabolic: om = J11/J01     (from adj(A1))
//   SecondRatio, elliptic:  om = Z'/J01'     (from K)
//   SecondRatio, triangle:  om = J21''/J01'  (from the collapsed stage)
enum class RiccatiKind { FirstRatio, SecondRatio };

struct RiccatiForm {
    PolyQ D, c2, c1, c0;
};

RiccatiForm riccati_form(const FamilyCase& fc, RiccatiKind kind);

long double riccati_residual(const FamilyCase& fc, RiccatiKind kind, long double h,
                             const QuadratureSettings& qs = {});

} // namespace mlab
