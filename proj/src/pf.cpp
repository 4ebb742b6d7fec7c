#include "mlab/pf.hpp"

#include "mlab/errors.hpp"
#include "mlab/reduction.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

namespace {

// Solve (E - P) U = Q U' for A with U = A U': A = (E - P)^{-1} Q, carried
// out exactly as adj(E - P) Q / det(E - P).  Every entry must divide
// exactly and come out linear in h.
PolyMat solve_first_order(const PolyMat& P, const PolyMat& Q) {
    int n = P.size();
    PolyMat M = PolyMat::identity(n) - P;
    PolyQ d = M.det();
    if (d.is_zero()) fail(ErrorCode::ZeroPolynomial, "degenerate derivative system");
    PolyMat N = M.adjugate() * Q;
    PolyMat A(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            A.at(r, c) = N.at(r, c).divide_exact(d);
            if (A.at(r, c).degree() > 1)
                fail(ErrorCode::BadInput, "derived system entry not linear in h");
        }
    return A;
}

// Accumulate the identity  J_g = d/dh sum_t w_t J_{target_t}  for one block
// row: expanding the reductions of the targets over the generators turns it
// into  (E - P) U = Q U'  with P from the differentiated coefficients.
PolyMat derive_block(Reducer& red, const std::vector<std::pair<int, int>>& block,
                     const std::vector<std::vector<std::pair<Rat, std::pair<int, int>>>>& rows) {
    const auto& gens = red.gens();
    int n = static_cast<int>(block.size());
    PolyMat P(n), Q(n);
    for (int r = 0; r < n; ++r) {
        for (const auto& [w, target] : rows[r]) {
            const auto& coeffs = red.reduce(target.first, target.second);
            for (size_t k = 0; k < gens.size(); ++k) {
                if (coeffs[k].is_zero()) continue;
                auto it = std::find(block.begin(), block.end(), gens[k]);
                if (it == block.end())
                    fail(ErrorCode::BadInput, "parity leak in derivative system");
                int c = static_cast<int>(it - block.begin());
                P.at(r, c) += coeffs[k].derivative() * w;
                Q.at(r, c) += coeffs[k] * w;
            }
        }
    }
    return solve_first_order(P, Q);
}

PolyMat second_order_matrix(const PolyMat& A) {
    return A.adjugate() * (PolyMat::identity(A.size()) - A.derivative());
}

std::vector<Jet3> block_jets(const FamilyCase& fc, const Annulus& an, long double h,
                             const std::vector<std::pair<int, int>>& block,
                             const QuadratureSettings& qs) {
    std::vector<Jet3> out;
    out.reserve(block.size());
    for (auto [i, j] : block) out.push_back(j_integral_jet(fc, an, h, i, j, qs));
    return out;
}

long double rel_to(long double err, long double scale) {
    return err / std::max(1.0L, scale);
}

// Dense long double linear solve (Gauss with partial pivoting), for the
// recovery least squares only.
std::vector<long double> solve_dense(std::vector<std::vector<long double>> M,
                                     std::vector<long double> b) {
    int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
        if (std::abs(M[p][c]) < 1e-30L)
            fail(ErrorCode::BadInput, "singular recovery system");
        std::swap(M[p], M[c]);
        std::swap(b[p], b[c]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            long double f = M[r][c] / M[c][c];
            for (int k = c; k < n; ++k) M[r][k] -= f * M[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<long double> x(n);
    for (int c = 0; c < n; ++c) x[c] = b[c] / M[c][c];
    return x;
}

} // namespace

MatQ PFSystem::B(int block) const {
    const PolyMat& A = block == 1 ? A1 : A2;
    MatQ out(A.size(), A.size());
    for (int r = 0; r < A.size(); ++r)
        for (int c = 0; c < A.size(); ++c) out.at(r, c) = A.at(r, c).coeff(1);
    return out;
}

MatQ PFSystem::C(int block) const {
    const PolyMat& A = block == 1 ? A1 : A2;
    MatQ out(A.size(), A.size());
    for (int r = 0; r < A.size(); ++r)
        for (int c = 0; c < A.size(); ++c) out.at(r, c) = A.at(r, c).coeff(0);
    return out;
}

PFSystem make_pf_system(const FamilyCase& fc) {
    PFSystem pf;
    pf.fc = fc;
    Reducer red(fc);
    using Row = std::vector<std::pair<Rat, std::pair<int, int>>>;
    auto rows_for = [&](const std::vector<std::pair<int, int>>& block) {
        std::vector<Row> rows;
        for (auto [i, j] : block) {
            if (fc.kind == FamilyKind::Triangle)
                rows.push_back(Row{{Rat(1, j + 2), {i, j + 2}}, {Rat(2, j + 2), {i + 1, j + 2}}});
            else
                rows.push_back(Row{{Rat(2, j + 2), {i + 1, j + 2}}});
        }
        return rows;
    };

    if (fc.kind == FamilyKind::Parabolic) {
        pf.block1 = {{0, 1}, {1, 1}};
        pf.block2 = {{1, 0}, {0, 2}};
    } else {
        pf.block1 = {{0, 0}, {1, 0}, {0, 2}};
        pf.block2 = {{0, 1}, {1, 1}, {2, 1}};
    }
    pf.A1 = derive_block(red, pf.block1, rows_for(pf.block1));
    pf.A2 = derive_block(red, pf.block2, rows_for(pf.block2));
    pf.D1 = pf.A1.det();
    pf.D2 = pf.A2.det();
    pf.S1 = second_order_matrix(pf.A1);
    pf.S2 = second_order_matrix(pf.A2);

    if (fc.kind != FamilyKind::Parabolic) {
        // the closed (J00', J10') subsystem needs the third column gone
        for (int r = 0; r < 3; ++r)
            if (!pf.S1.at(r, 2).is_zero())
                fail(ErrorCode::BadInput, "first-block second-order system did not close");
    }
    return pf;
}

KSystem make_k_system(const FamilyCase& fc) {
    if (fc.kind != FamilyKind::Elliptic && fc.kind != FamilyKind::Hyperbolic)
        fail(ErrorCode::BadInput, "conjugated second block exists for the cubic lambda != 0, -1 cases only");
    PFSystem pf = make_pf_system(fc);
    KSystem ks;
    ks.s = Rat(3, 8) * (Rat(1) / fc.lambda - Rat(1));
    ks.t = Rat(1, 4);

    PolyMat T = PolyMat::identity(3), Ti = PolyMat::identity(3);
    T.at(2, 1) = PolyQ(ks.s);
    T.at(2, 2) = PolyQ(ks.t);
    Ti.at(2, 1) = PolyQ(-ks.s / ks.t);
    Ti.at(2, 2) = PolyQ(Rat(1) / ks.t);

    ks.AW = T * pf.A2 * Ti;
    ks.D2 = ks.AW.det();
    ks.K = second_order_matrix(ks.AW);
    for (int r = 0; r < 3; ++r)
        if (!ks.K.at(r, 1).is_zero())
            fail(ErrorCode::BadInput, "conjugated second-order system did not close");
    return ks;
}

TriangleStage make_triangle_stage() {
    TriangleStage ts;
    ts.D3 = PolyQ{Rat(0), Rat(-3), Rat(18)}; // 3h(6h-1)
    ts.L = PolyMat(2);
    ts.L.at(0, 0) = PolyQ{Rat(1), Rat(-6)};
    ts.L.at(0, 1) = PolyQ{Rat(-1), Rat(6)};
    ts.L.at(1, 0) = PolyQ(Rat(1));
    ts.L.at(1, 1) = PolyQ{Rat(-1), Rat(-12)};
    return ts;
}

long double pf_first_residual(const PFSystem& pf, int block, long double h,
                              const QuadratureSettings& qs) {
    const PolyMat& A = block == 1 ? pf.A1 : pf.A2;
    const auto& labels = block == 1 ? pf.block1 : pf.block2;
    Annulus an = main_annulus(pf.fc);
    auto jets = block_jets(pf.fc, an, h, labels, qs);
    long double scale = 0, worst = 0;
    for (const Jet3& j : jets) scale = std::max(scale, std::abs(j.v));
    for (size_t r = 0; r < jets.size(); ++r) {
        long double rhs = 0;
        for (size_t c = 0; c < jets.size(); ++c)
            rhs += A.at(static_cast<int>(r), static_cast<int>(c)).eval_ld(h) * jets[c].d1;
        worst = std::max(worst, std::abs(jets[r].v - rhs));
    }
    return rel_to(worst, scale);
}

long double pf_second_residual(const PFSystem& pf, int block, long double h,
                               const QuadratureSettings& qs) {
    const PolyMat& S = block == 1 ? pf.S1 : pf.S2;
    const PolyQ& D = block == 1 ? pf.D1 : pf.D2;
    const auto& labels = block == 1 ? pf.block1 : pf.block2;
    Annulus an = main_annulus(pf.fc);
    auto jets = block_jets(pf.fc, an, h, labels, qs);
    long double d = D.eval_ld(h);
    long double scale = 0, worst = 0;
    for (const Jet3& j : jets) scale = std::max(scale, std::abs(j.d1));
    for (size_t r = 0; r < jets.size(); ++r) {
        long double rhs = 0;
        for (size_t c = 0; c < jets.size(); ++c)
            rhs += S.at(static_cast<int>(r), static_cast<int>(c)).eval_ld(h) * jets[c].d1;
        // residual in the U'' = (S/D) U' convention
        worst = std::max(worst, std::abs(jets[r].d2 - rhs / d));
    }
    return rel_to(worst, scale);
}

long double k_system_residual(const KSystem& ks, const FamilyCase& fc, long double h,
                              const QuadratureSettings& qs) {
    Annulus an = main_annulus(fc);
    Jet3 j01 = j_integral_jet(fc, an, h, 0, 1, qs);
    Jet3 j11 = j_integral_jet(fc, an, h, 1, 1, qs);
    Jet3 j21 = j_integral_jet(fc, an, h, 2, 1, qs);
    long double s = to_ld(ks.s), t = to_ld(ks.t);
    Jet3 z = j11 * s + j21 * t;
    long double d = ks.D2.eval_ld(h);
    long double scale = std::max({std::abs(j01.d1), std::abs(z.d1), std::abs(j11.d1)});
    // W = (J01, J11, Z); the closed rows are 1 and 3 over (W1', W3')
    long double worst = 0;
    Jet3 W[3] = {j01, j11, z};
    for (int r = 0; r < 3; ++r) {
        long double rhs = ks.K.at(r, 0).eval_ld(h) * W[0].d1 + ks.K.at(r, 2).eval_ld(h) * W[2].d1;
        worst = std::max(worst, std::abs(W[r].d2 - rhs / d));
    }
    return rel_to(worst, scale);
}

long double triangle_stage_residual(const TriangleStage& ts, long double h,
                                    const QuadratureSettings& qs) {
    FamilyCase fc = make_triangle();
    Annulus an = main_annulus(fc);
    Jet3 j01 = j_integral_jet(fc, an, h, 0, 1, qs);
    Jet3 j21 = j_integral_jet(fc, an, h, 2, 1, qs);
    long double d = ts.D3.eval_ld(h);
    // V = (J01', J21''), V' = (J01'', J21''')
    long double V[2] = {j01.d1, j21.d2};
    long double Vp[2] = {j01.d2, j21.d3};
    long double scale = std::max(std::abs(V[0]), std::abs(V[1]));
    long double worst = 0;
    for (int r = 0; r < 2; ++r) {
        long double rhs = ts.L.at(r, 0).eval_ld(h) * V[0] + ts.L.at(r, 1).eval_ld(h) * V[1];
        worst = std::max(worst, std::abs(Vp[r] - rhs / d));
    }
    // derivative recovery J21' = ((6h-1) J21'' + J01') / 2
    long double rec = ((6.0L * h - 1.0L) * j21.d2 + j01.d1) / 2.0L;
    worst = std::max(worst, std::abs(j21.d1 - rec));
    return rel_to(worst, scale);
}

long double recover_row_deviation(const PFSystem& pf, int block, int row,
                                  const std::vector<long double>& hs,
                                  const QuadratureSettings& qs) {
    const PolyMat& A = block == 1 ? pf.A1 : pf.A2;
    const auto& labels = block == 1 ? pf.block1 : pf.block2;
    int n = A.size(), m = 2 * n;
    if (static_cast<int>(hs.size()) < m)
        fail(ErrorCode::BadInput, "need at least 2n sample levels");
    Annulus an = main_annulus(pf.fc);

    // rows of the sampling matrix: [h U1' ... h Un' U1' ... Un'] vs U_row
    std::vector<std::vector<long double>> rowsM;
    std::vector<long double> rhs;
    for (long double h : hs) {
        auto jets = block_jets(pf.fc, an, h, labels, qs);
        std::vector<long double> r(m);
        for (int c = 0; c < n; ++c) {
            r[c] = h * jets[c].d1;
            r[n + c] = jets[c].d1;
        }
        rowsM.push_back(std::move(r));
        rhs.push_back(jets[row].v);
    }

    // An unknown whose data column is negligible is unidentifiable (this
    // happens when a block member vanishes identically, e.g. the middle
    // entry of the triangle's second block); leave those out of the solve
    // and out of the comparison.
    long double data_scale = 0;
    std::vector<long double> colmax(m, 0.0L);
    for (const auto& rw : rowsM)
        for (int i = 0; i < m; ++i) {
            colmax[i] = std::max(colmax[i], std::abs(rw[i]));
            data_scale = std::max(data_scale, std::abs(rw[i]));
        }
    std::vector<int> keep;
    for (int i = 0; i < m; ++i)
        if (colmax[i] > 1e-12L * std::max(1.0L, data_scale)) keep.push_back(i);
    int mk = static_cast<int>(keep.size());

    std::vector<std::vector<long double>> N(mk, std::vector<long double>(mk, 0.0L));
    std::vector<long double> b(mk, 0.0L);
    for (size_t s = 0; s < rowsM.size(); ++s)
        for (int i = 0; i < mk; ++i) {
            b[i] += rowsM[s][keep[i]] * rhs[s];
            for (int j = 0; j < mk; ++j) N[i][j] += rowsM[s][keep[i]] * rowsM[s][keep[j]];
        }
    std::vector<long double> xk = solve_dense(std::move(N), std::move(b));
    std::vector<long double> x(m, 0.0L);
    std::vector<bool> known(m, false);
    for (int i = 0; i < mk; ++i) {
        x[keep[i]] = xk[i];
        known[keep[i]] = true;
    }

    long double worst = 0;
    for (int c = 0; c < n; ++c) {
        if (known[c]) worst = std::max(worst, std::abs(x[c] - to_ld(A.at(row, c).coeff(1))));
        if (known[n + c])
            worst = std::max(worst, std::abs(x[n + c] - to_ld(A.at(row, c).coeff(0))));
    }
    return worst;
}

RiccatiForm riccati_form(const FamilyCase& fc, RiccatiKind kind) {
    RiccatiForm rf;
    if (kind == RiccatiKind::FirstRatio) {
        PFSystem pf = make_pf_system(fc);
        if (fc.kind == FamilyKind::Parabolic) {
            // value ratio om = J11/J01 from U1' = (adj(A1)/D1) U1
            PolyMat a = pf.A1.adjugate();
            rf.D = pf.D1;
            rf.c2 = -a.at(0, 1);
            rf.c1 = a.at(1, 1) - a.at(0, 0);
            rf.c0 = a.at(1, 0);
        } else {
            // derivative ratio om = J10'/J00' from D1 U'' = S1 U'
            rf.D = pf.D1;
            rf.c2 = -pf.S1.at(0, 1);
            rf.c1 = pf.S1.at(1, 1) - pf.S1.at(0, 0);
            rf.c0 = pf.S1.at(1, 0);
        }
        return rf;
    }
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        KSystem ks = make_k_system(fc);
        rf.D = ks.D2;
        rf.c2 = -ks.K.at(0, 2);
        rf.c1 = ks.K.at(2, 2) - ks.K.at(0, 0);
        rf.c0 = ks.K.at(2, 0);
        return rf;
    }
    case FamilyKind::Triangle: {
        TriangleStage ts = make_triangle_stage();
        rf.D = ts.D3;
        rf.c2 = -ts.L.at(0, 1);
        rf.c1 = ts.L.at(1, 1) - ts.L.at(0, 0);
        rf.c0 = ts.L.at(1, 0);
        return rf;
    }
    default:
        fail(ErrorCode::BadInput, "no second-ratio equation for this family");
    }
}

long double riccati_residual(const FamilyCase& fc, RiccatiKind kind, long double h,
                             const QuadratureSettings& qs) {
    RiccatiForm rf = riccati_form(fc, kind);
    Annulus an = main_annulus(fc);
    long double om, omp;
    if (kind == RiccatiKind::FirstRatio) {
        if (fc.kind == FamilyKind::Parabolic) {
            Jet3 j01 = j_integral_jet(fc, an, h, 0, 1, qs);
            Jet3 j11 = j_integral_jet(fc, an, h, 1, 1, qs);
            om = j11.v / j01.v;
            omp = (j11.d1 * j01.v - j11.v * j01.d1) / (j01.v * j01.v);
        } else {
            Jet3 j00 = j_integral_jet(fc, an, h, 0, 0, qs);
            Jet3 j10 = j_integral_jet(fc, an, h, 1, 0, qs);
            om = j10.d1 / j00.d1;
            omp = (j10.d2 * j00.d1 - j10.d1 * j00.d2) / (j00.d1 * j00.d1);
        }
    } else if (fc.kind == FamilyKind::Triangle) {
        Jet3 j01 = j_integral_jet(fc, an, h, 0, 1, qs);
        Jet3 j21 = j_integral_jet(fc, an, h, 2, 1, qs);
        om = j21.d2 / j01.d1;
        omp = (j21.d3 * j01.d1 - j21.d2 * j01.d2) / (j01.d1 * j01.d1);
    } else {
        KSystem ks = make_k_system(fc);
        Jet3 j01 = j_integral_jet(fc, an, h, 0, 1, qs);
        Jet3 j11 = j_integral_jet(fc, an, h, 1, 1, qs);
        Jet3 j21 = j_integral_jet(fc, an, h, 2, 1, qs);
        Jet3 z = j11 * to_ld(ks.s) + j21 * to_ld(ks.t);
        om = z.d1 / j01.d1;
        omp = (z.d2 * j01.d1 - z.d1 * j01.d2) / (j01.d1 * j01.d1);
    }
    long double lhs = rf.D.eval_ld(h) * omp;
    long double rhs = rf.c2.eval_ld(h) * om * om + rf.c1.eval_ld(h) * om + rf.c0.eval_ld(h);
    return std::abs(lhs - rhs) / std::max({1.0L, std::abs(lhs), std::abs(rhs)});
}

} // namespace mlab
