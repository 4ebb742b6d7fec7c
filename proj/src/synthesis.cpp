#include "mlab/synthesis.hpp"

#include "mlab/errors.hpp"
#include "mlab/linalg.hpp"
#include "mlab/quadrature.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mlab {

namespace {

bool is_cubic(FamilyKind k) {
    return k == FamilyKind::Elliptic || k == FamilyKind::Hyperbolic ||
           k == FamilyKind::Triangle;
}

int fdiv(int a, int b) {
    int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

long double eval_poly(const PolyQ& p, long double h) { return p.eval_ld(h); }

// Scale a rational vector to coprime integers; flip sign so the designated
// leading entry is positive.
void normalize_integer_vector(std::vector<Rat>& v, int lead_index) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    BigInt l = 1;
    for (const Rat& r : v)
        if (r != 0) l = lcm(l, denominator(r));
    BigInt g = 0;
    for (Rat& r : v) {
        r *= Rat(l);
        assert(denominator(r) == 1);
        g = gcd(g, numerator(r));
    }
    if (g != 0)
        for (Rat& r : v) r /= Rat(g);
    if (lead_index >= 0 && v[static_cast<size_t>(lead_index)] < 0)
        for (Rat& r : v) r = -r;
}

} // namespace

std::vector<PolyQ> jprime_expand(const PFSystem& pf, const std::vector<PolyQ>& c) {
    if (!is_cubic(pf.fc.kind))
        fail(ErrorCode::BadInput, "jprime_expand: cubic-level families only");
    if (c.size() != 6)
        fail(ErrorCode::BadInput, "jprime_expand: expected 6 generator coefficients");
    std::vector<PolyQ> out(6);
    for (int k = 0; k < 3; ++k) {
        PolyQ s1, s2;
        for (int i = 0; i < 3; ++i) {
            s1 += c[static_cast<size_t>(i)] * pf.A1.at(i, k);
            s2 += c[static_cast<size_t>(3 + i)] * pf.A2.at(i, k);
        }
        out[static_cast<size_t>(k)] = s1;
        out[static_cast<size_t>(3 + k)] = s2;
    }
    return out;
}

JPrimeForms melnikov_jprime_forms(const PFSystem& pf, const GeneratorCombination& gc) {
    if (gc.coeff.size() != 6)
        fail(ErrorCode::BadInput, "melnikov_jprime_forms: expected 6 generator coefficients");
    JPrimeForms f;
    f.M = jprime_expand(pf, gc.coeff);
    std::vector<PolyQ> cp(6);
    for (size_t i = 0; i < 6; ++i) cp[i] = gc.coeff[i].derivative();
    f.Mp = jprime_expand(pf, cp);
    // M' = sum (c_g' J_g + c_g J_g'): the first part expands through A, the
    // second is c itself since the derivative basis carries the same indices.
    for (size_t i = 0; i < 6; ++i) f.Mp[i] += gc.coeff[i];
    return f;
}

EliminationResult eliminate_and_form_F1(const PFSystem& pf, const GeneratorCombination& gc) {
    JPrimeForms f = melnikov_jprime_forms(pf, gc);
    static constexpr int kKept[5] = {0, 1, 3, 4, 5};
    EliminationResult el;
    el.gamma1 = f.Mp[2];
    el.gamma2 = f.M[2];
    el.F1.kind = pf.fc.kind;
    el.F1.labels = {"J00'", "J10'", "J01'", "J11'", "J21'"};
    el.F1.parts.resize(5);
    el.F1.phi1_count = 2;
    el.degenerate = el.gamma1.is_zero() && el.gamma2.is_zero();
    for (int k = 0; k < 5; ++k) {
        size_t s = static_cast<size_t>(kKept[k]);
        // Degenerate case: M never loads the eliminated slot, so M's own
        // expansion already lives on the kept labels; return it gamma-free.
        el.F1.parts[static_cast<size_t>(k)] =
            el.degenerate ? f.M[s] : el.gamma1 * f.M[s] - el.gamma2 * f.Mp[s];
    }
    return el;
}

long double elimination_identity_residual(const PFSystem& pf, const GeneratorCombination& gc,
                                          const EliminationResult& el, long double h,
                                          const QuadratureSettings& qs) {
    Annulus an = main_annulus(pf.fc);
    std::vector<Jet3> G = generator_vector(pf.fc, an, h, qs);
    long double M = 0, Mp = 0;
    for (size_t i = 0; i < 6; ++i) {
        long double c = eval_poly(gc.coeff[i], h);
        long double cp = eval_poly(gc.coeff[i].derivative(), h);
        M += c * G[i].v;
        Mp += cp * G[i].v + c * G[i].d1;
    }
    long double tA = eval_poly(el.gamma1, h) * M;
    long double tB = eval_poly(el.gamma2, h) * Mp;
    static constexpr int kKept[5] = {0, 1, 3, 4, 5};
    long double rhs = 0;
    for (int k = 0; k < 5; ++k)
        rhs += eval_poly(el.F1.parts[static_cast<size_t>(k)], h) *
               G[static_cast<size_t>(kKept[k])].d1;
    if (el.degenerate) return std::fabs(M - rhs) / std::max({1.0L, std::fabs(M), std::fabs(rhs)});
    long double scale = std::max({1.0L, std::fabs(tA), std::fabs(tB), std::fabs(rhs)});
    return std::fabs(tA - tB - rhs) / scale;
}

ReducedForm reduced_melnikov_form(const FamilyCase& fc, const GeneratorCombination& gc) {
    if (fc.kind != FamilyKind::Parabolic)
        fail(ErrorCode::BadInput, "reduced_melnikov_form: parabolic family only");
    if (gc.coeff.size() != 4)
        fail(ErrorCode::BadInput, "reduced_melnikov_form: bad coefficient count");
    PFSystem pf = make_pf_system(fc);
    // Second block (J10, J02) = A2 (J10', J02'), with J10' = -a00 J10''
    // (differentiate J10 = a00 J10', a00' = 2), so
    //   J10 = -a00^2 J10'',   J02 = -a10 a00 J10'' + a11 J02'.
    const PolyQ& a00 = pf.A2.at(0, 0);
    const PolyQ& a10 = pf.A2.at(1, 0);
    const PolyQ& a11 = pf.A2.at(1, 1);
    assert(pf.A2.at(0, 1).is_zero());
    assert(a00.derivative() == PolyQ{Rat(2)});
    ReducedForm rf;
    rf.kind = fc.kind;
    rf.labels = {"J01", "J11", "J10''", "J02'"};
    rf.parts.resize(4);
    rf.phi1_count = 2;
    rf.parts[0] = gc.coeff[0];
    rf.parts[1] = gc.coeff[1];
    rf.parts[2] = -(gc.coeff[2] * a00 * a00 + gc.coeff[3] * a10 * a00);
    rf.parts[3] = gc.coeff[3] * a11;
    return rf;
}

long double reduced_form_residual(const FamilyCase& fc, const GeneratorCombination& gc,
                                  const ReducedForm& rf, long double h,
                                  const QuadratureSettings& qs) {
    if (fc.kind != FamilyKind::Parabolic)
        fail(ErrorCode::BadInput, "reduced_form_residual: parabolic family only");
    Annulus an = main_annulus(fc);
    std::vector<Jet3> G = generator_vector(fc, an, h, qs);
    long double direct = 0;
    for (size_t i = 0; i < 4; ++i) direct += eval_poly(gc.coeff[i], h) * G[i].v;
    // Generators order (J01, J11, J10, J02); labels (J01, J11, J10'', J02').
    long double reduced = eval_poly(rf.parts[0], h) * G[0].v + eval_poly(rf.parts[1], h) * G[1].v +
                          eval_poly(rf.parts[2], h) * G[2].d2 + eval_poly(rf.parts[3], h) * G[3].d1;
    reduced /= eval_poly(rf.denominator, h);
    return std::fabs(direct - reduced) / std::max({1.0L, std::fabs(direct), std::fabs(reduced)});
}

std::vector<int> f1_degree_ceilings(FamilyKind kind, int n) {
    if (!is_cubic(kind))
        fail(ErrorCode::BadInput, "f1_degree_ceilings: cubic-level families only");
    int q0 = fdiv(n, 3), q1 = fdiv(n - 1, 3), q2 = fdiv(n - 2, 3), q3 = fdiv(n - 3, 3);
    // Every slot is the cross-product degree cap of the elimination.  The
    // (1,1) slot genuinely reaches 2 floor((n-2)/3) + 1 for generic
    // parameters; at lambda = 1 its top term happens to cancel, so sharper
    // tables quoted for that single case do not transfer.
    return {q0 + q2 + 1, q1 + q2 + 1, q1 + q2 + 1, 2 * q2 + 1, q3 + q2 + 1};
}

int synthesis_order(FamilyKind kind, int n) {
    if (is_cubic(kind))
        return fdiv(n, 3) + fdiv(n - 1, 3) + 2 * fdiv(n - 2, 3) + 13;
    return 2 * fdiv(n, 2) + 2;
}

Annihilator synthesize_L(const FamilyCase& fc, const PolyQ& alpha, const PolyQ& beta, int m2) {
    if (m2 < 2) fail(ErrorCode::BadInput, "synthesize_L: order cap must be at least 2");
    if (alpha.is_zero() && beta.is_zero())
        fail(ErrorCode::BadInput, "synthesize_L: zero input pair");

    PFSystem pf = make_pf_system(fc);
    // Closed pair (v1, v2) with D v1' = g11 v1 + g12 v2, D v2' = g21 v1 + g22 v2.
    PolyQ D, g11, g12, g21, g22;
    if (is_cubic(fc.kind)) {
        D = pf.D1;
        g11 = pf.S1.at(0, 0);
        g12 = pf.S1.at(0, 1);
        g21 = pf.S1.at(1, 0);
        g22 = pf.S1.at(1, 1);
    } else {
        D = pf.D1;
        PolyMat adj = pf.A1.adjugate();
        g11 = adj.at(0, 0);
        g12 = adj.at(0, 1);
        g21 = adj.at(1, 0);
        g22 = adj.at(1, 1);
    }

    // D Phi1' = N1x v1 + N1y v2 and D^2 Phi1'' = N2x v1 + N2y v2.
    PolyQ N1x = D * alpha.derivative() + alpha * g11 + beta * g21;
    PolyQ N1y = D * beta.derivative() + alpha * g12 + beta * g22;
    PolyQ Dp = D.derivative();
    PolyQ N2x = N1x.derivative() * D - N1x * Dp + N1x * g11 + N1y * g21;
    PolyQ N2y = N1y.derivative() * D - N1y * Dp + N1x * g12 + N1y * g22;

    // L Phi1 = (P2 N2x + P1 D N1x + P0 D^2 alpha) v1 / D^2 + (y-analog) v2 / D^2,
    // so annihilation is the vanishing of both bracketed polynomials.  The
    // unknown vector stacks the coefficients of P2 (deg <= m2), P1 (<= m2-1),
    // P0 (<= m2-2); each h-power of each bracket contributes one row.
    struct Block {
        PolyQ prod[3]; // multiplied against P2, P1, P0 respectively
    };
    Block blocks[2];
    blocks[0].prod[0] = N2x;
    blocks[0].prod[1] = D * N1x;
    blocks[0].prod[2] = D * D * alpha;
    blocks[1].prod[0] = N2y;
    blocks[1].prod[1] = D * N1y;
    blocks[1].prod[2] = D * D * beta;

    const int shift[3] = {m2, m2 - 1, m2 - 2};
    const int ncols = 3 * m2; // (m2+1) + m2 + (m2-1)
    const int col_base[3] = {0, m2 + 1, 2 * m2 + 1};
    const int col_count[3] = {m2 + 1, m2, m2 - 1};

    int nrows = 0;
    int block_deg[2];
    for (int b = 0; b < 2; ++b) {
        int degT = -1;
        for (int s = 0; s < 3; ++s)
            if (!blocks[b].prod[s].is_zero())
                degT = std::max(degT, shift[s] + blocks[b].prod[s].degree());
        block_deg[b] = degT;
        if (degT >= 0) nrows += degT + 1;
    }
    if (nrows == 0)
        fail(ErrorCode::BadInput, "synthesize_L: both identity blocks vanish");

    MatQ A(nrows, ncols);
    int row = 0;
    for (int b = 0; b < 2; ++b) {
        if (block_deg[b] < 0) continue;
        for (int r = 0; r <= block_deg[b]; ++r, ++row)
            for (int s = 0; s < 3; ++s)
                for (int k = 0; k < col_count[s]; ++k)
                    A.at(row, col_base[s] + k) = blocks[b].prod[s].coeff(r - k);
    }
    assert(row == nrows);

    Annihilator out;
    out.m2 = m2;
    out.rows = nrows;
    out.cols = ncols;
    out.kernel_dim = static_cast<int>(nullspace(A).size());
    if (out.kernel_dim == 0)
        fail(ErrorCode::NoKernel, "synthesize_L: no annihilator within the degree caps");

    // Deterministic choice: smallest P2 degree cap with a nonempty kernel,
    // then the lexicographically smallest of the normalized kernel basis
    // vectors (coprime integers, leading P2 coefficient positive).
    for (int d2 = 0; d2 <= m2; ++d2) {
        const int sub_cols = (d2 + 1) + col_count[1] + col_count[2];
        MatQ sub(nrows, sub_cols);
        for (int r = 0; r < nrows; ++r) {
            int c = 0;
            for (int k = 0; k <= d2; ++k) sub.at(r, c++) = A.at(r, k);
            for (int s = 1; s < 3; ++s)
                for (int k = 0; k < col_count[s]; ++k)
                    sub.at(r, c++) = A.at(r, col_base[s] + k);
        }
        std::vector<std::vector<Rat>> ns = nullspace(sub);
        if (ns.empty()) continue;

        std::vector<Rat> best;
        for (const std::vector<Rat>& kv : ns) {
            std::vector<Rat> full(static_cast<size_t>(ncols), Rat(0));
            int c = 0;
            for (int k = 0; k <= d2; ++k) full[static_cast<size_t>(k)] = kv[static_cast<size_t>(c++)];
            for (int s = 1; s < 3; ++s)
                for (int k = 0; k < col_count[s]; ++k)
                    full[static_cast<size_t>(col_base[s] + k)] = kv[static_cast<size_t>(c++)];
            int lead = -1;
            for (int k = d2; k >= 0; --k)
                if (full[static_cast<size_t>(k)] != 0) { lead = k; break; }
            if (lead < 0)
                for (int k = 0; k < ncols; ++k)
                    if (full[static_cast<size_t>(k)] != 0) { lead = k; break; }
            normalize_integer_vector(full, lead);
            if (best.empty() || std::lexicographical_compare(full.begin(), full.end(),
                                                             best.begin(), best.end()))
                best = std::move(full);
        }

        for (int k = 0; k < col_count[0]; ++k) out.P2.set_coeff(k, best[static_cast<size_t>(k)]);
        for (int k = 0; k < col_count[1]; ++k) out.P1.set_coeff(k, best[static_cast<size_t>(col_base[1] + k)]);
        for (int k = 0; k < col_count[2]; ++k) out.P0.set_coeff(k, best[static_cast<size_t>(col_base[2] + k)]);
        out.min_deg_p2 = d2;
        return out;
    }
    fail(ErrorCode::NoKernel, "synthesize_L: kernel search exhausted"); // unreachable
}

Annihilator synthesize_L(const FamilyCase& fc, const ReducedForm& rf, int m2) {
    if (rf.phi1_count != 2 || rf.parts.size() < 2)
        fail(ErrorCode::BadInput, "synthesize_L: reduced form has no two-generator part");
    return synthesize_L(fc, rf.parts[0], rf.parts[1], m2);
}

long double annihilator_residual(const FamilyCase& fc, const PolyQ& alpha, const PolyQ& beta,
                                 const Annihilator& L, long double h,
                                 const QuadratureSettings& qs) {
    Annulus an = main_annulus(fc);
    long double a = eval_poly(alpha, h), ap = eval_poly(alpha.derivative(), h),
                app = eval_poly(alpha.derivative().derivative(), h);
    long double b = eval_poly(beta, h), bp = eval_poly(beta.derivative(), h),
                bpp = eval_poly(beta.derivative().derivative(), h);
    long double phi, phip, phipp;
    if (is_cubic(fc.kind)) {
        // Phi1 = alpha J00' + beta J10'.
        Jet3 j1 = j_integral_jet(fc, an, h, 0, 0, qs);
        Jet3 j2 = j_integral_jet(fc, an, h, 1, 0, qs);
        phi = a * j1.d1 + b * j2.d1;
        phip = ap * j1.d1 + a * j1.d2 + bp * j2.d1 + b * j2.d2;
        phipp = app * j1.d1 + 2 * ap * j1.d2 + a * j1.d3 +
                bpp * j2.d1 + 2 * bp * j2.d2 + b * j2.d3;
    } else {
        // Phi1 = alpha J01 + beta J11.
        Jet3 j1 = j_integral_jet(fc, an, h, 0, 1, qs);
        Jet3 j2 = j_integral_jet(fc, an, h, 1, 1, qs);
        phi = a * j1.v + b * j2.v;
        phip = ap * j1.v + a * j1.d1 + bp * j2.v + b * j2.d1;
        phipp = app * j1.v + 2 * ap * j1.d1 + a * j1.d2 +
                bpp * j2.v + 2 * bp * j2.d1 + b * j2.d2;
    }
    long double t2 = eval_poly(L.P2, h) * phipp;
    long double t1 = eval_poly(L.P1, h) * phip;
    long double t0 = eval_poly(L.P0, h) * phi;
    long double scale = std::max({std::fabs(t2), std::fabs(t1), std::fabs(t0), 1e-300L});
    return std::fabs(t2 + t1 + t0) / scale;
}

namespace {

// First-order closed chain v' = (1/D) Mchain v for the derivative-basis
// labels of each family's even-block remainder.
struct Chain {
    PolyQ D;
    int n = 0;
    PolyQ mat[3][3]; // v_i' = sum_j mat[i][j] v_j / D
    std::vector<std::string> labels;
};

Chain make_chain(const FamilyCase& fc) {
    Chain ch;
    if (fc.kind == FamilyKind::Elliptic || fc.kind == FamilyKind::Hyperbolic) {
        KSystem ks = make_k_system(fc);
        ch.D = ks.D2;
        ch.n = 3;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ch.mat[i][j] = ks.K.at(i, j);
        ch.labels = {"J01'", "J11'", "Z'"};
    } else if (fc.kind == FamilyKind::Triangle) {
        TriangleStage ts = make_triangle_stage();
        ch.D = ts.D3;
        ch.n = 2;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) ch.mat[i][j] = ts.L.at(i, j);
        ch.labels = {"J01'", "J21''"};
    } else {
        // (J10'', J02'): J10''' = -3h J10'' / D, h J02'' = (h+2) J10'',
        // common denominator D = h (2h+4) = a11 a00.
        PFSystem pf = make_pf_system(fc);
        const PolyQ& a00 = pf.A2.at(0, 0);
        const PolyQ& a10 = pf.A2.at(1, 0);
        const PolyQ& a11 = pf.A2.at(1, 1);
        ch.D = a11 * a00;
        ch.n = 2;
        ch.mat[0][0] = a11 * Rat(-3);
        ch.mat[1][0] = a10 * a00;
        ch.labels = {"J10''", "J02'"};
    }
    return ch;
}

// One derivative of (1/D^m) sum f_i v_i: returns the numerators over D^(m+1).
std::vector<PolyQ> chain_step(const Chain& ch, const std::vector<PolyQ>& f, int m) {
    PolyQ Dp = ch.D.derivative();
    std::vector<PolyQ> g(static_cast<size_t>(ch.n));
    for (int i = 0; i < ch.n; ++i) {
        g[static_cast<size_t>(i)] = ch.D * f[static_cast<size_t>(i)].derivative() -
                                    Rat(m) * Dp * f[static_cast<size_t>(i)];
        for (int j = 0; j < ch.n; ++j)
            g[static_cast<size_t>(i)] += f[static_cast<size_t>(j)] * ch.mat[j][i];
    }
    return g;
}

// The phi2 coefficients of rf expressed over the chain labels.
std::vector<PolyQ> phi2_on_chain(const FamilyCase& fc, const ReducedForm& rf) {
    std::vector<PolyQ> p2 = rf.phi2();
    if (fc.kind == FamilyKind::Elliptic || fc.kind == FamilyKind::Hyperbolic) {
        if (p2.size() != 3) fail(ErrorCode::BadInput, "apply_L_to_phi2: bad even-block size");
        KSystem ks = make_k_system(fc);
        // (eta, xi, zeta) over (J01', J11', J21') with J21' = (Z' - s J11')/t.
        return {p2[0], p2[1] - p2[2] * (ks.s / ks.t), p2[2] * (Rat(1) / ks.t)};
    }
    if (fc.kind == FamilyKind::Triangle) {
        if (p2.size() != 3) fail(ErrorCode::BadInput, "apply_L_to_phi2: bad even-block size");
        // J21' = ((6h-1) J21'' + J01')/2; the J11' track is the identically
        // zero function and is dropped.
        PolyQ rec{Rat(-1, 2), Rat(3)}; // (6h-1)/2
        return {p2[0] + p2[2] * Rat(1, 2), p2[2] * rec};
    }
    if (p2.size() != 2) fail(ErrorCode::BadInput, "apply_L_to_phi2: bad even-block size");
    return {p2[0], p2[1]};
}

} // namespace

ReducedForm apply_L_to_phi2(const FamilyCase& fc, const ReducedForm& rf, const Annihilator& L) {
    Chain ch = make_chain(fc);
    std::vector<PolyQ> f0 = phi2_on_chain(fc, rf);
    std::vector<PolyQ> f1 = chain_step(ch, f0, 0);
    std::vector<PolyQ> f2 = chain_step(ch, f1, 1);
    ReducedForm R;
    R.kind = fc.kind;
    R.labels = ch.labels;
    R.parts.resize(static_cast<size_t>(ch.n));
    R.denominator = ch.D * ch.D;
    R.phi1_count = 0;
    for (int i = 0; i < ch.n; ++i)
        R.parts[static_cast<size_t>(i)] = L.P2 * f2[static_cast<size_t>(i)] +
                                          L.P1 * ch.D * f1[static_cast<size_t>(i)] +
                                          L.P0 * ch.D * ch.D * f0[static_cast<size_t>(i)];
    return R;
}

long double apply_L_residual(const FamilyCase& fc, const ReducedForm& rf, const Annihilator& L,
                             const ReducedForm& R, long double h,
                             const QuadratureSettings& qs) {
    Annulus an = main_annulus(fc);
    std::vector<PolyQ> f = rf.phi2();
    // phi2, phi2', phi2'' from jets (or the closed parabolic forms), then
    // compare P2 phi2'' + P1 phi2' + P0 phi2 against R's cleared form.
    long double phi = 0, phip = 0, phipp = 0, rval = 0;
    auto add_track = [&](const PolyQ& c, long double w, long double wp, long double wpp) {
        long double cv = eval_poly(c, h), cp = eval_poly(c.derivative(), h),
                    cpp = eval_poly(c.derivative().derivative(), h);
        phi += cv * w;
        phip += cp * w + cv * wp;
        phipp += cpp * w + 2 * cp * wp + cv * wpp;
    };
    if (fc.kind == FamilyKind::Elliptic || fc.kind == FamilyKind::Hyperbolic ||
        fc.kind == FamilyKind::Triangle) {
        Jet3 j01 = j_integral_jet(fc, an, h, 0, 1, qs);
        Jet3 j11 = j_integral_jet(fc, an, h, 1, 1, qs);
        Jet3 j21 = j_integral_jet(fc, an, h, 2, 1, qs);
        add_track(f[0], j01.d1, j01.d2, j01.d3);
        add_track(f[1], j11.d1, j11.d2, j11.d3);
        add_track(f[2], j21.d1, j21.d2, j21.d3);
        if (fc.kind == FamilyKind::Triangle) {
            rval = eval_poly(R.parts[0], h) * j01.d1 + eval_poly(R.parts[1], h) * j21.d2;
        } else {
            KSystem ks = make_k_system(fc);
            long double zp = to_ld(ks.s) * j11.d1 + to_ld(ks.t) * j21.d1;
            rval = eval_poly(R.parts[0], h) * j01.d1 + eval_poly(R.parts[1], h) * j11.d1 +
                   eval_poly(R.parts[2], h) * zp;
        }
    } else {
        // Closed forms carry J10 beyond the jet depth: J10 = 4 sqrt(2h+4),
        // J10^(k) = 4 * (1/2)(-1/2)...(3/2-k) 2^k (2h+4)^(1/2-k); J02
        // derivatives reduce through h J02'' = (h+2) J10''.
        Jet3 j02 = j_integral_jet(fc, an, h, 0, 2, qs);
        long double u = 2 * h + 4;
        long double j10_2 = -4 * std::pow(u, -1.5L);      // J10''
        long double j10_3 = 12 * std::pow(u, -2.5L);      // J10'''
        long double j10_4 = -60 * std::pow(u, -3.5L);     // J10''''
        long double j02_2 = (h + 2) * j10_2 / h;          // J02''
        long double j02_3 = (j10_2 + (h + 2) * j10_3 - j02_2) / h;
        add_track(f[0], j10_2, j10_3, j10_4);
        add_track(f[1], j02.d1, j02_2, j02_3);
        rval = eval_poly(R.parts[0], h) * j10_2 + eval_poly(R.parts[1], h) * j02.d1;
    }
    rval /= eval_poly(R.denominator, h);
    long double t2 = eval_poly(L.P2, h) * phipp;
    long double t1 = eval_poly(L.P1, h) * phip;
    long double t0 = eval_poly(L.P0, h) * phi;
    long double lhs = t2 + t1 + t0;
    long double scale = std::max({1.0L, std::fabs(t2), std::fabs(t1), std::fabs(t0), std::fabs(rval)});
    return std::fabs(lhs - rval) / scale;
}

long double parabolic_chain_residual(long double h, int which, const QuadratureSettings& qs) {
    FamilyCase fc = make_parabolic();
    Annulus an = main_annulus(fc);
    if (which == 0) {
        Jet3 j10 = j_integral_jet(fc, an, h, 1, 0, qs);
        long double a = j10.d1, b = (2 * h + 4) * j10.d2;
        return std::fabs(a + b) / std::max({1.0L, std::fabs(a), std::fabs(b)});
    }
    if (which == 1) {
        Jet3 j10 = j_integral_jet(fc, an, h, 1, 0, qs);
        Jet3 j02 = j_integral_jet(fc, an, h, 0, 2, qs);
        long double a = h * j02.d2, b = (h + 2) * j10.d2;
        return std::fabs(a - b) / std::max({1.0L, std::fabs(a), std::fabs(b)});
    }
    fail(ErrorCode::BadInput, "parabolic_chain_residual: which must be 0 or 1");
}

int sqrt_mix_zero_bound(const PolyQ& P0, const std::vector<std::pair<PolyQ, Rat>>& parts) {
    int k = 0, maxdeg = -1;
    for (const auto& [pj, cj] : parts) {
        (void)cj;
        if (!pj.is_zero()) {
            ++k;
            maxdeg = std::max(maxdeg, pj.degree());
        }
    }
    if (k == 0) {
        if (P0.is_zero())
            fail(ErrorCode::ZeroPolynomial, "sqrt_mix_zero_bound: identically zero function");
        return P0.degree();
    }
    return k * (1 + maxdeg) + P0.degree();
}

} // namespace mlab
