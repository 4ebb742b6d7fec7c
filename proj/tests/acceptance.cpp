// Acceptance battery: eleven end-to-end criteria exercising the whole stack,
// from exact determinant factorizations through the piecewise-flow
// cross-check.  Each criterion prints one PASS/FAIL line with its elapsed
// time and a short summary; the process exits nonzero when any criterion
// fails.  Tolerances and runtime caps are pinned below and are not
// configurable: this binary is the fixed bar the library has to clear.

#include "mlab/errors.hpp"
#include "mlab/family.hpp"
#include "mlab/linalg.hpp"
#include "mlab/odecheck.hpp"
#include "mlab/pert.hpp"
#include "mlab/pf.hpp"
#include "mlab/poly.hpp"
#include "mlab/quadrature.hpp"
#include "mlab/reduction.hpp"
#include "mlab/synthesis.hpp"
#include "mlab/zeros.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace mlab;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances (relative unless noted).
constexpr long double kTolFirstOrder = 1e-8L;    // first-order system residual
constexpr long double kTolSecondOrder = 1e-6L;   // second-order system residual
constexpr long double kTolReduce = 1e-6L;        // reduction vs direct quadrature
constexpr long double kTolClosedForm = 1e-10L;   // parabolic closed-form generators
constexpr long double kTolConstAbs = 1e-8L;      // |J10''| 4(h+2)^{3/2} vs 4 sqrt 2, absolute
constexpr long double kTolConstSpread = 1e-6L;   // relative spread of that product
constexpr long double kTolFold = 1e-10L;         // lower-arc fold identity
constexpr long double kTolRiccati = 1e-5L;       // ratio-equation residual
constexpr long double kTolAnnihilator = 1e-5L;   // annihilator residual
constexpr long double kTolTriangleJ11 = 1e-7L;   // |J11''| against |J01''|
constexpr long double kTolTriangleFlat = 1e-8L;  // spread of J11 / (h - 1/6)
constexpr long double kTolMelnikov = 1e-6L;      // symbolic vs numeric M
constexpr long double kTolOdeClosure = 1e-8L;    // unperturbed displacement, absolute
constexpr long double kOdeEps = 1e-3L;           // flow perturbation size
constexpr long double kOdeWindow = 0.05L;        // |detected cycle - certified zero|

// ---------------------------------------------------------------------------
// Shared helpers.

long double ld(const Rat& r) { return to_ld(r); }

std::vector<long double> uniform_levels(const Annulus& an, int count, long double margin_frac) {
    long double lo = ld(an.lo()), len = ld(an.hi()) - lo;
    std::vector<long double> hs(count);
    for (int k = 0; k < count; ++k) {
        long double t = count == 1 ? 0.5L : static_cast<long double>(k) / (count - 1);
        hs[k] = lo + len * (margin_frac + (1 - 2 * margin_frac) * t);
    }
    return hs;
}

std::vector<long double> random_levels(const Annulus& an, int count, std::mt19937_64& rng,
                                       long double margin_frac) {
    long double lo = ld(an.lo()), len = ld(an.hi()) - lo;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<long double> hs(count);
    for (int k = 0; k < count; ++k)
        hs[k] = lo + len * (margin_frac + (1 - 2 * margin_frac) * static_cast<long double>(u(rng)));
    return hs;
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, pattern);
    vsnprintf(buf, sizeof(buf), pattern, ap);
    va_end(ap);
    return buf;
}

const std::vector<FamilyCase>& four_families() {
    static const std::vector<FamilyCase> fcs = {make_elliptic(Rat(1)), make_hyperbolic(Rat(-1, 2)),
                                                make_parabolic(), make_triangle()};
    return fcs;
}

// ---------------------------------------------------------------------------
// Criterion 1: the determinants of both first-order system matrices, rebuilt
// independently here by cofactor expansion of B h + C, must equal the carried
// polynomials and must factor exactly over the critical energies of the
// family:
//   cubic      det A2 = (9/8)(h - e_poly)(h - e_1)(h - e_2),        det A1 = 4 det A2
//   triangle   det A2 = (9/8)(h - e_center)(h - e_poly)^2,          det A1 = 4 det A2
//   parabolic  det A2 = 2 (h - e_poly)(h - e_center),               det A1 = (8/15) det A2
bool crit_determinants(std::string& detail) {
    auto lin = [](const Rat& root) { return PolyQ{-root, Rat(1)}; };
    auto det_manual = [](const PolyMat& A) {
        if (A.size() == 2) return A.at(0, 0) * A.at(1, 1) - A.at(0, 1) * A.at(1, 0);
        return A.at(0, 0) * (A.at(1, 1) * A.at(2, 2) - A.at(1, 2) * A.at(2, 1)) -
               A.at(0, 1) * (A.at(1, 0) * A.at(2, 2) - A.at(1, 2) * A.at(2, 0)) +
               A.at(0, 2) * (A.at(1, 0) * A.at(2, 1) - A.at(1, 1) * A.at(2, 0));
    };
    std::vector<FamilyCase> fcs = {make_elliptic(Rat(1, 2)), make_elliptic(Rat(1)),
                                   make_elliptic(Rat(3, 2)), make_hyperbolic(Rat(-1, 2)),
                                   make_parabolic(), make_triangle()};
    int checked = 0;
    for (const FamilyCase& fc : fcs) {
        PFSystem pf = make_pf_system(fc);
        for (int b = 1; b <= 2; ++b) {
            const PolyMat& A = b == 1 ? pf.A1 : pf.A2;
            MatQ B = pf.B(b), C = pf.C(b);
            PolyMat rebuilt(A.size());
            for (int r = 0; r < A.size(); ++r)
                for (int c = 0; c < A.size(); ++c) rebuilt.at(r, c) = PolyQ{C.at(r, c), B.at(r, c)};
            if (det_manual(rebuilt) != (b == 1 ? pf.D1 : pf.D2)) {
                detail = fmt("%s block %d: cofactor determinant disagrees with the carried one",
                             family_name(fc).c_str(), b);
                return false;
            }
            ++checked;
        }
        PolyQ d1c, d2c;
        if (fc.kind == FamilyKind::Parabolic) {
            Annulus an = main_annulus(fc);
            d2c = Rat(2) * lin(an.h_polycycle) * lin(an.h_center);
            d1c = Rat(8, 15) * d2c;
        } else if (fc.kind == FamilyKind::Triangle) {
            Annulus an = main_annulus(fc);
            d2c = Rat(9, 8) * lin(an.h_center) * lin(an.h_polycycle) * lin(an.h_polycycle);
            d1c = Rat(4) * d2c;
        } else {
            // Three distinct critical energies: the polycycle level carried by
            // the pair of y-axis saddles, and the two on-axis critical points
            // at x = 1 and x = (lambda-2)/lambda (the latter is a center in
            // the elliptic case and a saddle in the hyperbolic one).
            Rat e_poly = main_annulus(fc).h_polycycle;
            Rat e1 = hamiltonian(fc, Rat(1), Rat(0));
            Rat e2 = hamiltonian(fc, (fc.lambda - Rat(2)) / fc.lambda, Rat(0));
            d2c = Rat(9, 8) * lin(e_poly) * lin(e1) * lin(e2);
            d1c = Rat(4) * d2c;
        }
        if (pf.D2 != d2c || pf.D1 != d1c) {
            detail = fmt("%s: determinant does not factor over the critical energies",
                         family_name(fc).c_str());
            return false;
        }
        checked += 2;
    }
    detail = fmt("%d exact identities: cofactor rebuild and critical-energy factorization, "
                 "6 family cases",
                 checked);
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 2: residuals of U = A U' at 50 uniform interior levels and of
// D U'' = S U' at 20, both blocks, six family cases.
bool crit_system_residuals(std::string& detail) {
    std::vector<FamilyCase> fcs = {make_elliptic(Rat(1, 2)), make_elliptic(Rat(1)),
                                   make_elliptic(Rat(3, 2)), make_hyperbolic(Rat(-1, 2)),
                                   make_parabolic(), make_triangle()};
    long double worst1 = 0, worst2 = 0;
    bool ok = true;
    for (const FamilyCase& fc : fcs) {
        PFSystem pf = make_pf_system(fc);
        Annulus an = main_annulus(fc);
        for (int b = 1; b <= 2; ++b) {
            for (long double h : uniform_levels(an, 50, 0.02L)) {
                long double r = pf_first_residual(pf, b, h);
                worst1 = std::max(worst1, r);
                ok = ok && r <= kTolFirstOrder;
            }
            for (long double h : uniform_levels(an, 20, 0.02L)) {
                long double r = pf_second_residual(pf, b, h);
                worst2 = std::max(worst2, r);
                ok = ok && r <= kTolSecondOrder;
            }
        }
    }
    detail = fmt("first order max %.2Le (tol %.0Le), second order max %.2Le (tol %.0Le)", worst1,
                 kTolFirstOrder, worst2, kTolSecondOrder);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: every monomial integral with i+j <= 6, rewritten over the
// generators, must agree with its direct quadrature at 20 random levels per
// family; and the three hand-derived degree-3 rewritings must come out
// exactly, for four parameter values:
//   J30 = (h/(4l) - 9/4 + 27/(4l) - 9/(2l^2)) J00 + (3 - 6/l + 9/(2l^2)) J10
//   J12 = ((3/4)h - (3/4)l + 9/4 - 3/(2l)) J00 + (3/(2l)) J10
//   J03 = -9(l-2) J01 + 18(l-1) J11 - 9l J21
bool crit_reduction_oracle(std::string& detail) {
    bool ok = true;
    long double worst = 0;
    int pairs = 0;
    int fidx = 0;
    for (const FamilyCase& fc : four_families()) {
        Reducer red(fc);
        Annulus an = main_annulus(fc);
        std::mt19937_64 rng(3001 + fidx++);
        for (long double h : random_levels(an, 20, rng, 0.03L)) {
            auto gv = generator_vector(fc, an, h);
            for (int i = 0; i + 0 <= 6; ++i) {
                for (int j = 0; i + j <= 6; ++j) {
                    const auto& cv = red.reduce(i, j);
                    long double combo = 0;
                    for (size_t g = 0; g < cv.size(); ++g) combo += cv[g].eval_ld(h) * gv[g].v;
                    long double direct = j_integral(fc, an, h, i, j);
                    long double rel =
                        std::fabs(combo - direct) / std::max<long double>(1, std::fabs(direct));
                    worst = std::max(worst, rel);
                    ok = ok && rel <= kTolReduce;
                    ++pairs;
                }
            }
        }
    }
    int seeds = 0;
    for (const Rat& l : {Rat(1, 2), Rat(1), Rat(3, 2), Rat(-1, 2)}) {
        FamilyCase fc = l > 0 ? make_elliptic(l) : make_hyperbolic(l);
        Reducer red(fc);
        std::vector<PolyQ> e30(6), e12(6), e03(6);
        e30[0] = PolyQ{Rat(-9, 4) + Rat(27, 4) / l - Rat(9, 2) / (l * l), Rat(1, 4) / l};
        e30[1] = PolyQ(Rat(3) - Rat(6) / l + Rat(9, 2) / (l * l));
        e12[0] = PolyQ{Rat(-3, 4) * l + Rat(9, 4) - Rat(3, 2) / l, Rat(3, 4)};
        e12[1] = PolyQ(Rat(3, 2) / l);
        e03[3] = PolyQ(Rat(-9) * (l - Rat(2)));
        e03[4] = PolyQ(Rat(18) * (l - Rat(1)));
        e03[5] = PolyQ(Rat(-9) * l);
        bool match = red.reduce(3, 0) == e30 && red.reduce(1, 2) == e12 && red.reduce(0, 3) == e03;
        ok = ok && match;
        if (!match) {
            detail = fmt("degree-3 rewriting mismatch at lambda = %s", rat_to_string(l).c_str());
            return false;
        }
        seeds += 3;
    }
    detail = fmt("%d monomial/quadrature pairs, max rel diff %.2Le (tol %.0Le); "
                 "%d exact degree-3 rewritings",
                 pairs, worst, kTolReduce, seeds);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: generator-coefficient degrees stay within the family ceilings
// for 50 random perturbations per family, degrees n = 3..9 (2..9 parabolic).
bool crit_degree_audit(std::string& detail) {
    bool ok = true;
    int count = 0;
    int fidx = 0;
    for (const FamilyCase& fc : four_families()) {
        Reducer red(fc);
        std::mt19937_64 rng(4001 + fidx++);
        int nmin = fc.kind == FamilyKind::Parabolic ? 2 : 3;
        for (int k = 0; k < 50; ++k) {
            int n = nmin + k % (9 - nmin + 1);
            PerturbationSpec ps = random_perturbation(rng, n);
            GeneratorCombination gc = melnikov_symbolic(red, ps);
            DegreeReport rep = verify_degrees(fc, n, gc);
            ok = ok && rep.ok;
            ++count;
        }
    }
    detail = fmt("%d random perturbations across degrees 2..9, all coefficient degrees "
                 "within their ceilings",
                 count);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: the parabolic generators with closed forms.  J00 = 2 sqrt(4+2h)
// and J10 = 4 sqrt(4+2h) to 1e-10; |J10''| 4 (h+2)^{3/2} equals 4 sqrt 2
// within 1e-8 and is constant to relative spread 1e-6.
bool crit_parabolic_closed_forms(std::string& detail) {
    FamilyCase fc = make_parabolic();
    Annulus an = main_annulus(fc);
    bool ok = true;
    long double worstJ = 0, worstC = 0;
    std::vector<long double> prods;
    for (long double h : uniform_levels(an, 20, 0.02L)) {
        long double s = std::sqrt(4 + 2 * h);
        long double e00 = std::fabs(j_integral(fc, an, h, 0, 0) - 2 * s);
        long double e10 = std::fabs(j_integral(fc, an, h, 1, 0) - 4 * s);
        worstJ = std::max({worstJ, e00 / std::max<long double>(1, 2 * s),
                           e10 / std::max<long double>(1, 4 * s)});
        Jet3 jet = j_integral_jet(fc, an, h, 1, 0);
        long double prod = std::fabs(jet.d2) * 4 * std::pow(h + 2, 1.5L);
        prods.push_back(prod);
        worstC = std::max(worstC, std::fabs(prod - 4 * std::sqrt(2.0L)));
    }
    ok = ok && worstJ <= kTolClosedForm && worstC <= kTolConstAbs;
    long double pmin = *std::min_element(prods.begin(), prods.end());
    long double pmax = *std::max_element(prods.begin(), prods.end());
    long double mean = 0;
    for (long double p : prods) mean += p;
    mean /= prods.size();
    long double spread = (pmax - pmin) / mean;
    ok = ok && spread <= kTolConstSpread;
    detail = fmt("sqrt forms max rel err %.2Le (tol %.0Le); |J10''| 4(h+2)^1.5 off 4*sqrt2 by "
                 "%.2Le (tol %.0Le), spread %.2Le",
                 worstJ, kTolClosedForm, worstC, kTolConstAbs, spread);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: the lower (return) arc integrated directly equals
// (-1)^{j+1} times the upper-arc integral, 10 random (i, j, h) per family.
bool crit_symmetry_fold(std::string& detail) {
    bool ok = true;
    long double worst = 0;
    int fidx = 0;
    for (const FamilyCase& fc : four_families()) {
        Annulus an = main_annulus(fc);
        std::mt19937_64 rng(6001 + fidx++);
        std::uniform_int_distribution<int> ui(0, 4);
        for (int t = 0; t < 10; ++t) {
            int i = ui(rng), j = ui(rng);
            long double h = random_levels(an, 1, rng, 0.03L)[0];
            long double direct = lower_arc_integral(fc, an, h, i, j, LowerArcMode::Direct);
            long double folded = (j % 2 == 1 ? 1.0L : -1.0L) * j_integral(fc, an, h, i, j);
            long double err =
                std::fabs(direct - folded) / std::max<long double>(1, std::fabs(folded));
            worst = std::max(worst, err);
            ok = ok && err <= kTolFold;
        }
    }
    detail = fmt("40 random (i, j, h) probes, max rel deviation %.2Le (tol %.0Le)", worst, kTolFold);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: the scalar ratio equations D om' = c2 om^2 + c1 om + c0, both
// ratios where defined (first ratio everywhere; second ratio for the
// elliptic, hyperbolic and triangle cases), at 20 interior levels each.
bool crit_riccati(std::string& detail) {
    struct Probe {
        FamilyCase fc;
        RiccatiKind kind;
    };
    std::vector<Probe> probes = {
        {make_elliptic(Rat(1)), RiccatiKind::FirstRatio},
        {make_elliptic(Rat(1)), RiccatiKind::SecondRatio},
        {make_hyperbolic(Rat(-1, 2)), RiccatiKind::FirstRatio},
        {make_hyperbolic(Rat(-1, 2)), RiccatiKind::SecondRatio},
        {make_triangle(), RiccatiKind::FirstRatio},
        {make_triangle(), RiccatiKind::SecondRatio},
        {make_parabolic(), RiccatiKind::FirstRatio},
    };
    bool ok = true;
    long double worst = 0;
    for (const Probe& pr : probes) {
        Annulus an = main_annulus(pr.fc);
        for (long double h : uniform_levels(an, 20, 0.02L)) {
            long double r = riccati_residual(pr.fc, pr.kind, h);
            worst = std::max(worst, r);
            ok = ok && r <= kTolRiccati;
        }
    }
    detail = fmt("7 ratio equations x 20 levels, max residual %.2Le (tol %.0Le)", worst,
                 kTolRiccati);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: for 10 random degree-3 perturbations each of the elliptic
// (lambda = 1) and triangle cases, the after-elimination two-generator part
// admits a second-order annihilating operator: nonempty kernel, coefficient
// degrees within the order cap, and residual <= 1e-5 at 30 levels.  The
// elliptic synthesis system at degree 3 must be exactly 41 equations in 42
// unknowns.
bool crit_annihilator(std::string& detail) {
    bool ok = true;
    long double worst = 0;
    int ell_rows = 0, ell_cols = 0, tri_rows = 0, tri_cols = 0;
    const std::vector<std::pair<FamilyCase, unsigned>> cases = {
        {make_elliptic(Rat(1)), 8001u}, {make_triangle(), 8002u}};
    for (const auto& [fc, seed] : cases) {
        Reducer red(fc);
        PFSystem pf = make_pf_system(fc);
        Annulus an = main_annulus(fc);
        std::mt19937_64 rng(seed);
        int m2 = synthesis_order(fc.kind, 3);
        for (int k = 0; k < 10; ++k) {
            PerturbationSpec ps = random_perturbation(rng, 3);
            GeneratorCombination gc = melnikov_symbolic(red, ps);
            EliminationResult el = eliminate_and_form_F1(pf, gc);
            if (el.degenerate) {
                detail = fmt("%s draw %d: elimination degenerate", family_name(fc).c_str(), k);
                return false;
            }
            Annihilator L = synthesize_L(fc, el.F1, m2);
            ok = ok && L.kernel_dim >= 1;
            ok = ok && L.P2.degree() <= L.m2 && L.P1.degree() <= L.m2 - 1 &&
                 L.P0.degree() <= L.m2 - 2;
            if (fc.kind == FamilyKind::Elliptic) {
                ell_rows = L.rows;
                ell_cols = L.cols;
                ok = ok && L.rows == 41 && L.cols == 42;
            } else {
                tri_rows = L.rows;
                tri_cols = L.cols;
            }
            PolyQ alpha = el.F1.phi1()[0], beta = el.F1.phi1()[1];
            for (long double h : uniform_levels(an, 30, 0.02L)) {
                long double r = annihilator_residual(fc, alpha, beta, L, h);
                worst = std::max(worst, r);
                ok = ok && r <= kTolAnnihilator;
            }
        }
    }
    detail = fmt("20 operators; elliptic system %dx%d (want 41x42), triangle %dx%d; "
                 "max residual %.2Le (tol %.0Le)",
                 ell_rows, ell_cols, tri_rows, tri_cols, worst, kTolAnnihilator);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: triangle structure.  J11 vanishes identically (second
// derivative negligible against J01''), J11/(h - 1/6) is flat, and exact
// Sturm counts certify the interior (0, 1/6) carries no root of the
// second-block determinant; the variant normalization carrying the factor
// (24h - 7) in place of one (6h - 1) is equally root-free there, and a
// widened control interval (0, 1/3) does pick up its root 7/24.
bool crit_triangle_structure(std::string& detail) {
    FamilyCase fc = make_triangle();
    Annulus an = main_annulus(fc);
    PFSystem pf = make_pf_system(fc);
    bool ok = true;
    long double worstJ = 0;
    std::vector<long double> ratios;
    for (long double h : uniform_levels(an, 20, 0.02L)) {
        Jet3 j11 = j_integral_jet(fc, an, h, 1, 1);
        Jet3 j01 = j_integral_jet(fc, an, h, 0, 1);
        long double rel = std::fabs(j11.d2) / std::max<long double>(1, std::fabs(j01.d2));
        worstJ = std::max(worstJ, rel);
        ok = ok && rel <= kTolTriangleJ11;
        ratios.push_back(j_integral(fc, an, h, 1, 1) / (h - 1.0L / 6.0L));
    }
    long double mean = 0;
    for (long double v : ratios) mean += v;
    mean /= ratios.size();
    long double spread = 0;
    for (long double v : ratios) spread = std::max(spread, std::fabs(v - mean));
    ok = ok && spread <= kTolTriangleFlat * std::max<long double>(1, std::fabs(mean));
    PolyQ X = PolyQ::variable();
    PolyQ variant = Rat(1, 128) * X * PolyQ{Rat(-1), Rat(6)} * PolyQ{Rat(-7), Rat(24)};
    int carried_roots = sturm_count(pf.D2, Rat(0), Rat(1, 6));
    int variant_roots = sturm_count(variant, Rat(0), Rat(1, 6));
    int control = sturm_count(PolyQ{Rat(-7), Rat(24)}, Rat(0), Rat(1, 3));
    ok = ok && carried_roots == 0 && variant_roots == 0 && control == 1;
    detail = fmt("|J11''| max %.2Le of |J01''| (tol %.0Le); J11/(h-1/6) spread %.2Le; interior "
                 "roots: carried det %d, (24h-7) variant %d (control on (0,1/3) finds %d)",
                 worstJ, kTolTriangleJ11, spread, carried_roots, variant_roots, control);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 10: the symbolic generator combination and the direct
// line-integral quadrature agree on M; scanned sign-change counts never
// exceed the degree bound over 100 random perturbations per family; and the
// three headline bound values print as 236 / 198 / 48.
bool crit_melnikov_consistency(std::string& detail) {
    bool ok = true;
    long double worst = 0;
    int fidx = 0;
    for (const FamilyCase& fc : four_families()) {
        Reducer red(fc);
        Annulus an = main_annulus(fc);
        std::mt19937_64 rng(10001 + fidx++);
        int nmin = fc.kind == FamilyKind::Parabolic ? 2 : 3;
        for (int t = 0; t < 10; ++t) {
            int n = nmin + t % 3;
            PerturbationSpec ps = random_perturbation(rng, n);
            GeneratorCombination gc = melnikov_symbolic(red, ps);
            for (long double h : random_levels(an, 20, rng, 0.03L)) {
                long double sym = combination_value(fc, an, gc, h);
                long double num = melnikov_numeric(fc, an, ps, h);
                long double rel = std::fabs(sym - num) /
                                  std::max({1.0L, std::fabs(sym), std::fabs(num)});
                worst = std::max(worst, rel);
                ok = ok && rel <= kTolMelnikov;
            }
        }
    }
    int max_seen = 0, scans = 0;
    QuadratureSettings qscan;
    qscan.rel_tol = 1e-8L;
    fidx = 0;
    for (const FamilyCase& fc : four_families()) {
        Annulus an = main_annulus(fc);
        std::mt19937_64 rng(10101 + fidx++);
        int nmin = fc.kind == FamilyKind::Parabolic ? 2 : 3;
        int span = 5 - nmin + 1; // degrees nmin..5
        for (int t = 0; t < 100; ++t) {
            int n = nmin + t % span;
            PerturbationSpec ps = random_perturbation(rng, n);
            ZeroReport rep = scan_zeros(fc, an, ps, 100, 1e-8L, qscan);
            ok = ok && rep.within_bound;
            max_seen = std::max(max_seen, rep.count_sign_changes);
            ++scans;
        }
    }
    int b_ell = theorem_bound(make_elliptic(Rat(1)), 3);
    int b_tri = theorem_bound(make_triangle(), 3);
    int b_par = theorem_bound(make_parabolic(), 2);
    ok = ok && b_ell == 236 && b_tri == 198 && b_par == 48;
    detail = fmt("symbolic vs numeric max rel %.2Le (tol %.0Le); %d scans all within bound "
                 "(max %d zeros seen); bounds %d/%d/%d",
                 worst, kTolMelnikov, scans, max_seen, b_ell, b_tri, b_par);
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 11: the piecewise flow.  Unperturbed return closes to 1e-8; for
// one constructed perturbation per family with a certified sign-change zero
// h* of M, a limit cycle is detected within 0.05 of h* at eps = 1e-3; and
// the sign of the displacement is c0 * sign(eps M) for one global c0.
bool crit_ode_crosscheck(std::string& detail) {
    bool ok = true;
    long double worst0 = 0;
    PerturbationSpec none;
    none.n = 2;
    for (const FamilyCase& fc : four_families()) {
        Annulus an = main_annulus(fc);
        for (long double h : uniform_levels(an, 20, 0.06L)) {
            long double d = std::fabs(displacement_map(fc, an, none, 0.0L, h));
            worst0 = std::max(worst0, d);
            ok = ok && d <= kTolOdeClosure;
        }
    }
    int c0 = 0;
    bool c0_consistent = true;
    long double worst_window = 0;
    std::string zeros_note;
    for (const FamilyCase& fc : four_families()) {
        Annulus an = main_annulus(fc);
        long double lo = ld(an.lo()), len = ld(an.hi()) - lo;
        PerturbationSpec ps;
        long double target;
        if (fc.kind == FamilyKind::Parabolic) {
            // q+ = 1 - x^2/5 has M = (2/15) sqrt(4+2h) (-1-2h): zero at -1/2.
            ps.n = 2;
            ps.q_plus[{0, 0}] = Rat(1);
            ps.q_plus[{2, 0}] = Rat(-1, 5);
            target = -0.5L;
        } else {
            // q+ = a + x with a ~ -J10/J00 at mid-annulus places a zero there.
            target = lo + 0.5L * len;
            long double a =
                -j_integral(fc, an, target, 1, 0) / j_integral(fc, an, target, 0, 0);
            ps.n = 3;
            ps.q_plus[{0, 0}] = Rat(static_cast<long long>(llroundl(a * 1000000.0L)), 1000000);
            ps.q_plus[{1, 0}] = Rat(1);
        }
        ZeroReport rep = scan_zeros(fc, an, ps, 400, 1e-10L);
        long double h_star = 0, best = -1;
        for (const ZeroBracket& z : rep.zeros) {
            if (z.kind != ZeroKind::SignChange) continue;
            long double d = std::fabs(z.h_star - target);
            if (best < 0 || d < best) {
                best = d;
                h_star = z.h_star;
            }
        }
        if (best < 0) {
            detail = fmt("%s: constructed perturbation produced no sign-change zero",
                         family_name(fc).c_str());
            return false;
        }
        // Simplicity: M crosses strictly at h_star (opposite signs just outside).
        GeneratorCombination gc = melnikov_symbolic(fc, ps);
        long double delta = 1e-4L * len;
        long double m_lo = combination_value(fc, an, gc, h_star - delta);
        long double m_hi = combination_value(fc, an, gc, h_star + delta);
        ok = ok && m_lo * m_hi < 0;
        std::vector<long double> cycles = detect_limit_cycles(fc, an, ps, kOdeEps, 40);
        long double window = -1;
        for (long double c : cycles) {
            long double d = std::fabs(c - h_star);
            if (window < 0 || d < window) window = d;
        }
        if (window < 0) {
            detail = fmt("%s: no limit cycle detected near the certified zero",
                         family_name(fc).c_str());
            return false;
        }
        worst_window = std::max(worst_window, window);
        ok = ok && window <= kOdeWindow;
        zeros_note += fmt("%s h*=%.6Lf d=%.1Le; ", family_name(fc).c_str(), h_star, window);
        // Sign correlation away from the zero, one global c0.
        std::vector<long double> hs = uniform_levels(an, 8, 0.06L);
        long double mmax = 0;
        std::vector<long double> ms(hs.size());
        for (size_t k = 0; k < hs.size(); ++k) {
            ms[k] = combination_value(fc, an, gc, hs[k]);
            mmax = std::max(mmax, std::fabs(ms[k]));
        }
        for (size_t k = 0; k < hs.size(); ++k) {
            if (std::fabs(ms[k]) < 1e-3L * mmax) continue;
            long double d = displacement_map(fc, an, ps, kOdeEps, hs[k]);
            if (d == 0) continue;
            int s = ((d > 0) == (ms[k] > 0)) ? 1 : -1;
            if (c0 == 0)
                c0 = s;
            else
                c0_consistent = c0_consistent && s == c0;
        }
    }
    ok = ok && c0_consistent && c0 != 0;
    detail = fmt("closure max %.2Le (tol %.0Le); %sdisplacement sign = %+d * sign(eps M) "
                 "throughout",
                 worst0, kTolOdeClosure, zeros_note.c_str(), c0);
    return ok;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<bool(std::string&)> fn;
        double cap_seconds; // 0 = no cap
    };
    const std::vector<Entry> entries = {
        {1, "determinant factorizations", crit_determinants, 1.0},
        {2, "differential system residuals", crit_system_residuals, 120.0},
        {3, "reduction vs direct quadrature", crit_reduction_oracle, 300.0},
        {4, "coefficient degree ceilings", crit_degree_audit, 60.0},
        {5, "parabolic closed forms", crit_parabolic_closed_forms, 0.0},
        {6, "lower-arc fold", crit_symmetry_fold, 0.0},
        {7, "ratio equations", crit_riccati, 0.0},
        {8, "annihilating operator", crit_annihilator, 0.0},
        {9, "triangle structure", crit_triangle_structure, 0.0},
        {10, "Melnikov consistency and zero bounds", crit_melnikov_consistency, 0.0},
        {11, "piecewise-flow cross-check", crit_ode_crosscheck, 600.0},
    };
    int passed = 0;
    for (const Entry& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = e.fn(detail);
        } catch (const Error& err) {
            detail = fmt("error %s: %s", error_code_name(err.code()), err.what());
        } catch (const std::exception& ex) {
            detail = fmt("exception: %s", ex.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.cap_seconds > 0 && secs > e.cap_seconds) {
            ok = false;
            detail += fmt(" [exceeded %.0f s cap]", e.cap_seconds);
        }
        std::printf("[%2d] %-38s %s %8.2f s  %s\n", e.id, e.name, ok ? "PASS" : "FAIL", secs,
                    detail.c_str());
        std::fflush(stdout);
        if (ok) ++passed;
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, entries.size());
    return passed == static_cast<int>(entries.size()) ? 0 : 1;
}
