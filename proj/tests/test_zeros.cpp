#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlab/errors.hpp"
#include "mlab/family.hpp"
#include "mlab/pert.hpp"
#include "mlab/quadrature.hpp"
#include "mlab/reduction.hpp"
#include "mlab/zeros.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

using namespace mlab;

namespace {

Rat r(long long n, long long d = 1) { return Rat(n, d); }

// q+ = 1 - x^2/5 on the parabolic annulus: M = 2 sqrt(4+2h) (-1-2h)/15,
// one simple zero at h = -1/2.
PerturbationSpec shifted_pert() {
    PerturbationSpec ps;
    ps.n = 2;
    ps.q_plus = {{{0, 0}, r(1)}, {{2, 0}, r(-1, 5)}};
    return ps;
}

// q+ = 113 - 33 x^2 + (5/4) x^4: M = 2 sqrt(4+2h) (h+1)^2, a double zero
// at h = -1 that never changes sign.
PerturbationSpec tangency_pert() {
    PerturbationSpec ps;
    ps.n = 4;
    ps.q_plus = {{{0, 0}, r(113)}, {{2, 0}, r(-33)}, {{4, 0}, r(5, 4)}};
    return ps;
}

} // namespace

TEST_CASE("bound table") {
    CHECK(theorem_bound(make_elliptic(Rat(1)), 3) == 236);
    CHECK(theorem_bound(make_elliptic(Rat(1, 2)), 5) == 286);
    CHECK(theorem_bound(make_hyperbolic(Rat(-1, 2)), 4) == 261);
    CHECK(theorem_bound(make_triangle(), 3) == 198);
    CHECK(theorem_bound(make_triangle(), 6) == 270);
    CHECK(theorem_bound(make_parabolic(), 2) == 48);
    CHECK(theorem_bound(make_parabolic(), 12) == 168);
    for (auto& [fc, n] : std::vector<std::pair<FamilyCase, int>>{
             {make_elliptic(Rat(1)), 2}, {make_triangle(), 2}, {make_parabolic(), 1}}) {
        try {
            theorem_bound(fc, n);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegreeTooSmall);
        }
    }
}

TEST_CASE("direct evaluation, elementary perturbations") {
    FamilyCase fc = make_parabolic();
    Annulus an = main_annulus(fc);

    PerturbationSpec zero;
    zero.n = 2;
    CHECK(melnikov_numeric(fc, an, zero, -1.0L) == 0.0L);

    PerturbationSpec qone;
    qone.n = 2;
    qone.q_plus = {{{0, 0}, r(1)}};
    for (long double h : {-1.7L, -0.9L, -0.2L}) {
        long double m = melnikov_numeric(fc, an, qone, h);
        CHECK(m == j_integral(fc, an, h, 0, 0));
        CHECK(m > 0);
        CHECK(std::fabs(m - 2 * std::sqrt(4 + 2 * h)) <= 1e-9L);
    }

    PerturbationSpec qlow;
    qlow.n = 2;
    qlow.q_minus = {{{0, 0}, r(1)}};
    CHECK(std::fabs(melnikov_numeric(fc, an, qlow, -0.9L) +
                    j_integral(fc, an, -0.9L, 0, 0)) <= 1e-15L);

    // p terms with no x factor contribute nothing; p = x folds to J_{0,1}.
    PerturbationSpec py;
    py.n = 2;
    py.p_plus = {{{0, 1}, r(1)}};
    CHECK(melnikov_numeric(fc, an, py, -0.9L) == 0.0L);
    PerturbationSpec px;
    px.n = 2;
    px.p_plus = {{{1, 0}, r(1)}};
    CHECK(std::fabs(melnikov_numeric(fc, an, px, -0.9L) -
                    j_integral(fc, an, -0.9L, 0, 1)) <= 1e-15L);
}

TEST_CASE("direct evaluation matches the independent line-integral values") {
    // Frozen from 30-digit tanh-sinh quadrature of the raw line integrals
    // (no integration by parts, no parity fold).
    struct Pin {
        FamilyCase fc;
        PerturbationSpec ps;
        long double h, want;
    };
    PerturbationSpec ell;
    ell.n = 3;
    ell.p_plus = {{{1, 0}, r(1)}, {{2, 1}, r(1, 2)}, {{0, 3}, r(-1, 3)}};
    ell.q_plus = {{{0, 0}, r(1)}, {{1, 1}, r(-1)}, {{3, 0}, r(1, 4)}};
    ell.p_minus = {{{1, 0}, r(-1, 2)}, {{1, 2}, r(1)}};
    ell.q_minus = {{{0, 0}, r(1, 3)}, {{2, 0}, r(1)}, {{0, 2}, r(-1, 5)}};
    PerturbationSpec tri;
    tri.n = 3;
    tri.p_plus = {{{1, 0}, r(1, 2)}, {{2, 1}, r(1)}};
    tri.q_plus = {{{0, 1}, r(1)}, {{3, 0}, r(-1, 2)}};
    tri.p_minus = {{{2, 0}, r(1)}, {{0, 1}, r(1, 4)}};
    tri.q_minus = {{{1, 0}, r(-1)}, {{2, 1}, r(1, 3)}};
    PerturbationSpec par;
    par.n = 2;
    par.p_plus = {{{1, 0}, r(1)}, {{1, 1}, r(1, 2)}};
    par.q_plus = {{{0, 0}, r(-1)}, {{2, 0}, r(1, 3)}, {{1, 1}, r(1)}};
    par.p_minus = {{{1, 0}, r(1, 2)}};
    par.q_minus = {{{0, 1}, r(1)}, {{0, 0}, r(1, 2)}};

    std::vector<Pin> pins = {
        {make_elliptic(Rat(1)), ell, -1.4L, 0.040778879191929016L},
        {make_elliptic(Rat(1)), ell, -0.8L, 0.667778448583980504L},
        {make_triangle(), tri, 1.0L / 12, 0.472863418721239878L},
        {make_triangle(), tri, 0.05L, 0.267741021769140391L},
        {make_triangle(), tri, 0.11L, 0.655778483385134438L},
        {make_parabolic(), par, -1.0L, 7.66871743224508397L},
        {make_parabolic(), par, -0.5L, 12.2031569944914321L},
    };
    for (const Pin& p : pins) {
        Annulus an = main_annulus(p.fc);
        long double got = melnikov_numeric(p.fc, an, p.ps, p.h);
        INFO(family_name(p.fc), " h=", static_cast<double>(p.h));
        CHECK(std::fabs(got - p.want) <= 1e-8L * std::max(1.0L, std::fabs(p.want)));
        // and the symbolic route lands on the same value
        long double sym = combination_value(p.fc, an, melnikov_symbolic(p.fc, p.ps), p.h);
        CHECK(std::fabs(got - sym) <= 1e-8L * std::max(1.0L, std::fabs(got)));
    }
}

TEST_CASE("direct and symbolic routes agree on random perturbations") {
    std::mt19937_64 rng(20240817);
    std::vector<FamilyCase> fams = {make_elliptic(Rat(1)), make_elliptic(Rat(5, 7)),
                                    make_hyperbolic(Rat(-1, 2)), make_parabolic(),
                                    make_triangle()};
    for (const FamilyCase& fc : fams) {
        Annulus an = main_annulus(fc);
        long double alo = to_ld(an.lo()), ahi = to_ld(an.hi());
        for (int trial = 0; trial < 2; ++trial) {
            PerturbationSpec ps = random_perturbation(rng, 4);
            GeneratorCombination gc = melnikov_symbolic(fc, ps);
            for (long double t : {0.25L, 0.5L, 0.8L}) {
                long double h = alo + t * (ahi - alo);
                long double num = melnikov_numeric(fc, an, ps, h);
                long double sym = combination_value(fc, an, gc, h);
                INFO(family_name(fc), " trial ", trial, " h=", static_cast<double>(h));
                CHECK(std::fabs(num - sym) <=
                      1e-6L * std::max({1.0L, std::fabs(num), std::fabs(sym)}));
            }
        }
    }
}

TEST_CASE("generator grid tabulates the pointwise values") {
    FamilyCase fc = make_elliptic(Rat(1));
    Annulus an = main_annulus(fc);
    std::vector<long double> hs = {-1.6L, -1.1L, -0.7L, -0.2L};
    GeneratorGrid par = generator_grid(fc, an, hs, {}, true);
    GeneratorGrid ser = generator_grid(fc, an, hs, {}, false);
    REQUIRE(par.values.size() == hs.size());
    CHECK(par.dropped == 0);
    const auto& gens = generator_indices(fc.kind);
    for (size_t k = 0; k < hs.size(); ++k) {
        REQUIRE(par.ok[k] == 1);
        REQUIRE(par.values[k].size() == gens.size());
        for (size_t g = 0; g < gens.size(); ++g) {
            CHECK(par.values[k][g] ==
                  j_integral(fc, an, hs[k], gens[g].first, gens[g].second));
            CHECK(par.values[k][g] == ser.values[k][g]); // bitwise identical
        }
    }

    // Starved settings fail, get retried once, then drop the point.
    QuadratureSettings starved;
    starved.rel_tol = 1e-30L;
    starved.nodes = 8;
    starved.max_refinements = 0;
    GeneratorGrid bad = generator_grid(fc, an, {-1.0L, -0.5L}, starved);
    CHECK(bad.dropped == 2);
    CHECK(bad.ok[0] == 0);

    setenv("MLAB_THREADS", "3", 1);
    CHECK(grid_threads() == 3);
    unsetenv("MLAB_THREADS");
    CHECK(grid_threads() >= 1);
}

TEST_CASE("scan over a fixed-sign perturbation finds nothing") {
    PerturbationSpec qone;
    qone.n = 0;
    qone.q_plus = {{{0, 0}, r(1)}};
    {
        FamilyCase fc = make_parabolic();
        ZeroReport rep = scan_zeros(fc, main_annulus(fc), qone, 120);
        CHECK(rep.zeros.empty());
        CHECK(rep.count_sign_changes == 0);
        CHECK(rep.bound == 48); // degree raised to the family minimum
        CHECK(rep.within_bound);
        CHECK(rep.dropped_points == 0);
    }
    {
        FamilyCase fc = make_elliptic(Rat(1));
        ZeroReport rep = scan_zeros(fc, main_annulus(fc), qone, 100);
        CHECK(rep.count_sign_changes == 0);
        CHECK(rep.bound == 236);
        CHECK(rep.within_bound);
    }
    FamilyCase fc = make_parabolic();
    CHECK_THROWS_AS(scan_zeros(fc, main_annulus(fc), qone, 99), Error);
    CHECK_THROWS_AS(scan_zeros(fc, main_annulus(fc), qone, 200, 0.0L), Error);
}

TEST_CASE("scan finds the constructed simple zero") {
    FamilyCase fc = make_parabolic();
    Annulus an = main_annulus(fc);
    ZeroReport rep = scan_zeros(fc, an, shifted_pert(), 400);
    REQUIRE(rep.count_sign_changes == 1);
    REQUIRE(rep.zeros.size() >= 1);
    const ZeroBracket& z = rep.zeros[0];
    CHECK(z.kind == ZeroKind::SignChange);
    CHECK(std::fabs(z.h_star + 0.5L) <= 1e-7L);
    CHECK(z.hi - z.lo <= 1e-9L);
    CHECK(rep.within_bound);

    // interior and ordered brackets
    long double len = to_ld(an.hi()) - to_ld(an.lo());
    for (const ZeroBracket& b : rep.zeros) {
        CHECK(b.lo >= to_ld(an.lo()) + kScanMarginFrac * len - 1e-15L);
        CHECK(b.hi <= to_ld(an.hi()) - kScanMarginFrac * len + 1e-15L);
        CHECK(b.lo <= b.h_star);
        CHECK(b.h_star <= b.hi);
    }
}

TEST_CASE("scan flags the constructed tangency") {
    FamilyCase fc = make_parabolic();
    ZeroReport rep = scan_zeros(fc, main_annulus(fc), tangency_pert(), 400);
    CHECK(rep.count_sign_changes == 0);
    CHECK(rep.bound == 72);
    CHECK(rep.within_bound);
    REQUIRE(rep.zeros.size() >= 1);
    bool found = false;
    for (const ZeroBracket& z : rep.zeros) {
        CHECK(z.kind == ZeroKind::TangencySuspect);
        if (std::fabs(z.h_star + 1.0L) <= 0.02L) found = true;
    }
    CHECK(found);
    for (size_t i = 0; i + 1 < rep.zeros.size(); ++i)
        CHECK(rep.zeros[i].hi <= rep.zeros[i + 1].lo);
}

TEST_CASE("scaling the perturbation leaves the brackets unchanged") {
    FamilyCase fc = make_parabolic();
    Annulus an = main_annulus(fc);
    ZeroReport base = scan_zeros(fc, an, shifted_pert(), 150);
    for (const Rat& c : {r(3, 2), r(-2)}) {
        ZeroReport scaled = scan_zeros(fc, an, scale_perturbation(shifted_pert(), c), 150);
        REQUIRE(scaled.zeros.size() == base.zeros.size());
        CHECK(scaled.count_sign_changes == base.count_sign_changes);
        for (size_t i = 0; i < base.zeros.size(); ++i) {
            CHECK(scaled.zeros[i].lo == base.zeros[i].lo);
            CHECK(scaled.zeros[i].hi == base.zeros[i].hi);
            CHECK(scaled.zeros[i].h_star == base.zeros[i].h_star);
        }
    }
    // and M itself scales pointwise
    long double m1 = melnikov_numeric(fc, an, shifted_pert(), -0.75L);
    long double m2 = melnikov_numeric(fc, an, scale_perturbation(shifted_pert(), r(3, 2)), -0.75L);
    CHECK(std::fabs(m2 - 1.5L * m1) <= 1e-12L * std::max(1.0L, std::fabs(m1)));
}

TEST_CASE("random perturbations stay within the bound") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 3; ++t) {
        FamilyCase fc = make_triangle();
        ZeroReport rep = scan_zeros(fc, main_annulus(fc), random_perturbation(rng, 3), 100);
        CHECK(rep.within_bound);
        FamilyCase fp = make_parabolic();
        ZeroReport rp = scan_zeros(fp, main_annulus(fp), random_perturbation(rng, 2), 100);
        CHECK(rp.within_bound);
    }
}
