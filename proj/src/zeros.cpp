#include "mlab/zeros.hpp"

#include "mlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlab {

namespace {

int sign_of(long double v) { return (v > 0) - (v < 0); }

int family_min_degree(FamilyKind k) {
    return k == FamilyKind::Parabolic ? 2 : 3;
}

// One generator-value row, with the single retry the scan contract allows.
bool try_generator_values(const FamilyCase& fc, const Annulus& an, long double h,
                          const QuadratureSettings& qs, std::vector<long double>& out) {
    const auto& gens = generator_indices(fc.kind);
    for (int attempt = 0; attempt < 2; ++attempt) {
        QuadratureSettings use = qs;
        if (attempt == 1) use.max_refinements += 2;
        try {
            std::vector<long double> v(gens.size());
            for (size_t g = 0; g < gens.size(); ++g)
                v[g] = j_integral(fc, an, h, gens[g].first, gens[g].second, use);
            out = std::move(v);
            return true;
        } catch (const Error&) {
        }
    }
    return false;
}

} // namespace

long double melnikov_numeric(const FamilyCase& fc, const Annulus& an,
                             const PerturbationSpec& ps, long double h,
                             const QuadratureSettings& qs) {
    long double m = 0;
    // Upper arc: q dx directly, p dy by parts.
    for (const auto& [ij, b] : ps.q_plus)
        m += to_ld(b) * j_integral(fc, an, h, ij.first, ij.second, qs);
    for (const auto& [ij, a] : ps.p_plus) {
        const auto [i, j] = ij;
        if (i == 0) continue;
        m += to_ld(a) * (static_cast<long double>(i) / (j + 1)) *
             j_integral(fc, an, h, i - 1, j + 1, qs);
    }
    // Lower arc: the same pieces fold by the parity of the y power,
    // integral of x^I y^J dx over the return arc = (-1)^(J+1) J_{I,J}.
    for (const auto& [ij, b] : ps.q_minus) {
        const auto [i, j] = ij;
        long double fold = (j % 2 == 0) ? -1.0L : 1.0L;
        m += to_ld(b) * fold * j_integral(fc, an, h, i, j, qs);
    }
    for (const auto& [ij, a] : ps.p_minus) {
        const auto [i, j] = ij;
        if (i == 0) continue;
        long double fold = (j % 2 == 0) ? 1.0L : -1.0L; // parity of j+1
        m += to_ld(a) * fold * (static_cast<long double>(i) / (j + 1)) *
             j_integral(fc, an, h, i - 1, j + 1, qs);
    }
    return m;
}

long double combination_value(const FamilyCase& fc, const Annulus& an,
                              const GeneratorCombination& gc, long double h,
                              const QuadratureSettings& qs) {
    long double m = 0;
    for (size_t g = 0; g < gc.gens.size(); ++g)
        m += gc.coeff[g].eval_ld(h) *
             j_integral(fc, an, h, gc.gens[g].first, gc.gens[g].second, qs);
    return m;
}

int grid_threads() {
    const char* env = std::getenv("MLAB_THREADS");
    if (env) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
#ifdef _OPENMP
    return std::max(1, omp_get_max_threads());
#else
    return 1;
#endif
}

GeneratorGrid generator_grid(const FamilyCase& fc, const Annulus& an,
                             const std::vector<long double>& hs,
                             const QuadratureSettings& qs, bool parallel) {
    GeneratorGrid grid;
    grid.hs = hs;
    const int n = static_cast<int>(hs.size());
    grid.values.assign(hs.size(), {});
    grid.ok.assign(hs.size(), 0);
    const int nt = parallel ? grid_threads() : 1;
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (parallel && nt > 1)
#endif
    for (int k = 0; k < n; ++k) {
        std::vector<long double> row;
        if (try_generator_values(fc, an, hs[static_cast<size_t>(k)], qs, row)) {
            grid.values[static_cast<size_t>(k)] = std::move(row);
            grid.ok[static_cast<size_t>(k)] = 1;
        }
    }
    for (char o : grid.ok)
        if (!o) ++grid.dropped;
    return grid;
}

int theorem_bound(const FamilyCase& fc, int n) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic:
        if (n < 3) fail(ErrorCode::DegreeTooSmall, "theorem_bound: needs n >= 3");
        return 25 * n + 161;
    case FamilyKind::Triangle:
        if (n < 3) fail(ErrorCode::DegreeTooSmall, "theorem_bound: needs n >= 3");
        return 24 * n + 126;
    case FamilyKind::Parabolic:
        if (n < 2) fail(ErrorCode::DegreeTooSmall, "theorem_bound: needs n >= 2");
        return 12 * n + 24;
    }
    fail(ErrorCode::BadInput, "theorem_bound: unknown family");
}

ZeroReport scan_zeros(const FamilyCase& fc, const Annulus& an, const PerturbationSpec& ps,
                      int grid_size, long double refine_tol, const QuadratureSettings& qs) {
    if (grid_size < 100) fail(ErrorCode::BadInput, "scan_zeros: grid_size must be >= 100");
    if (refine_tol <= 0) fail(ErrorCode::BadInput, "scan_zeros: refine_tol must be positive");

    ZeroReport rep;
    rep.annulus = an;
    rep.grid_size = grid_size;
    rep.bound = theorem_bound(fc, std::max(ps.n, family_min_degree(fc.kind)));

    const long double alo = to_ld(an.lo()), ahi = to_ld(an.hi());
    const long double margin = kScanMarginFrac * (ahi - alo);
    const long double lo = alo + margin, hi = ahi - margin;

    GeneratorCombination gc = melnikov_symbolic(fc, ps);
    std::vector<long double> hs(static_cast<size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k)
        hs[static_cast<size_t>(k)] = lo + (hi - lo) * k / (grid_size - 1);
    GeneratorGrid grid = generator_grid(fc, an, hs, qs);
    rep.dropped_points = grid.dropped;

    // M on the kept points.
    std::vector<long double> mh, mv;
    mh.reserve(hs.size());
    mv.reserve(hs.size());
    for (size_t k = 0; k < hs.size(); ++k) {
        if (!grid.ok[k]) continue;
        long double m = 0;
        for (size_t g = 0; g < gc.gens.size(); ++g)
            m += gc.coeff[g].eval_ld(hs[k]) * grid.values[k][g];
        mh.push_back(hs[k]);
        mv.push_back(m);
    }
    if (mh.size() < 2) {
        rep.within_bound = true;
        return rep;
    }

    long double scale = 0;
    for (long double v : mv) scale = std::max(scale, std::fabs(v));
    if (scale < 1e-300L) { // numerically the zero function: no isolated zeros
        rep.within_bound = true;
        return rep;
    }

    auto eval_m = [&](long double h) -> long double {
        for (int attempt = 0; attempt < 2; ++attempt) {
            QuadratureSettings use = qs;
            if (attempt == 1) use.max_refinements += 2;
            try {
                return combination_value(fc, an, gc, h, use);
            } catch (const Error&) {
            }
        }
        return std::numeric_limits<long double>::quiet_NaN();
    };

    std::vector<char> change_left(mv.size(), 0); // sign change on edge (k-1, k)
    for (size_t k = 0; k + 1 < mv.size(); ++k) {
        if (sign_of(mv[k]) * sign_of(mv[k + 1]) >= 0) continue;
        change_left[k + 1] = 1;
        long double blo = mh[k], bhi = mh[k + 1];
        long double flo = mv[k];
        long double star;
        while (bhi - blo > refine_tol) {
            long double mid = 0.5L * (blo + bhi);
            long double fm = eval_m(mid);
            if (std::isnan(fm)) break; // keep the bracket reached so far
            if (fm == 0) {
                blo = bhi = mid;
                break;
            }
            if (sign_of(fm) == sign_of(flo)) {
                blo = mid;
                flo = fm;
            } else {
                bhi = mid;
            }
        }
        star = 0.5L * (blo + bhi);
        rep.zeros.push_back({blo, bhi, star, ZeroKind::SignChange});
        ++rep.count_sign_changes;
    }

    // Tangency suspects: strict interior local minima of |M| dipping below
    // the relative threshold, away from any detected sign change.
    const long double noise = kTangencyRel * scale;
    long double last_hi = -std::numeric_limits<long double>::infinity();
    for (const ZeroBracket& z : rep.zeros) last_hi = std::max(last_hi, z.hi);
    std::vector<ZeroBracket> suspects;
    for (size_t k = 1; k + 1 < mv.size(); ++k) {
        if (change_left[k] || change_left[k + 1]) continue;
        long double a = std::fabs(mv[k]);
        if (a >= noise) continue;
        if (!(a < std::fabs(mv[k - 1]) && a < std::fabs(mv[k + 1]))) continue;
        if (!suspects.empty() && suspects.back().hi >= mh[k - 1]) continue; // overlap
        suspects.push_back({mh[k - 1], mh[k + 1], mh[k], ZeroKind::TangencySuspect});
    }
    rep.zeros.insert(rep.zeros.end(), suspects.begin(), suspects.end());
    std::sort(rep.zeros.begin(), rep.zeros.end(),
              [](const ZeroBracket& a, const ZeroBracket& b) { return a.h_star < b.h_star; });

    rep.within_bound = rep.count_sign_changes <= rep.bound;
    return rep;
}

} // namespace mlab
