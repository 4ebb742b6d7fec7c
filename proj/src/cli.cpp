#include "mlab/errors.hpp"
#include "mlab/family.hpp"
#include "mlab/odecheck.hpp"
#include "mlab/pert.hpp"
#include "mlab/pf.hpp"
#include "mlab/quadrature.hpp"
#include "mlab/reduction.hpp"
#include "mlab/synthesis.hpp"
#include "mlab/zeros.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace mlab;
using nlohmann::json;

namespace {

std::string fmt(long double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17Lg", v);
    return buf;
}

std::string side_name(AnnulusSide s) {
    switch (s) {
    case AnnulusSide::Right: return "right";
    case AnnulusSide::Left: return "left";
    case AnnulusSide::Main: return "main";
    }
    return "?";
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::BadInput, "cannot write " + path);
    out << j.dump(2) << "\n";
}

// ---- family selection ------------------------------------------------------

struct FamilyOpt {
    std::string family;
    std::string lambda;
};

void add_family_flags(CLI::App* sub, FamilyOpt& fo, bool required) {
    auto* o = sub->add_option("--family", fo.family,
                              "elliptic | hyperbolic | parabolic | triangle")
                  ->check(CLI::IsMember({"elliptic", "hyperbolic", "parabolic", "triangle"}));
    if (required) o->required();
    sub->add_option("--lambda", fo.lambda,
                    "cubic parameter as a rational (elliptic default 1, hyperbolic -1/2)");
}

FamilyCase resolve_family(const FamilyOpt& fo) {
    if (fo.family == "elliptic")
        return make_elliptic(fo.lambda.empty() ? Rat(1) : rat_from_string(fo.lambda));
    if (fo.family == "hyperbolic")
        return make_hyperbolic(fo.lambda.empty() ? Rat(-1, 2) : rat_from_string(fo.lambda));
    if (fo.family == "parabolic") return make_parabolic();
    if (fo.family == "triangle") return make_triangle();
    fail(ErrorCode::BadInput, "unknown family: " + fo.family);
}

std::vector<FamilyCase> chosen_families(const FamilyOpt& fo) {
    if (!fo.family.empty()) return {resolve_family(fo)};
    return {make_elliptic(Rat(1)), make_hyperbolic(Rat(-1, 2)), make_parabolic(),
            make_triangle()};
}

int family_min_n(FamilyKind k) { return k == FamilyKind::Parabolic ? 2 : 3; }

PerturbationSpec read_pert(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadInput, "cannot read perturbation file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return perturbation_from_json(ss.str());
}

std::vector<long double> sample_levels(const Annulus& an, int samples,
                                       long double mfrac = 0.02L) {
    long double lo = to_ld(an.lo()), len = to_ld(an.hi()) - lo;
    std::vector<long double> hs;
    if (samples <= 1) return {lo + 0.5L * len};
    hs.reserve(static_cast<size_t>(samples));
    for (int k = 0; k < samples; ++k)
        hs.push_back(lo + len * (mfrac + (1 - 2 * mfrac) * k / (samples - 1)));
    return hs;
}

// ---- verification plumbing -------------------------------------------------

struct CheckRow {
    std::string name;
    long double residual, tol;
    bool pass;
};

void add_check(std::vector<CheckRow>& rows, const std::string& name, long double residual,
               long double tol) {
    rows.push_back({name, residual, tol, residual <= tol});
}

int finish_checks(const std::string& suite, const std::vector<CheckRow>& rows,
                  const std::string& json_path) {
    size_t passed = 0;
    std::printf("%-52s %12s %9s  %s\n", "check", "residual", "tol", "status");
    for (const CheckRow& r : rows) {
        std::printf("%-52s %12.3Le %9.1Le  %s\n", r.name.c_str(), r.residual, r.tol,
                    r.pass ? "pass" : "FAIL");
        if (r.pass) ++passed;
    }
    std::printf("summary: %zu/%zu checks passed\n", passed, rows.size());
    json j;
    j["suite"] = suite;
    j["pass"] = passed == rows.size();
    j["checks"] = json::array();
    for (const CheckRow& r : rows)
        j["checks"].push_back({{"name", r.name},
                               {"residual", static_cast<double>(r.residual)},
                               {"tol", static_cast<double>(r.tol)},
                               {"pass", r.pass}});
    std::cout << j.dump() << "\n";
    if (!json_path.empty()) write_json_file(json_path, j);
    return passed == rows.size() ? 0 : 1;
}

template <typename F>
long double max_residual(const std::vector<long double>& hs, F&& f) {
    long double m = 0;
    for (long double h : hs) m = std::max(m, f(h));
    return m;
}

// ---- plot and table output -------------------------------------------------

void write_csv_file(const std::string& path, const char* header,
                    const std::vector<long double>& xs, const std::vector<long double>& ys,
                    const std::vector<char>& ok) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::BadInput, "cannot write " + path);
    out << header << "\n";
    for (size_t k = 0; k < xs.size(); ++k) {
        if (!ok.empty() && !ok[k]) continue;
        out << fmt(xs[k]) << "," << fmt(ys[k]) << "\n";
    }
}

void write_svg_file(const std::string& path, const std::string& title,
                    const std::vector<long double>& hs, const std::vector<long double>& ms,
                    const std::vector<char>& ok, const std::vector<long double>& zeros) {
    const double L = 70, R = 780, T = 34, B = 440;
    double hlo = static_cast<double>(hs.front()), hhi = static_cast<double>(hs.back());
    double mlo = 0, mhi = 0;
    bool any = false;
    for (size_t k = 0; k < ms.size(); ++k) {
        if (!ok.empty() && !ok[k]) continue;
        double v = static_cast<double>(ms[k]);
        if (!any) mlo = mhi = v, any = true;
        mlo = std::min(mlo, v);
        mhi = std::max(mhi, v);
    }
    if (!any) mlo = -1, mhi = 1;
    mlo = std::min(mlo, 0.0);
    mhi = std::max(mhi, 0.0);
    double pad = 0.05 * (mhi - mlo);
    if (pad == 0) pad = 1;
    mlo -= pad;
    mhi += pad;
    auto X = [&](double h) { return L + (R - L) * (h - hlo) / (hhi - hlo); };
    auto Y = [&](double m) { return B - (B - T) * (m - mlo) / (mhi - mlo); };

    std::ofstream out(path);
    if (!out) fail(ErrorCode::BadInput, "cannot write " + path);
    char buf[512];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" "
           "viewBox=\"0 0 800 480\">\n<rect width=\"800\" height=\"480\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                  "stroke=\"#999\"/>\n",
                  L, T, R - L, B - T);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#bbb\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  L, Y(0), R, Y(0));
    out << buf;
    out << "<path d=\"";
    bool pen = false;
    for (size_t k = 0; k < hs.size(); ++k) {
        if (!ok.empty() && !ok[k]) {
            pen = false;
            continue;
        }
        std::snprintf(buf, sizeof buf, "%c%.2f %.2f ", pen ? 'L' : 'M',
                      X(static_cast<double>(hs[k])), Y(static_cast<double>(ms[k])));
        out << buf;
        pen = true;
    }
    out << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
    for (long double z : zeros) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#c0392b\"/>\n",
                      X(static_cast<double>(z)), Y(0));
        out << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
                  "%s</text>\n",
                  L, title.c_str());
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.6g</text>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.6g</text>\n",
                  L, B + 16.0, hlo, R, B + 16.0, hhi);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"end\">%.3g</text>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"end\">%.3g</text>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"end\">0</text>\n",
                  L - 6.0, T + 4.0, mhi, L - 6.0, B + 4.0, mlo, L - 6.0, Y(0) + 4.0);
    out << buf;
    out << "</svg>\n";
}

// ---- subcommands -----------------------------------------------------------

int run_families(const std::string& json_path) {
    std::printf("%-24s %-8s %-6s %-12s %-12s %s\n", "family", "lambda", "side", "h_center",
                "h_polycycle", "center_x");
    json out = json::array();
    for (const FamilyCase& fc : chosen_families(FamilyOpt{})) {
        json jf;
        jf["family"] = family_name(fc);
        jf["lambda"] = rat_to_string(fc.lambda);
        jf["annuli"] = json::array();
        for (const Annulus& an : annuli(fc)) {
            std::printf("%-24s %-8s %-6s %-12s %-12s %s\n", family_name(fc).c_str(),
                        rat_to_string(fc.lambda).c_str(), side_name(an.side).c_str(),
                        rat_to_string(an.h_center).c_str(),
                        rat_to_string(an.h_polycycle).c_str(),
                        rat_to_string(an.center_x).c_str());
            jf["annuli"].push_back({{"side", side_name(an.side)},
                                    {"h_center", rat_to_string(an.h_center)},
                                    {"h_polycycle", rat_to_string(an.h_polycycle)},
                                    {"center_x", rat_to_string(an.center_x)}});
        }
        out.push_back(jf);
    }
    if (!json_path.empty()) write_json_file(json_path, out);
    return 0;
}

int run_integral(const FamilyOpt& fo, int i, int j, long double h,
                 const std::string& json_path) {
    FamilyCase fc = resolve_family(fo);
    Annulus an = main_annulus(fc);
    long double v = j_integral(fc, an, h, i, j);
    std::printf("%s\n", fmt(v).c_str());
    if (!json_path.empty())
        write_json_file(json_path, {{"family", family_name(fc)},
                                    {"i", i},
                                    {"j", j},
                                    {"h", static_cast<double>(h)},
                                    {"value", static_cast<double>(v)}});
    return 0;
}

int run_bound(const FamilyOpt& fo, int n, const std::string& json_path) {
    FamilyCase fc = resolve_family(fo);
    if (n >= 0) {
        int b = theorem_bound(fc, n);
        std::printf("%d\n", b);
        if (!json_path.empty())
            write_json_file(json_path,
                            {{"family", family_name(fc)}, {"n", n}, {"bound", b}});
        return 0;
    }
    int nmin = family_min_n(fc.kind);
    std::printf("%-4s %s\n", "n", "bound");
    json rows = json::array();
    for (int k = nmin; k < nmin + 10; ++k) {
        int b = theorem_bound(fc, k);
        std::printf("%-4d %d\n", k, b);
        rows.push_back({{"n", k}, {"bound", b}});
    }
    if (!json_path.empty())
        write_json_file(json_path, {{"family", family_name(fc)}, {"rows", rows}});
    return 0;
}

int run_reduce(const FamilyOpt& fo, const std::string& pert_path,
               const std::string& json_path) {
    FamilyCase fc = resolve_family(fo);
    PerturbationSpec ps = read_pert(pert_path);
    GeneratorCombination gc = melnikov_symbolic(fc, ps);
    DegreeReport dr = verify_degrees(fc, ps.n, gc);
    std::printf("%-6s %-4s %-8s  %s\n", "gen", "deg", "ceiling", "coefficient");
    for (size_t g = 0; g < gc.gens.size(); ++g) {
        std::string nm = "J" + std::to_string(gc.gens[g].first) +
                         std::to_string(gc.gens[g].second);
        std::printf("%-6s %-4d %-8d  %s\n", nm.c_str(), dr.observed[g], dr.ceiling[g],
                    gc.coeff[g].to_string().c_str());
    }
    std::printf("degrees within ceilings: %s\n", dr.ok ? "yes" : "NO");
    json j;
    j["family"] = family_name(fc);
    j["n"] = ps.n;
    j["generators"] = json::array();
    for (size_t g = 0; g < gc.gens.size(); ++g)
        j["generators"].push_back({{"i", gc.gens[g].first},
                                   {"j", gc.gens[g].second},
                                   {"coefficient", gc.coeff[g].to_string()},
                                   {"degree", dr.observed[g]},
                                   {"ceiling", dr.ceiling[g]}});
    j["degrees_ok"] = dr.ok;
    std::cout << j.dump() << "\n";
    if (!json_path.empty()) write_json_file(json_path, j);
    return dr.ok ? 0 : 1;
}

int run_melnikov(const FamilyOpt& fo, const std::string& pert_path, bool have_h,
                 long double h, int grid, long double refine_tol, const std::string& csv,
                 const std::string& svg, const std::string& json_path) {
    FamilyCase fc = resolve_family(fo);
    Annulus an = main_annulus(fc);
    PerturbationSpec ps = read_pert(pert_path);

    if (have_h) {
        GeneratorCombination gc = melnikov_symbolic(fc, ps);
        long double ms = combination_value(fc, an, gc, h);
        long double mq = melnikov_numeric(fc, an, ps, h);
        long double rel = std::fabs(ms - mq) /
                          std::max({1.0L, std::fabs(ms), std::fabs(mq)});
        std::printf("M_symbolic   = %s\nM_quadrature = %s\nrel_diff     = %.3Le\n",
                    fmt(ms).c_str(), fmt(mq).c_str(), rel);
        json j = {{"family", family_name(fc)},
                  {"h", static_cast<double>(h)},
                  {"M_symbolic", static_cast<double>(ms)},
                  {"M_quadrature", static_cast<double>(mq)},
                  {"rel_diff", static_cast<double>(rel)}};
        std::cout << j.dump() << "\n";
        if (!json_path.empty()) write_json_file(json_path, j);
        return 0;
    }

    ZeroReport rep = scan_zeros(fc, an, ps, grid, refine_tol);
    std::printf("family: %s   annulus: (%s, %s)   grid: %d\n", family_name(fc).c_str(),
                rat_to_string(rep.annulus.lo()).c_str(),
                rat_to_string(rep.annulus.hi()).c_str(), rep.grid_size);
    std::printf("sign changes: %d   bound: %d   within bound: %s\n",
                rep.count_sign_changes, rep.bound, rep.within_bound ? "yes" : "NO");
    std::vector<long double> zero_marks;
    json jz = json::array();
    for (const ZeroBracket& z : rep.zeros) {
        bool sc = z.kind == ZeroKind::SignChange;
        if (sc) {
            std::printf("  zero     h* = %-24s bracket [%s, %s]\n", fmt(z.h_star).c_str(),
                        fmt(z.lo).c_str(), fmt(z.hi).c_str());
            zero_marks.push_back(z.h_star);
        } else {
            std::printf("  suspect  h* = %-24s (tangency candidate, not counted)\n",
                        fmt(z.h_star).c_str());
        }
        jz.push_back({{"kind", sc ? "sign-change" : "tangency-suspect"},
                      {"lo", static_cast<double>(z.lo)},
                      {"hi", static_cast<double>(z.hi)},
                      {"h_star", static_cast<double>(z.h_star)}});
    }
    if (rep.dropped_points > 0)
        std::printf("warning: %d grid points dropped after failed retries\n",
                    rep.dropped_points);

    if (!csv.empty() || !svg.empty()) {
        long double alo = to_ld(an.lo()), ahi = to_ld(an.hi());
        long double margin = kScanMarginFrac * (ahi - alo);
        long double lo = alo + margin, hi = ahi - margin;
        std::vector<long double> hs(static_cast<size_t>(grid));
        for (int k = 0; k < grid; ++k)
            hs[static_cast<size_t>(k)] = lo + (hi - lo) * k / (grid - 1);
        GeneratorCombination gc = melnikov_symbolic(fc, ps);
        GeneratorGrid gg = generator_grid(fc, an, hs);
        std::vector<long double> mv(hs.size(), 0.0L);
        for (size_t k = 0; k < hs.size(); ++k)
            if (gg.ok[k])
                for (size_t g = 0; g < gc.gens.size(); ++g)
                    mv[k] += gc.coeff[g].eval_ld(hs[k]) * gg.values[k][g];
        if (!csv.empty()) write_csv_file(csv, "h,M", hs, mv, gg.ok);
        if (!svg.empty())
            write_svg_file(svg, "M(h), " + family_name(fc), hs, mv, gg.ok, zero_marks);
    }

    json j;
    j["family"] = family_name(fc);
    j["annulus"] = {{"lo", rat_to_string(rep.annulus.lo())},
                    {"hi", rat_to_string(rep.annulus.hi())}};
    j["grid_size"] = rep.grid_size;
    j["zeros"] = jz;
    j["count_sign_changes"] = rep.count_sign_changes;
    j["bound"] = rep.bound;
    j["within_bound"] = rep.within_bound;
    j["dropped_points"] = rep.dropped_points;
    std::cout << j.dump() << "\n";
    if (!json_path.empty()) write_json_file(json_path, j);
    return rep.within_bound ? 0 : 1;
}

int run_xcheck(const FamilyOpt& fo, const std::string& pert_path, long double eps, int grid,
               const std::string& csv, const std::string& json_path) {
    FamilyCase fc = resolve_family(fo);
    Annulus an = main_annulus(fc);
    PerturbationSpec ps = read_pert(pert_path);
    long double lo = to_ld(an.lo()), len = to_ld(an.hi()) - lo;
    int N = std::max(grid, 3);
    std::vector<long double> hs, ds;
    std::printf("%-26s %s\n", "h", "displacement");
    for (int k = 0; k < N; ++k) {
        long double h = lo + len * (0.06L + 0.88L * k / (N - 1));
        long double d = displacement_map(fc, an, ps, eps, h);
        std::printf("%-26s %s\n", fmt(h).c_str(), fmt(d).c_str());
        hs.push_back(h);
        ds.push_back(d);
    }
    std::vector<long double> cycles = detect_limit_cycles(fc, an, ps, eps, grid);
    std::printf("detected limit cycles: %zu\n", cycles.size());
    json jc = json::array();
    for (long double h : cycles) {
        std::printf("  h = %s\n", fmt(h).c_str());
        jc.push_back(static_cast<double>(h));
    }
    if (!csv.empty()) write_csv_file(csv, "h,displacement", hs, ds, {});
    json j;
    j["family"] = family_name(fc);
    j["eps"] = static_cast<double>(eps);
    j["grid"] = N;
    j["cycles"] = jc;
    std::cout << j.dump() << "\n";
    if (!json_path.empty()) write_json_file(json_path, j);
    return 0;
}

int run_stress(const FamilyOpt& fo, int n, int count, unsigned long long seed, int grid,
               const std::string& json_path) {
    FamilyCase fc = resolve_family(fo);
    Annulus an = main_annulus(fc);
    if (n < 0) n = family_min_n(fc.kind);
    std::mt19937_64 rng(seed);
    QuadratureSettings qs;
    qs.rel_tol = 1e-9L;
    bool all_ok = true;
    json rows = json::array();
    for (int k = 0; k < count; ++k) {
        PerturbationSpec ps = random_perturbation(rng, n);
        ZeroReport rep = scan_zeros(fc, an, ps, grid, 1e-8L, qs);
        bool ok = rep.within_bound;
        all_ok = all_ok && ok;
        std::printf("pert %3d: sign changes %2d <= bound %3d  %s%s\n", k,
                    rep.count_sign_changes, rep.bound, ok ? "ok" : "VIOLATION",
                    rep.dropped_points > 0 ? " (dropped points)" : "");
        rows.push_back({{"index", k},
                        {"sign_changes", rep.count_sign_changes},
                        {"bound", rep.bound},
                        {"ok", ok},
                        {"dropped_points", rep.dropped_points}});
    }
    std::printf("stress: %s (%d perturbations, n=%d, seed %llu)\n",
                all_ok ? "all within bound" : "BOUND VIOLATION", count, n, seed);
    json j;
    j["family"] = family_name(fc);
    j["n"] = n;
    j["seed"] = seed;
    j["grid"] = grid;
    j["pass"] = all_ok;
    j["perturbations"] = rows;
    std::cout << j.dump() << "\n";
    if (!json_path.empty()) write_json_file(json_path, j);
    return all_ok ? 0 : 1;
}

// ---- verify suites ---------------------------------------------------------

int run_verify_pf(const FamilyOpt& fo, int samples, long double tol,
                  const std::string& json_path) {
    std::vector<CheckRow> rows;
    for (const FamilyCase& fc : chosen_families(fo)) {
        PFSystem pf = make_pf_system(fc);
        std::vector<long double> hs = sample_levels(main_annulus(fc), samples);
        std::string nm = family_name(fc);
        add_check(rows, nm + " block1 first-order",
                  max_residual(hs, [&](long double h) { return pf_first_residual(pf, 1, h); }),
                  tol);
        add_check(rows, nm + " block2 first-order",
                  max_residual(hs, [&](long double h) { return pf_first_residual(pf, 2, h); }),
                  tol);
        add_check(rows, nm + " block1 second-order",
                  max_residual(hs, [&](long double h) { return pf_second_residual(pf, 1, h); }),
                  tol);
        add_check(rows, nm + " block2 second-order",
                  max_residual(hs, [&](long double h) { return pf_second_residual(pf, 2, h); }),
                  tol);
        if (fc.kind == FamilyKind::Elliptic || fc.kind == FamilyKind::Hyperbolic) {
            KSystem ks = make_k_system(fc);
            add_check(rows, nm + " conjugated second-order",
                      max_residual(hs, [&](long double h) {
                          return k_system_residual(ks, fc, h);
                      }),
                      tol);
        }
        if (fc.kind == FamilyKind::Triangle) {
            TriangleStage ts = make_triangle_stage();
            add_check(rows, nm + " collapsed stage",
                      max_residual(hs, [&](long double h) {
                          return triangle_stage_residual(ts, h);
                      }),
                      tol);
        }
    }
    return finish_checks("pf", rows, json_path);
}

struct RecInstance {
    RecurrenceId id;
    const char* nm;
    int i, j;
};

std::vector<RecInstance> rec_instances(FamilyKind k) {
    using R = RecurrenceId;
    switch (k) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic:
        return {{R::CubicMain, "main", 1, 2},    {R::CubicMain, "main", 2, 3},
                {R::CubicMain, "main", 1, 4},    {R::CubicAxisJ0, "axis-j0", 3, 0},
                {R::CubicAxisJ0, "axis-j0", 4, 0}, {R::CubicAxisJ1, "axis-j1", 3, 1},
                {R::CubicAxisJ1, "axis-j1", 4, 1}, {R::CubicYAxis, "y-axis", 0, 3},
                {R::CubicYAxis, "y-axis", 0, 4}};
    case FamilyKind::Parabolic:
        return {{R::ParabolicStep, "step", 0, 2},      {R::ParabolicStep, "step", 1, 4},
                {R::ParabolicStep, "step", 2, 2},      {R::ParabolicShift, "shift", 1, 2},
                {R::ParabolicShift, "shift", 2, 2},    {R::ParabolicAxisJ0, "axis-j0", 2, 0},
                {R::ParabolicAxisJ0, "axis-j0", 3, 0}, {R::ParabolicAxisJ1, "axis-j1", 2, 1},
                {R::ParabolicAxisJ1, "axis-j1", 3, 1}, {R::ParabolicDiagonal, "diagonal", 1, 2},
                {R::ParabolicDiagonal, "diagonal", 2, 4}};
    case FamilyKind::Triangle:
        return {{R::TriangleA, "level-a", 0, 0}, {R::TriangleA, "level-a", 1, 0},
                {R::TriangleA, "level-a", 0, 2}, {R::TriangleB, "level-b", 1, 2},
                {R::TriangleB, "level-b", 2, 2}, {R::TriangleB, "level-b", 0, 4}};
    }
    return {};
}

int run_verify_recurrence(const FamilyOpt& fo, int samples, long double tol,
                          const std::string& json_path) {
    std::vector<CheckRow> rows;
    for (const FamilyCase& fc : chosen_families(fo)) {
        std::vector<long double> hs = sample_levels(main_annulus(fc), samples);
        for (const RecInstance& ri : rec_instances(fc.kind)) {
            std::string nm = family_name(fc) + " " + ri.nm + " J(" + std::to_string(ri.i) +
                             "," + std::to_string(ri.j) + ")";
            add_check(rows, nm,
                      max_residual(hs, [&](long double h) {
                          return recurrence_residual(fc, h, ri.id, ri.i, ri.j);
                      }),
                      tol);
        }
    }
    return finish_checks("recurrence", rows, json_path);
}

int run_verify_riccati(const FamilyOpt& fo, int samples, long double tol,
                       const std::string& json_path) {
    std::vector<CheckRow> rows;
    for (const FamilyCase& fc : chosen_families(fo)) {
        std::vector<long double> hs = sample_levels(main_annulus(fc), samples);
        std::string nm = family_name(fc);
        add_check(rows, nm + " first-ratio",
                  max_residual(hs, [&](long double h) {
                      return riccati_residual(fc, RiccatiKind::FirstRatio, h);
                  }),
                  tol);
        if (fc.kind != FamilyKind::Parabolic)
            add_check(rows, nm + " second-ratio",
                      max_residual(hs, [&](long double h) {
                          return riccati_residual(fc, RiccatiKind::SecondRatio, h);
                      }),
                      tol);
    }
    return finish_checks("riccati", rows, json_path);
}

int run_verify_annihilator(const FamilyOpt& fo, int samples, long double tol, int n,
                           unsigned long long seed, const std::string& json_path) {
    std::vector<CheckRow> rows;
    for (const FamilyCase& fc : chosen_families(fo)) {
        int nn = n >= 0 ? n : family_min_n(fc.kind);
        std::mt19937_64 rng(seed);
        PerturbationSpec ps = random_perturbation(rng, nn);
        GeneratorCombination gc = melnikov_symbolic(fc, ps);
        std::string nm = family_name(fc);

        ReducedForm rf;
        if (fc.kind == FamilyKind::Parabolic) {
            rf = reduced_melnikov_form(fc, gc);
            std::vector<long double> hs5 = sample_levels(main_annulus(fc), 5, 0.1L);
            add_check(rows, nm + " reduced-form identity",
                      max_residual(hs5, [&](long double h) {
                          return reduced_form_residual(fc, gc, rf, h);
                      }),
                      std::min(tol, 1e-7L));
        } else {
            PFSystem pf = make_pf_system(fc);
            EliminationResult el = eliminate_and_form_F1(pf, gc);
            std::vector<long double> hs5 = sample_levels(main_annulus(fc), 5, 0.1L);
            add_check(rows, nm + " elimination identity",
                      max_residual(hs5, [&](long double h) {
                          return elimination_identity_residual(pf, gc, el, h);
                      }),
                      std::min(tol, 1e-7L));
            rf = el.F1;
        }

        int m2 = synthesis_order(fc.kind, nn);
        Annihilator L = synthesize_L(fc, rf, m2);
        std::vector<long double> hs = sample_levels(main_annulus(fc), std::min(samples, 10), 0.1L);
        char tag[64];
        std::snprintf(tag, sizeof tag, " annihilator (n=%d, order cap %d, deg P2 = %d)", nn,
                      m2, L.min_deg_p2);
        add_check(rows, nm + tag,
                  max_residual(hs, [&](long double h) {
                      return annihilator_residual(fc, rf.parts[0], rf.parts[1], L, h);
                  }),
                  tol);

        ReducedForm R = apply_L_to_phi2(fc, rf, L);
        std::vector<long double> hs3 = sample_levels(main_annulus(fc), 3, 0.2L);
        add_check(rows, nm + " remainder form",
                  max_residual(hs3, [&](long double h) {
                      return apply_L_residual(fc, rf, L, R, h);
                  }),
                  tol);
    }
    return finish_checks("annihilator", rows, json_path);
}

int classify(const Error& e) {
    switch (e.code()) {
    case ErrorCode::BadInput:
    case ErrorCode::OutOfFamily:
    case ErrorCode::OutsideAnnulus:
    case ErrorCode::OutsideArc:
    case ErrorCode::UnsupportedIndex:
    case ErrorCode::DegreeTooSmall:
        return 2;
    default:
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification and computation laboratory for piecewise-smooth polynomial\n"
                 "perturbations of quadratic Hamiltonian centers with a polycycle boundary.\n"
                 "Set MLAB_THREADS to cap scan parallelism."};
    app.require_subcommand(1);
    // free the name "h" (the energy variable) from the default -h help alias
    app.set_help_flag("--help", "print this help");
    int rc = 0;
    auto add_sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->set_help_flag("--help", "print this help");
        return s;
    };

    // families
    std::string fam_json;
    auto* s_fam = add_sub("families", "List the Hamiltonian cases and their annuli");
    s_fam->add_option("--json", fam_json, "write the listing to a JSON file");
    s_fam->callback([&] { rc = run_families(fam_json); });

    // integral
    FamilyOpt int_fo;
    int int_i = 0, int_j = 0;
    long double int_h = 0;
    std::string int_json;
    auto* s_int = add_sub("integral", "Evaluate one basic integral J_{i,j}(h)");
    add_family_flags(s_int, int_fo, true);
    s_int->add_option("--i", int_i, "x exponent")->required();
    s_int->add_option("--j", int_j, "y exponent")->required();
    s_int->add_option("--h", int_h, "energy level")->required();
    s_int->add_option("--json", int_json);
    s_int->callback([&] { rc = run_integral(int_fo, int_i, int_j, int_h, int_json); });

    // verify
    FamilyOpt ver_fo;
    std::string ver_suite, ver_json;
    int ver_samples = 25, ver_n = -1;
    long double ver_tol = -1;
    unsigned long long ver_seed = 20260823ULL;
    auto* s_ver = add_sub("verify", "Run a residual verification suite");
    s_ver->add_option("suite", ver_suite, "pf | recurrence | riccati | annihilator")
        ->required()
        ->check(CLI::IsMember({"pf", "recurrence", "riccati", "annihilator"}));
    add_family_flags(s_ver, ver_fo, false);
    s_ver->add_option("--samples", ver_samples, "levels sampled per check (default 25)");
    s_ver->add_option("--tol", ver_tol, "residual tolerance (default 1e-8, annihilator 1e-5)");
    s_ver->add_option("--n", ver_n, "perturbation degree for the annihilator suite");
    s_ver->add_option("--seed", ver_seed, "random perturbation seed (annihilator suite)");
    s_ver->add_option("--json", ver_json, "write the summary to a JSON file");
    s_ver->callback([&] {
        if (ver_suite == "pf")
            rc = run_verify_pf(ver_fo, ver_samples, ver_tol > 0 ? ver_tol : 1e-8L, ver_json);
        else if (ver_suite == "recurrence")
            rc = run_verify_recurrence(ver_fo, ver_samples, ver_tol > 0 ? ver_tol : 1e-8L,
                                       ver_json);
        else if (ver_suite == "riccati")
            rc = run_verify_riccati(ver_fo, ver_samples, ver_tol > 0 ? ver_tol : 1e-8L,
                                    ver_json);
        else
            rc = run_verify_annihilator(ver_fo, ver_samples, ver_tol > 0 ? ver_tol : 1e-5L,
                                        ver_n, ver_seed, ver_json);
    });

    // reduce
    FamilyOpt red_fo;
    std::string red_pert, red_json;
    auto* s_red = add_sub(
        "reduce", "Reduce a perturbation's Melnikov function to generator form");
    add_family_flags(s_red, red_fo, true);
    s_red->add_option("--pert", red_pert, "perturbation JSON file")->required();
    s_red->add_option("--json", red_json);
    s_red->callback([&] { rc = run_reduce(red_fo, red_pert, red_json); });

    // melnikov
    FamilyOpt mel_fo;
    std::string mel_pert, mel_csv, mel_svg, mel_json;
    int mel_grid = 2000;
    long double mel_h = 0, mel_rtol = 1e-10L;
    auto* s_mel = add_sub("melnikov", "Evaluate or scan the Melnikov function");
    add_family_flags(s_mel, mel_fo, true);
    s_mel->add_option("--pert", mel_pert, "perturbation JSON file")->required();
    auto* mel_h_opt = s_mel->add_option("--h", mel_h, "evaluate at one level instead of scanning");
    s_mel->add_option("--grid", mel_grid, "scan grid size (default 2000)");
    s_mel->add_option("--refine-tol", mel_rtol, "bisection width for zeros (default 1e-10)");
    s_mel->add_option("--csv", mel_csv, "write h,M samples to a CSV file");
    s_mel->add_option("--svg", mel_svg, "write a static plot with zero markers");
    s_mel->add_option("--json", mel_json);
    s_mel->callback([&] {
        rc = run_melnikov(mel_fo, mel_pert, mel_h_opt->count() > 0, mel_h, mel_grid, mel_rtol,
                          mel_csv, mel_svg, mel_json);
    });

    // bound
    FamilyOpt bnd_fo;
    int bnd_n = -1;
    std::string bnd_json;
    auto* s_bnd = add_sub("bound", "Zero-count bound for degree-n perturbations");
    add_family_flags(s_bnd, bnd_fo, true);
    s_bnd->add_option("--n", bnd_n, "perturbation degree (omit for a table)");
    s_bnd->add_option("--json", bnd_json);
    s_bnd->callback([&] { rc = run_bound(bnd_fo, bnd_n, bnd_json); });

    // xcheck
    FamilyOpt xc_fo;
    std::string xc_pert, xc_csv, xc_json;
    long double xc_eps = 1e-3L;
    int xc_grid = 40;
    auto* s_xc = add_sub(
        "xcheck", "Displacement-map scan of the perturbed flow and detected cycles");
    add_family_flags(s_xc, xc_fo, true);
    s_xc->add_option("--pert", xc_pert, "perturbation JSON file")->required();
    s_xc->add_option("--eps", xc_eps, "perturbation size (default 1e-3)");
    s_xc->add_option("--grid", xc_grid, "scan grid size (default 40)");
    s_xc->add_option("--csv", xc_csv, "write h,displacement samples to a CSV file");
    s_xc->add_option("--json", xc_json);
    s_xc->callback([&] { rc = run_xcheck(xc_fo, xc_pert, xc_eps, xc_grid, xc_csv, xc_json); });

    // stress
    FamilyOpt st_fo;
    int st_n = -1, st_count = 20, st_grid = 200;
    unsigned long long st_seed = 20260823ULL;
    std::string st_json;
    auto* s_st = add_sub(
        "stress", "Random perturbations scanned against the zero-count bound");
    add_family_flags(s_st, st_fo, true);
    s_st->add_option("--n", st_n, "perturbation degree (default: family minimum)");
    s_st->add_option("--count", st_count, "number of random perturbations (default 20)");
    s_st->add_option("--seed", st_seed, "random seed (default 20260823)");
    s_st->add_option("--grid", st_grid, "scan grid size (default 200)");
    s_st->add_option("--json", st_json);
    s_st->callback([&] { rc = run_stress(st_fo, st_n, st_count, st_seed, st_grid, st_json); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
        return classify(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
