#include "mlab/reduction.hpp"

#include "mlab/errors.hpp"
#include "mlab/linalg.hpp"
#include "mlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

namespace {

// floor division for possibly negative numerators
int fdiv(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }

PolyQ lin(const Rat& c0, const Rat& c1) { return PolyQ{c0, c1}; }
PolyQ cst(const Rat& c0) { return PolyQ(c0); }

} // namespace

Reducer::Reducer(const FamilyCase& fc) : fc_(fc), gens_(generator_indices(fc.kind)) {
    for (size_t g = 0; g < gens_.size(); ++g) {
        std::vector<PolyQ> unit(gens_.size());
        unit[g] = PolyQ(Rat(1));
        memo_[gens_[g]] = std::move(unit);
    }
}

const std::vector<PolyQ>& Reducer::reduce(int i, int j) {
    if (i < 0 || j < 0)
        fail(ErrorCode::UnsupportedIndex, "negative monomial exponent in reduction");
    auto key = std::make_pair(i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    if (fc_.kind == FamilyKind::Triangle) {
        while (tri_level_ < i + j) triangle_solve_level(tri_level_ + 1);
        return memo_.at(key);
    }
    std::vector<PolyQ> vec = (fc_.kind == FamilyKind::Parabolic)
                                 ? reduce_parabolic(i, j)
                                 : reduce_cubic(i, j);
    auto [pos, fresh] = memo_.emplace(key, std::move(vec));
    (void)fresh;
    return pos->second;
}

std::vector<PolyQ> Reducer::combine(
    const std::vector<std::pair<PolyQ, std::pair<int, int>>>& terms) {
    std::vector<PolyQ> out(gens_.size());
    for (const auto& [c, idx] : terms) {
        const std::vector<PolyQ>& sub = reduce(idx.first, idx.second);
        for (size_t k = 0; k < out.size(); ++k) out[k] += c * sub[k];
    }
    return out;
}

std::vector<PolyQ> Reducer::reduce_cubic(int i, int j) {
    const Rat& l = fc_.lambda;
    if (i == 2 && j == 0)
        return combine({{cst(-(l - 2) / l), {0, 0}}, {cst(2 * (l - 1) / l), {1, 0}}});
    if (i == 3 && j == 0) {
        PolyQ c00 = lin(Rat(-9, 4) + Rat(27, 4) / l - Rat(9, 2) / (l * l), Rat(1, 4) / l);
        PolyQ c10 = cst(Rat(3) - Rat(6) / l + Rat(9, 2) / (l * l));
        return combine({{c00, {0, 0}}, {c10, {1, 0}}});
    }
    if (i == 1 && j == 2) {
        PolyQ c00 = lin(Rat(-3, 4) * l + Rat(9, 4) - Rat(3, 2) / l, Rat(3, 4));
        PolyQ c10 = cst(Rat(3, 2) / l);
        return combine({{c00, {0, 0}}, {c10, {1, 0}}});
    }
    if (i == 0 && j == 3)
        return combine({{cst(18 * (l - 1)), {1, 1}},
                        {cst(-9 * (l - 2)), {0, 1}},
                        {cst(-9 * l), {2, 1}}});
    if (j == 0) { // i >= 4
        Rat den = Rat(i + 1) * l;
        return combine({{lin(Rat(0), Rat(i - 2) / den), {i - 3, 0}},
                        {cst(3 * i * (l - 1) / den), {i - 1, 0}},
                        {cst(-3 * (i - 1) * (l - 2) / den), {i - 2, 0}}});
    }
    if (j == 1) { // i >= 3
        Rat den = Rat(2 * i + 4, 3) * l;
        return combine({{lin(Rat(0), Rat(2 * i - 5, 3) / den), {i - 3, 1}},
                        {cst((l - 1) * (2 * i + 1) / den), {i - 1, 1}},
                        {cst(-(l - 2) * (2 * i - 2) / den), {i - 2, 1}}});
    }
    if (i == 0) { // j >= 4 (j = 3 handled above)
        Rat den(j - 2, j);
        return combine({{cst(6 * (l - 1) / den), {1, j - 2}},
                        {cst(-3 * (l - 2) / den), {0, j - 2}},
                        {cst(-3 * l / den), {2, j - 2}}});
    }
    // generic i >= 1, j >= 2
    Rat den(2 * i + 2 * j + 2, j);
    return combine({{lin(Rat(0), Rat(3) / den), {i - 1, j - 2}},
                    {cst(3 * (l - 1) / den), {i + 1, j - 2}},
                    {cst(-6 * (l - 2) / den), {i, j - 2}}});
}

std::vector<PolyQ> Reducer::reduce_parabolic(int i, int j) {
    if (i == 0 && j == 0) {
        std::vector<PolyQ> z(gens_.size());
        z[2] = PolyQ(Rat(1, 2)); // J_{0,0} = J_{1,0}/2
        return z;
    }
    if (j == 0) // i >= 2
        return combine({{cst(Rat(4 * i, i + 1)), {i - 1, 0}},
                        {lin(Rat(0), Rat(2 * (i - 1), i + 1)), {i - 2, 0}}});
    if (j == 1) { // i >= 2
        Rat den = Rat(3, 2) + i;
        return combine({{cst(Rat(4 * i) / den), {i - 1, 1}},
                        {lin(Rat(0), Rat(-(3 - 2 * i)) / den), {i - 2, 1}}});
    }
    if (j == 2 * i + 2) // diagonal, where the straight step degenerates
        return combine({{lin(Rat(0), Rat(1)), {i - 1, 2 * i}}, {cst(Rat(1)), {i, 2 * i}}});
    Rat den(j - 2 * i - 2, j);
    return combine({{cst(Rat(2) / den), {i, j - 2}}, {cst(Rat(-1) / den), {i + 1, j - 2}}});
}

void Reducer::triangle_solve_level(int K) {
    std::vector<std::pair<int, int>> unknowns;
    for (int t = 0; t <= K; ++t) unknowns.push_back({K - t, t});
    std::vector<std::pair<int, int>> pending;
    for (auto& u : unknowns)
        if (!memo_.count(u)) pending.push_back(u);
    if (pending.empty()) {
        tri_level_ = K;
        return;
    }

    auto get = [&](int i, int j) -> const std::vector<PolyQ>& {
        auto it = memo_.find({i, j});
        if (it == memo_.end())
            fail(ErrorCode::BadInput, "triangle level solve referenced an unsolved entry");
        return it->second;
    };

    struct Row {
        std::map<std::pair<int, int>, Rat> lhs; // unknown -> coefficient
        std::vector<PolyQ> rhs;                 // 6-vector over generators
    };
    std::vector<Row> rows;
    auto rhs_add = [&](std::vector<PolyQ>& vec, const PolyQ& c, int i, int j) {
        const auto& sub = get(i, j);
        for (size_t k = 0; k < vec.size(); ++k) vec[k] += c * sub[k];
    };

    // Identity family (A), multiplying the level relation H = h into J_{i,j}:
    //   h J_{i,j} = J_{i+2,j}/2 + J_{i,j+2}/2 - J_{i+3,j}/3 + J_{i+1,j+2}
    // rows whose unknowns (i+3,j), (i+1,j+2) sit at level K.
    for (int i = 0; i + 3 <= K; ++i) {
        int j = K - 3 - i;
        if (j < 0) continue;
        Row r;
        r.rhs.assign(gens_.size(), PolyQ());
        r.lhs[{i + 3, j}] = Rat(-1, 3);
        r.lhs[{i + 1, j + 2}] = Rat(1);
        rhs_add(r.rhs, PolyQ::variable(), i, j);
        rhs_add(r.rhs, cst(Rat(-1, 2)), i + 2, j);
        rhs_add(r.rhs, cst(Rat(-1, 2)), i, j + 2);
        rows.push_back(std::move(r));
    }
    // Identity family (B), integration by parts in y against dx:
    //   ((m-2i)/(m+2)) J_{i,m+2} = J_{i+2,m} - J_{i+1,m} + (i/(m+2)) J_{i-1,m+2}
    for (int i = 0; i <= K - 2; ++i) {
        int m = K - i - 2;
        if (m < 0) continue;
        Row r;
        r.rhs.assign(gens_.size(), PolyQ());
        r.lhs[{i, m + 2}] = Rat(m - 2 * i, m + 2);
        r.lhs[{i + 2, m}] = Rat(-1);
        rhs_add(r.rhs, cst(Rat(-1)), i + 1, m);
        if (i >= 1) rhs_add(r.rhs, cst(Rat(i, m + 2)), i - 1, m + 2);
        rows.push_back(std::move(r));
    }

    // Knowns among this level's unknowns (the generators) move to the rhs.
    for (auto& r : rows) {
        for (auto it = r.lhs.begin(); it != r.lhs.end();) {
            if (std::find(pending.begin(), pending.end(), it->first) == pending.end()) {
                rhs_add(r.rhs, cst(-it->second), it->first.first, it->first.second);
                it = r.lhs.erase(it);
            } else {
                ++it;
            }
        }
    }

    // Exact elimination: rational matrix on the left, polynomial vectors on
    // the right, mirrored row operations.  The system is overdetermined but
    // consistent; every pending unknown must get a pivot.
    int nc = static_cast<int>(pending.size());
    int nr = static_cast<int>(rows.size());
    std::vector<std::vector<Rat>> A(static_cast<size_t>(nr),
                                    std::vector<Rat>(static_cast<size_t>(nc), Rat(0)));
    std::vector<std::vector<PolyQ>> B(static_cast<size_t>(nr));
    for (int r = 0; r < nr; ++r) {
        for (auto& [idx, c] : rows[static_cast<size_t>(r)].lhs) {
            auto pos = std::find(pending.begin(), pending.end(), idx) - pending.begin();
            A[static_cast<size_t>(r)][static_cast<size_t>(pos)] = c;
        }
        B[static_cast<size_t>(r)] = std::move(rows[static_cast<size_t>(r)].rhs);
    }

    std::vector<int> pivot_row(static_cast<size_t>(nc), -1);
    int prow = 0;
    for (int c = 0; c < nc && prow < nr; ++c) {
        int sel = -1;
        for (int r = prow; r < nr; ++r)
            if (A[static_cast<size_t>(r)][static_cast<size_t>(c)] != 0) { sel = r; break; }
        if (sel < 0) continue;
        std::swap(A[static_cast<size_t>(sel)], A[static_cast<size_t>(prow)]);
        std::swap(B[static_cast<size_t>(sel)], B[static_cast<size_t>(prow)]);
        Rat inv = Rat(1) / A[static_cast<size_t>(prow)][static_cast<size_t>(c)];
        for (int cc = 0; cc < nc; ++cc) A[static_cast<size_t>(prow)][static_cast<size_t>(cc)] *= inv;
        for (auto& p : B[static_cast<size_t>(prow)]) p = p * inv;
        for (int r = 0; r < nr; ++r) {
            if (r == prow) continue;
            Rat f = A[static_cast<size_t>(r)][static_cast<size_t>(c)];
            if (f == 0) continue;
            for (int cc = 0; cc < nc; ++cc)
                A[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                    f * A[static_cast<size_t>(prow)][static_cast<size_t>(cc)];
            for (size_t k = 0; k < B[static_cast<size_t>(r)].size(); ++k)
                B[static_cast<size_t>(r)][k] -= f * B[static_cast<size_t>(prow)][k];
        }
        pivot_row[static_cast<size_t>(c)] = prow;
        ++prow;
    }
    for (int c = 0; c < nc; ++c)
        if (pivot_row[static_cast<size_t>(c)] < 0)
            fail(ErrorCode::BadInput, "triangle level solve underdetermined");
    // consistency of leftover rows
    for (int r = prow; r < nr; ++r)
        for (const auto& p : B[static_cast<size_t>(r)])
            if (!p.is_zero())
                fail(ErrorCode::BadInput, "triangle level solve inconsistent");

    for (int c = 0; c < nc; ++c)
        memo_[pending[static_cast<size_t>(c)]] = B[static_cast<size_t>(pivot_row[static_cast<size_t>(c)])];
    tri_level_ = K;
}

GeneratorCombination melnikov_symbolic(Reducer& red, const PerturbationSpec& ps) {
    GeneratorCombination gc;
    gc.gens = red.gens();
    gc.coeff.assign(gc.gens.size(), PolyQ());
    for (const auto& [ij, v] : rho_assembly(ps)) {
        const auto& sub = red.reduce(ij.first, ij.second);
        for (size_t k = 0; k < gc.coeff.size(); ++k) gc.coeff[k] += sub[k] * v;
    }
    return gc;
}

GeneratorCombination melnikov_symbolic(const FamilyCase& fc, const PerturbationSpec& ps) {
    Reducer red(fc);
    return melnikov_symbolic(red, ps);
}

std::vector<int> degree_ceilings(FamilyKind kind, int n) {
    if (kind == FamilyKind::Parabolic)
        return {n / 2, n / 2 - 1, n / 2, fdiv(n - 2, 3)};
    return {fdiv(n, 3),     fdiv(n - 1, 3), fdiv(n - 2, 3),
            fdiv(n - 1, 3), fdiv(n - 2, 3), fdiv(n - 3, 3)};
}

DegreeReport verify_degrees(const FamilyCase& fc, int n, const GeneratorCombination& gc) {
    DegreeReport rep;
    rep.ceiling = degree_ceilings(fc.kind, n);
    for (const auto& c : gc.coeff) rep.observed.push_back(c.degree());
    rep.ok = true;
    for (size_t k = 0; k < rep.observed.size(); ++k)
        rep.ok = rep.ok && rep.observed[k] <= rep.ceiling[k];
    return rep;
}

long double recurrence_residual(const FamilyCase& fc, long double h,
                                RecurrenceId id, int i, int j) {
    Annulus an = main_annulus(fc);
    auto J = [&](int a, int b) { return j_integral(fc, an, h, a, b); };
    long double l = to_ld(fc.lambda);
    long double lhs = 0, rhs = 0;
    switch (id) {
    case RecurrenceId::CubicMain:
        lhs = (2.0L * i + 2.0L * j + 2.0L) / j * J(i, j);
        rhs = 3.0L * h * J(i - 1, j - 2) + 3.0L * (l - 1) * J(i + 1, j - 2) -
              6.0L * (l - 2) * J(i, j - 2);
        break;
    case RecurrenceId::CubicAxisJ0:
        lhs = (i + 1.0L) * l * J(i, 0);
        rhs = (i - 2.0L) * h * J(i - 3, 0) + 3.0L * i * (l - 1) * J(i - 1, 0) -
              3.0L * (i - 1.0L) * (l - 2) * J(i - 2, 0);
        break;
    case RecurrenceId::CubicAxisJ1:
        lhs = (2.0L * i + 4.0L) / 3.0L * l * J(i, 1);
        rhs = (2.0L * i - 5.0L) / 3.0L * h * J(i - 3, 1) +
              (l - 1) * (2.0L * i + 1.0L) * J(i - 1, 1) -
              (l - 2) * (2.0L * i - 2.0L) * J(i - 2, 1);
        break;
    case RecurrenceId::CubicYAxis:
        lhs = (j - 2.0L) / j * J(0, j);
        rhs = 6.0L * (l - 1) * J(1, j - 2) - 3.0L * (l - 2) * J(0, j - 2) -
              3.0L * l * J(2, j - 2);
        break;
    case RecurrenceId::ParabolicStep:
        lhs = (j - 2.0L * i - 2.0L) / j * J(i, j);
        rhs = 2.0L * J(i, j - 2) - J(i + 1, j - 2);
        break;
    case RecurrenceId::ParabolicShift:
        lhs = J(i, j);
        rhs = h * J(i - 1, j - 2) + 2.0L * J(i, j - 2) - 0.5L * J(i + 1, j - 2);
        break;
    case RecurrenceId::ParabolicAxisJ0:
        lhs = (i + 1.0L) * J(i, 0);
        rhs = 4.0L * i * J(i - 1, 0) + 2.0L * (i - 1.0L) * h * J(i - 2, 0);
        break;
    case RecurrenceId::ParabolicAxisJ1:
        lhs = (1.5L + i) * J(i, 1);
        rhs = 4.0L * i * J(i - 1, 1) - (3.0L - 2.0L * i) * h * J(i - 2, 1);
        break;
    case RecurrenceId::ParabolicDiagonal:
        lhs = 2.0L * J(i, 2 * i);
        rhs = J(i + 1, 2 * i);
        break;
    case RecurrenceId::TriangleA:
        lhs = h * J(i, j);
        rhs = 0.5L * J(i + 2, j) + 0.5L * J(i, j + 2) - J(i + 3, j) / 3.0L +
              J(i + 1, j + 2);
        break;
    case RecurrenceId::TriangleB: {
        int m = j - 2;
        lhs = static_cast<long double>(m - 2 * i) / (m + 2) * J(i, j);
        rhs = J(i + 2, m) - J(i + 1, m);
        if (i >= 1) rhs += static_cast<long double>(i) / (m + 2) * J(i - 1, m + 2);
        break;
    }
    }
    return std::abs(lhs - rhs) / std::max({1.0L, std::abs(lhs), std::abs(rhs)});
}

} // namespace mlab
