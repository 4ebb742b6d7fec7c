#pragma once

#include "mlab/family.hpp"
#include "mlab/pert.hpp"
#include "mlab/poly.hpp"

#include <map>
#include <utility>
#include <vector>

namespace mlab {

// Exact rewriting of any basic integral J_{i,j} as a combination
//   J_{i,j}(h) = sum_g  c_g(h) J_g(h)
// over the family's generator list, with polynomial coefficients c_g in Q[h].
// The rewriting uses only identities that hold identically in h on the
// period annulus (integration by parts in x and y, and the level relation
// H = h on the oval), applied recursively down to the generators.
class Reducer {
public:
    explicit Reducer(const FamilyCase& fc);

    // Coefficient vector of J_{i,j}, ordered like gens().  Cached.
    const std::vector<PolyQ>& reduce(int i, int j);

    const std::vector<std::pair<int, int>>& gens() const { return gens_; }
    const FamilyCase& family() const { return fc_; }

private:
    std::vector<PolyQ> reduce_cubic(int i, int j);
    std::vector<PolyQ> reduce_parabolic(int i, int j);
    void triangle_solve_level(int K);
    std::vector<PolyQ> combine(
        const std::vector<std::pair<PolyQ, std::pair<int, int>>>& terms);

    FamilyCase fc_;
    std::vector<std::pair<int, int>> gens_;
    std::map<std::pair<int, int>, std::vector<PolyQ>> memo_;
    int tri_level_ = 1;
};

// The Melnikov function of a perturbation, reduced to generator form.
struct GeneratorCombination {
    std::vector<std::pair<int, int>> gens;
    std::vector<PolyQ> coeff;
};

GeneratorCombination melnikov_symbolic(Reducer& red, const PerturbationSpec& ps);
GeneratorCombination melnikov_symbolic(const FamilyCase& fc, const PerturbationSpec& ps);

// Degree ceilings of the generator coefficients as a function of the
// perturbation degree n, and the audit of an actual combination against
// them.  (-1 means the coefficient must vanish identically.)
std::vector<int> degree_ceilings(FamilyKind kind, int n);

struct DegreeReport {
    std::vector<int> observed, ceiling;
    bool ok;
};
DegreeReport verify_degrees(const FamilyCase& fc, int n, const GeneratorCombination& gc);

// Identities the reducer is built from, checked one instance at a time by
// quadrature of both sides; returns |lhs - rhs| / max(1, |lhs|, |rhs|).
enum class RecurrenceId {
    CubicMain,        // ((2i+2j+2)/j) J_{i,j} = 3h J_{i-1,j-2} + 3(l-1) J_{i+1,j-2} - 6(l-2) J_{i,j-2}
    CubicAxisJ0,      // (i+1) l J_{i,0} = (i-2) h J_{i-3,0} + 3i(l-1) J_{i-1,0} - 3(i-1)(l-2) J_{i-2,0}
    CubicAxisJ1,      // ((2i+4)/3) l J_{i,1} = ((2i-5)/3) h J_{i-3,1} + (l-1)(2i+1) J_{i-1,1} - (l-2)(2i-2) J_{i-2,1}
    CubicYAxis,       // ((j-2)/j) J_{0,j} = 6(l-1) J_{1,j-2} - 3(l-2) J_{0,j-2} - 3l J_{2,j-2}
    ParabolicStep,    // ((j-2i-2)/j) J_{i,j} = 2 J_{i,j-2} - J_{i+1,j-2}
    ParabolicShift,   // J_{i,j} = h J_{i-1,j-2} + 2 J_{i,j-2} - (1/2) J_{i+1,j-2}
    ParabolicAxisJ0,  // (i+1) J_{i,0} = 4i J_{i-1,0} + 2(i-1) h J_{i-2,0}
    ParabolicAxisJ1,  // (3/2+i) J_{i,1} = 4i J_{i-1,1} - (3-2i) h J_{i-2,1}
    ParabolicDiagonal,// 2 J_{i,2i} = J_{i+1,2i}
    TriangleA,        // h J_{i,j} = J_{i+2,j}/2 + J_{i,j+2}/2 - J_{i+3,j}/3 + J_{i+1,j+2}
    TriangleB,        // ((m-2i)/(m+2)) J_{i,m+2} = J_{i+2,m} - J_{i+1,m} + (i/(m+2)) J_{i-1,m+2},  j = m+2
};

long double recurrence_residual(const FamilyCase& fc, long double h,
                                RecurrenceId id, int i, int j);

} // namespace mlab
