#pragma once

#include "mlab/poly.hpp"
#include "mlab/rational.hpp"

#include <string>
#include <vector>

namespace mlab {

// The catalog of quadratic Hamiltonian vector fields whose period annuli end
// in a polycycle through two symmetric saddles on the y-axis.  Four cases are
// distinguished by the parameter lambda of the cubic structure:
//
//   Elliptic    lambda in (0,2):  H = x y^2 + lambda x^3 - 3(lambda-1) x^2 + 3(lambda-2) x
//   Hyperbolic  lambda in (-1,0): same H
//   Parabolic   (lambda = 0):     H = x y^2 + x^2/2 - 2 x
//   Triangle    (lambda = -1):    H = (x^2 + y^2)/2 - x^3/3 + x y^2
//
// All cases are symmetric in y -> -y, so the x-axis is a section and every
// oval splits into an upper and a mirrored lower arc.
enum class FamilyKind { Elliptic, Hyperbolic, Parabolic, Triangle };

enum class AnnulusSide { Right, Left, Main };

struct FamilyCase {
    FamilyKind kind;
    Rat lambda; // meaningful for Elliptic / Hyperbolic only
};

FamilyCase make_elliptic(const Rat& lambda);
FamilyCase make_hyperbolic(const Rat& lambda);
FamilyCase make_parabolic();
FamilyCase make_triangle();

// Construction from the (a,b) normal form parameters.  The pair must satisfy
// b = (1-a) sqrt(1+2a) to absolute tolerance 1e-10, and the induced
// lambda = (1 - a(1+2a)) / (1+a) must fall in a supported range:
//   lambda in (0,2) elliptic, (-1,0) hyperbolic, =0 parabolic, =-1 triangle.
// a is taken exactly (rational); anything else raises OutOfFamily.
FamilyCase case_from_ab(const Rat& a, long double b);
inline constexpr long double kAbMatchTol = 1e-10L;

std::string family_name(const FamilyCase& fc);

// Hamiltonian and first partials.
Rat hamiltonian(const FamilyCase& fc, const Rat& x, const Rat& y);
long double hamiltonian_ld(const FamilyCase& fc, long double x, long double y);
long double Hx_ld(const FamilyCase& fc, long double x, long double y);
long double Hy_ld(const FamilyCase& fc, long double x, long double y);

// Restrictions to the x-axis as exact polynomials in x:
// h_on_axis = H(x,0) and hx_on_axis = dH/dx (x,0).
PolyQ h_on_axis(const FamilyCase& fc);
PolyQ hx_on_axis(const FamilyCase& fc);

enum class CritKind { Center, Saddle };

struct CriticalPoint {
    long double x, y;
    Rat energy;    // exact: every catalog critical point has rational H value
    CritKind kind;
};

// All finite critical points, centers first, then saddles.
std::vector<CriticalPoint> critical_points(const FamilyCase& fc);

// A period annulus, described by the exact energies of its two ends.
// Ovals exist for h strictly between h_center and h_polycycle (in whichever
// order those lie on the real line).
struct Annulus {
    AnnulusSide side;
    Rat h_center;
    Rat h_polycycle;
    Rat center_x;  // abscissa of the surrounded center (exact)

    Rat lo() const { return h_center < h_polycycle ? h_center : h_polycycle; }
    Rat hi() const { return h_center < h_polycycle ? h_polycycle : h_center; }
    bool contains(const Rat& h) const { return lo() < h && h < hi(); }
};

std::vector<Annulus> annuli(const FamilyCase& fc);

// The annulus the algebraic pipeline works on: Right for elliptic and
// hyperbolic, the unique annulus otherwise.
Annulus main_annulus(const FamilyCase& fc);

} // namespace mlab
