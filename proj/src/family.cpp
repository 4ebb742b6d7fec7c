#include "mlab/family.hpp"

#include "mlab/errors.hpp"

#include <cmath>

namespace mlab {

namespace {

void check_lambda(FamilyKind kind, const Rat& lam) {
    if (kind == FamilyKind::Elliptic && !(lam > 0 && lam < 2))
        fail(ErrorCode::OutOfFamily, "elliptic case needs lambda in (0,2), got " + rat_to_string(lam));
    if (kind == FamilyKind::Hyperbolic && !(lam > -1 && lam < 0))
        fail(ErrorCode::OutOfFamily, "hyperbolic case needs lambda in (-1,0), got " + rat_to_string(lam));
}

} // namespace

FamilyCase make_elliptic(const Rat& lambda) {
    check_lambda(FamilyKind::Elliptic, lambda);
    return {FamilyKind::Elliptic, lambda};
}

FamilyCase make_hyperbolic(const Rat& lambda) {
    check_lambda(FamilyKind::Hyperbolic, lambda);
    return {FamilyKind::Hyperbolic, lambda};
}

FamilyCase make_parabolic() { return {FamilyKind::Parabolic, Rat(0)}; }
FamilyCase make_triangle() { return {FamilyKind::Triangle, Rat(-1)}; }

FamilyCase case_from_ab(const Rat& a, long double b) {
    // Validity of the pair: b = (1-a) sqrt(1+2a).
    Rat one_plus_2a = 1 + 2 * a;
    if (one_plus_2a < 0)
        fail(ErrorCode::OutOfFamily, "1+2a negative, no real b for a = " + rat_to_string(a));
    long double b_expected = to_ld(1 - a) * std::sqrt(to_ld(one_plus_2a));
    if (std::abs(b - b_expected) > kAbMatchTol)
        fail(ErrorCode::OutOfFamily, "pair (a,b) off the curve b = (1-a)sqrt(1+2a)");

    Rat lam = (1 - a * one_plus_2a) / (1 + a);
    if (lam == 0) return make_parabolic();
    if (lam == -1) return make_triangle();
    if (lam > 0 && lam < 2) return make_elliptic(lam);
    if (lam > -1 && lam < 0) return make_hyperbolic(lam);
    fail(ErrorCode::OutOfFamily, "induced lambda = " + rat_to_string(lam) + " outside supported ranges");
}

std::string family_name(const FamilyCase& fc) {
    switch (fc.kind) {
    case FamilyKind::Elliptic: return "elliptic(lambda=" + rat_to_string(fc.lambda) + ")";
    case FamilyKind::Hyperbolic: return "hyperbolic(lambda=" + rat_to_string(fc.lambda) + ")";
    case FamilyKind::Parabolic: return "parabolic";
    case FamilyKind::Triangle: return "triangle";
    }
    return "?";
}

Rat hamiltonian(const FamilyCase& fc, const Rat& x, const Rat& y) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        const Rat& l = fc.lambda;
        return x * y * y + l * x * x * x - 3 * (l - 1) * x * x + 3 * (l - 2) * x;
    }
    case FamilyKind::Parabolic:
        return x * y * y + x * x / 2 - 2 * x;
    case FamilyKind::Triangle:
        return (x * x + y * y) / 2 - x * x * x / 3 + x * y * y;
    }
    fail(ErrorCode::BadInput, "bad family");
}

long double hamiltonian_ld(const FamilyCase& fc, long double x, long double y) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        long double l = to_ld(fc.lambda);
        return x * y * y + l * x * x * x - 3.0L * (l - 1.0L) * x * x + 3.0L * (l - 2.0L) * x;
    }
    case FamilyKind::Parabolic:
        return x * y * y + 0.5L * x * x - 2.0L * x;
    case FamilyKind::Triangle:
        return 0.5L * (x * x + y * y) - x * x * x / 3.0L + x * y * y;
    }
    fail(ErrorCode::BadInput, "bad family");
}

long double Hx_ld(const FamilyCase& fc, long double x, long double y) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        long double l = to_ld(fc.lambda);
        return y * y + 3.0L * l * x * x - 6.0L * (l - 1.0L) * x + 3.0L * (l - 2.0L);
    }
    case FamilyKind::Parabolic:
        return y * y + x - 2.0L;
    case FamilyKind::Triangle:
        return x - x * x + y * y;
    }
    fail(ErrorCode::BadInput, "bad family");
}

long double Hy_ld(const FamilyCase& fc, long double x, long double y) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic:
    case FamilyKind::Parabolic:
        return 2.0L * x * y;
    case FamilyKind::Triangle:
        return y * (1.0L + 2.0L * x);
    }
    fail(ErrorCode::BadInput, "bad family");
}

PolyQ h_on_axis(const FamilyCase& fc) {
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        const Rat& l = fc.lambda;
        return PolyQ{Rat(0), 3 * (l - 2), -3 * (l - 1), l};
    }
    case FamilyKind::Parabolic:
        return PolyQ{Rat(0), Rat(-2), Rat(1, 2)};
    case FamilyKind::Triangle:
        return PolyQ{Rat(0), Rat(0), Rat(1, 2), Rat(-1, 3)};
    }
    fail(ErrorCode::BadInput, "bad family");
}

PolyQ hx_on_axis(const FamilyCase& fc) { return h_on_axis(fc).derivative(); }

std::vector<CriticalPoint> critical_points(const FamilyCase& fc) {
    std::vector<CriticalPoint> pts;
    switch (fc.kind) {
    case FamilyKind::Elliptic:
    case FamilyKind::Hyperbolic: {
        const Rat& l = fc.lambda;
        Rat x2 = (l - 2) / l;
        Rat e1 = l - 3;
        Rat e2 = (l - 2) * (l - 2) * (l + 1) / (l * l);
        // On y=0 the Hessian is diag(H1''(x), 2x); x=1 is always a center.
        pts.push_back({1.0L, 0.0L, e1, CritKind::Center});
        // The second axis point is a center in the elliptic range (x2 < 0)
        // and a saddle in the hyperbolic range (x2 > 1).
        pts.push_back({to_ld(x2), 0.0L, e2,
                       fc.kind == FamilyKind::Elliptic ? CritKind::Center : CritKind::Saddle});
        long double y0 = std::sqrt(to_ld(3 * (2 - l)));
        pts.push_back({0.0L, y0, Rat(0), CritKind::Saddle});
        pts.push_back({0.0L, -y0, Rat(0), CritKind::Saddle});
        break;
    }
    case FamilyKind::Parabolic: {
        pts.push_back({2.0L, 0.0L, Rat(-2), CritKind::Center});
        long double y0 = std::sqrt(2.0L);
        pts.push_back({0.0L, y0, Rat(0), CritKind::Saddle});
        pts.push_back({0.0L, -y0, Rat(0), CritKind::Saddle});
        break;
    }
    case FamilyKind::Triangle: {
        pts.push_back({0.0L, 0.0L, Rat(0), CritKind::Center});
        pts.push_back({1.0L, 0.0L, Rat(1, 6), CritKind::Saddle});
        long double y0 = std::sqrt(3.0L) / 2.0L;
        pts.push_back({-0.5L, y0, Rat(1, 6), CritKind::Saddle});
        pts.push_back({-0.5L, -y0, Rat(1, 6), CritKind::Saddle});
        break;
    }
    }
    return pts;
}

std::vector<Annulus> annuli(const FamilyCase& fc) {
    std::vector<Annulus> as;
    switch (fc.kind) {
    case FamilyKind::Elliptic: {
        const Rat& l = fc.lambda;
        as.push_back({AnnulusSide::Right, l - 3, Rat(0), Rat(1)});
        as.push_back({AnnulusSide::Left, (l - 2) * (l - 2) * (l + 1) / (l * l), Rat(0), (l - 2) / l});
        break;
    }
    case FamilyKind::Hyperbolic:
        as.push_back({AnnulusSide::Right, fc.lambda - 3, Rat(0), Rat(1)});
        break;
    case FamilyKind::Parabolic:
        as.push_back({AnnulusSide::Main, Rat(-2), Rat(0), Rat(2)});
        break;
    case FamilyKind::Triangle:
        as.push_back({AnnulusSide::Main, Rat(0), Rat(1, 6), Rat(0)});
        break;
    }
    return as;
}

Annulus main_annulus(const FamilyCase& fc) { return annuli(fc).front(); }

} // namespace mlab
