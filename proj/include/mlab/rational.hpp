#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace mlab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact conversion helpers between text, rationals, and hardware floats.
// All user-facing numeric input is parsed to Rat so the algebra downstream
// stays exact; long double is only used inside quadrature and ODE kernels.

long double to_ld(const Rat& r);
double to_d(const Rat& r);

// Accepts "p/q", plain integers, and decimal/scientific literals such as
// "0.25", "-3.5e-2".  Decimals convert exactly (0.1 becomes 1/10).
Rat rat_from_string(const std::string& text);

// Canonical form: "p" when the denominator is 1, otherwise "p/q".
std::string rat_to_string(const Rat& r);

inline int sign_of(const Rat& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

} // namespace mlab
