#pragma once

// Scalar support shared by the floating-point simulator and the exact solver.
//
// Every recursion in this library is written against a generic ordered scalar
// using only +, -, comparisons and the helpers below, so the same map code runs
// on double, on exact rationals, and on the symbolic affine scalar used by the
// piece enumerator.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <string>
#include <string_view>

namespace parq {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename T>
T vmax(const T& a, const T& b) {
    return a < b ? b : a;
}

template <typename T>
T vmin(const T& a, const T& b) {
    return b < a ? b : a;
}

/// Positive part, [x]^+.
template <typename T>
T pos(const T& x) {
    return T(0) < x ? x : T(0);
}

template <typename To, typename From>
To scalar_cast(const From& x) {
    if constexpr (std::is_same_v<To, From>) {
        return x;
    } else if constexpr (std::is_same_v<From, Rational> && std::is_arithmetic_v<To>) {
        return x.template convert_to<To>();
    } else {
        return To(x);
    }
}

/// Parses "n", "n/d", decimals ("2.25", "-1e-3") into an exact rational.
Rational parse_rational(std::string_view text);

/// The shortest decimal that round-trips `x`, read back as an exact rational.
/// 0.1 becomes 1/10 rather than the binary expansion of the double.
Rational rational_from_double(double x);

/// Canonical "num/den" form (denominator always printed).
std::string format_rational(const Rational& x);

/// Shortest round-trip decimal text of a double.
std::string format_double(double x);

}  // namespace parq
