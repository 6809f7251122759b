#pragma once

#include <cmath>
#include <limits>

namespace volterra {

/// Traits connecting the numeric pipeline to its scalar type. The solver is
/// generic over the scalar so that the stochastic-arithmetic mode runs the
/// exact same code path as the plain floating-point mode.
template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool is_stochastic = false;

    static double to_double(double v) { return v; }
    static double from_double(double v) { return v; }

    /// Scale of one rounding step relative to a unit-magnitude value.
    static double noise_epsilon() { return std::numeric_limits<double>::epsilon(); }
};

/// Mean value of a scalar as a plain double (identity for double).
template <typename S>
double to_double(const S& v) {
    return ScalarTraits<S>::to_double(v);
}

template <typename S>
S make_scalar(double v) {
    return ScalarTraits<S>::from_double(v);
}

} // namespace volterra
