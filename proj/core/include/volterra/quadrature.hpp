#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/problem.hpp"
#include "volterra/scalar.hpp"

namespace volterra {

/// Gauss-Legendre rule on [-1,1]. Nodes are strictly increasing and exactly
/// antisymmetric; the rule integrates polynomials up to degree 2m-1.
struct GaussRule {
    int degree = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// The m-point Gauss-Legendre rule, 1 <= m <= 64. Rules are generated once by
/// Newton iteration on the Legendre recurrence and memoized behind a lock;
/// the returned reference stays valid for the process lifetime.
const GaussRule& legendre_rule(int m);

/// Integration interval with the abscissae where the integrand loses
/// smoothness. Breakpoints are sorted and strictly inside (a,b); candidates
/// closer than 1e-14*(b-a) to an endpoint or to each other are merged.
template <typename S>
struct BreakpointedInterval {
    S a;
    S b;
    std::vector<S> interior;
};

template <typename S>
BreakpointedInterval<S> make_breakpointed(S a, S b, std::vector<S> candidates) {
    const double ad = to_double(a);
    const double bd = to_double(b);
    if (!(ad < bd))
        throw ParameterError("breakpointed interval needs a < b");
    const double tol = 1e-14 * (bd - ad);

    std::sort(candidates.begin(), candidates.end(),
              [](const S& x, const S& y) { return to_double(x) < to_double(y); });
    BreakpointedInterval<S> interval{std::move(a), std::move(b), {}};
    double last = ad;
    for (auto& c : candidates) {
        const double cd = to_double(c);
        if (cd <= ad + tol || cd >= bd - tol)
            continue;
        if (cd - last <= tol)
            continue;
        last = cd;
        interval.interior.push_back(std::move(c));
    }
    return interval;
}

/// Breakpoints of s -> K(t,s) inside (a,b): the curve values alpha_i(t) that
/// fall strictly between a and b.
template <typename S>
BreakpointedInterval<S> breakpoints_for_curves(const std::vector<BoundaryCurve<S>>& curves,
                                               const S& t, S a, S b) {
    std::vector<S> candidates;
    candidates.reserve(curves.size());
    for (const auto& curve : curves)
        candidates.push_back(curve.value(t));
    return make_breakpointed(std::move(a), std::move(b), std::move(candidates));
}

template <typename S>
BreakpointedInterval<S> breakpoints_for_kernel(const PiecewiseKernel<S>& kernel,
                                               const S& t, S a, S b) {
    return breakpoints_for_curves(kernel.curves, t, std::move(a), std::move(b));
}

/// Compound Gauss quadrature: the m-point rule applied on every sub-segment
/// between consecutive breakpoints (optionally each split into `refine`
/// equal parts). Throws EvaluationError at the offending abscissa when the
/// integrand returns a non-finite value.
template <typename S, typename Fn>
S integrate(Fn&& fn, const BreakpointedInterval<S>& interval, int m, int refine = 1) {
    const GaussRule& rule = legendre_rule(m);
    if (refine < 1)
        throw ParameterError("refinement factor must be at least 1");

    std::vector<S> bounds;
    bounds.reserve(interval.interior.size() + 2);
    bounds.push_back(interval.a);
    for (const auto& c : interval.interior)
        bounds.push_back(c);
    bounds.push_back(interval.b);

    const S half_one(0.5);
    S total(0.0);
    for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        for (int part = 0; part < refine; ++part) {
            S lo = bounds[seg];
            S hi = bounds[seg + 1];
            if (refine > 1) {
                const S width = hi - lo;
                const S base = lo;
                lo = base + width * S(double(part) / refine);
                hi = (part + 1 == refine) ? hi : base + width * S(double(part + 1) / refine);
            }
            const S mid = (lo + hi) * half_one;
            const S half = (hi - lo) * half_one;
            S acc(0.0);
            for (int j = 0; j < rule.degree; ++j) {
                const S x = mid + half * S(rule.nodes[j]);
                const S v = fn(x);
                if (!std::isfinite(to_double(v)))
                    throw EvaluationError("integrand is not finite at s=" +
                                              std::to_string(to_double(x)),
                                          to_double(x));
                acc += S(rule.weights[j]) * v;
            }
            total += half * acc;
        }
    }
    return total;
}

/// Convenience overload for a plain interval [a,b] without breakpoints.
template <typename S, typename Fn>
S integrate(Fn&& fn, S a, S b, int m, int refine = 1) {
    if (to_double(a) == to_double(b))
        return S(0.0);
    BreakpointedInterval<S> interval{std::move(a), std::move(b), {}};
    return integrate(std::forward<Fn>(fn), interval, m, refine);
}

} // namespace volterra
