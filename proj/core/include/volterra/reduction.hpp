#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/problem.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {

/// Equivalent second-kind equation with delay terms,
///
///   x(t) + sum_i b_i(t) x(alpha_i(t)) - int_0^t h(t,s) x(s) ds = f(t),
///
/// obtained by differentiating the first-kind equation in t. For a piecewise
/// kernel the differentiation of the moving branch boundaries contributes the
/// delay coefficients b_i.
template <typename S>
struct ReducedEquation {
    std::function<S(const S&, const S&)> h;               // -K'_t(t,s)/K_n(t,t)
    std::vector<std::function<S(const S&)>> delay_coeffs; // b_i(t)
    std::vector<BoundaryCurve<S>> delays;                 // alpha_i
    std::function<S(const S&)> f;                         // right side
    double horizon = 1.0;
};

struct ReduceOptions {
    double diagonal_tolerance = 1e-12; // relative floor for |K_n(t,t)|
    int diagonal_probe_points = 101;
    int manufactured_quad_points = 20;     // Gauss size for the manufactured right side
    double manufactured_max_chunk = 0.25;  // extra uniform refinement of smooth pieces
};

/// Right side that makes `problem.exact` the solution of the reduced
/// equation: f(t) = x*(t) + sum b_i(t) x*(alpha_i(t)) - int_0^t h x* ds, with
/// the integral done by high-order compound quadrature split at the kernel
/// discontinuities.
template <typename S>
S manufactured_rhs(const FirstKindProblem<S>& problem, const ReducedEquation<S>& reduced,
                   const S& t, const ReduceOptions& options = {}) {
    if (!problem.exact)
        throw ConfigError("manufactured right side needs an exact solution on the problem");
    const auto& exact = problem.exact;

    S value = exact(t);
    for (std::size_t i = 0; i < reduced.delays.size(); ++i) {
        const S a = reduced.delays[i].value(t);
        value += reduced.delay_coeffs[i](t) * exact(a);
    }

    const double td = to_double(t);
    if (td > 0.0) {
        auto interval = breakpoints_for_curves(reduced.delays, t, S(0.0), t);
        const int refine =
            std::max(1, static_cast<int>(std::ceil(td / options.manufactured_max_chunk)));
        const auto& h = reduced.h;
        const S integral = integrate(
            [&](const S& s) { return h(t, s) * exact(s); }, interval,
            options.manufactured_quad_points, refine);
        value -= integral;
    }
    return value;
}

/// Analytic reduction of a first-kind problem to its second-kind form.
/// Probes the last-branch diagonal before dividing by it. The right side
/// comes from g' when available, otherwise from the manufactured route.
template <typename S>
ReducedEquation<S> reduce(const FirstKindProblem<S>& problem, const ReduceOptions& options = {}) {
    const auto& kernel = problem.kernel;
    if (kernel.branches.empty())
        throw ModelError("kernel needs at least one branch");
    if (kernel.curves.size() + 1 != kernel.branches.size())
        throw ModelError("kernel needs exactly one boundary curve less than branches");

    double max_diag = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    double min_at = 0.0;
    const int probes = std::max(2, options.diagonal_probe_points);
    for (int i = 0; i < probes; ++i) {
        const double td = kernel.horizon * i / (probes - 1);
        const S t(td);
        const double d = std::fabs(to_double(kernel.branches.back().eval(t, t)));
        max_diag = std::max(max_diag, d);
        if (d < min_diag) {
            min_diag = d;
            min_at = td;
        }
    }
    if (min_diag < options.diagonal_tolerance * std::max(1.0, max_diag))
        throw ModelError("kernel diagonal K_n(t,t) is degenerate near t=" + std::to_string(min_at));

    // The closures share one kernel copy.
    auto shared = std::make_shared<const PiecewiseKernel<S>>(kernel);

    ReducedEquation<S> eq;
    eq.horizon = kernel.horizon;
    eq.delays = kernel.curves;
    eq.h = [shared](const S& t, const S& s) {
        const std::size_t i = branch_index(*shared, t, s);
        return -shared->branches[i].dt(t, s) / shared->branches.back().eval(t, t);
    };
    for (std::size_t i = 0; i < kernel.curves.size(); ++i) {
        eq.delay_coeffs.push_back([shared, i](const S& t) {
            const S a = shared->curves[i].value(t);
            const S jump = shared->branches[i].eval(t, a) - shared->branches[i + 1].eval(t, a);
            return jump * shared->curves[i].derivative(t) / shared->branches.back().eval(t, t);
        });
    }

    if (problem.g_dt) {
        auto g_dt = problem.g_dt;
        eq.f = [shared, g_dt](const S& t) {
            return g_dt(t) / shared->branches.back().eval(t, t);
        };
    } else if (problem.exact) {
        // Manufactured mode: capture a self-contained copy of the reduced
        // operator pieces so the closure does not dangle.
        auto frozen = std::make_shared<const ReducedEquation<S>>(eq);
        auto problem_copy = std::make_shared<const FirstKindProblem<S>>(problem);
        eq.f = [frozen, problem_copy, options](const S& t) {
            return manufactured_rhs(*problem_copy, *frozen, t, options);
        };
    } else {
        throw ConfigError("problem needs either g' or an exact solution to form the right side");
    }
    return eq;
}

} // namespace volterra
