#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/scalar.hpp"

namespace volterra {

/// One discontinuity line s = alpha_i(t) of the kernel, with its derivative.
/// Both callables are supplied analytically.
template <typename S>
struct BoundaryCurve {
    std::function<S(const S&)> value;
    std::function<S(const S&)> derivative;
};

/// One smooth kernel branch K_i(t,s) together with its analytic t-derivative.
template <typename S>
struct KernelBranch {
    std::function<S(const S&, const S&)> eval;
    std::function<S(const S&, const S&)> dt;
};

/// Piecewise kernel of the first-kind equation: branch i applies between the
/// curves alpha_{i-1}(t) and alpha_i(t), with alpha_0 = 0 and alpha_n = t.
template <typename S>
struct PiecewiseKernel {
    std::vector<KernelBranch<S>> branches;
    std::vector<BoundaryCurve<S>> curves; // size branches.size() - 1
    double horizon = 1.0;

    std::size_t branch_count() const { return branches.size(); }
};

/// First-kind problem: integral of K(t,s) x(s) over [0,t] equals g(t).
/// Either the analytic derivative g' or a known exact solution (manufactured
/// mode) must be present; `g` and `exact` are optional.
template <typename S>
struct FirstKindProblem {
    PiecewiseKernel<S> kernel;
    std::function<S(const S&)> g;
    std::function<S(const S&)> g_dt;
    std::function<S(const S&)> exact;
};

/// Index of the branch owning the point (t,s): the smallest i with
/// s <= alpha_i(t). Points exactly on a curve belong to the lower branch; the
/// diagonal s = t belongs to the last branch. Indices are zero-based.
template <typename S>
std::size_t branch_index(const PiecewiseKernel<S>& kernel, const S& t, const S& s) {
    const double td = to_double(t);
    const double sd = to_double(s);
    if (sd < 0.0 || sd > td)
        throw DomainError("kernel query outside 0 <= s <= t: t=" + std::to_string(td) +
                          " s=" + std::to_string(sd));
    for (std::size_t i = 0; i < kernel.curves.size(); ++i) {
        if (sd <= to_double(kernel.curves[i].value(t)))
            return i;
    }
    return kernel.branches.size() - 1;
}

/// K(t,s) through the owning branch.
template <typename S>
S kernel_eval(const PiecewiseKernel<S>& kernel, const S& t, const S& s) {
    return kernel.branches[branch_index(kernel, t, s)].eval(t, s);
}

/// Sampled validation of the model assumptions: alpha_i(0) = 0, the curve
/// ordering 0 < alpha_1(t) < ... < alpha_{n-1}(t) < t on (0,T], finite curve
/// derivatives, and g(0) = 0 when g is present. Throws ModelError.
template <typename S>
void validate_problem(const FirstKindProblem<S>& problem, int sample_points = 64) {
    const auto& kernel = problem.kernel;
    if (kernel.branches.empty())
        throw ModelError("kernel needs at least one branch");
    if (kernel.curves.size() + 1 != kernel.branches.size())
        throw ModelError("kernel needs exactly one boundary curve less than branches");
    if (!(kernel.horizon > 0.0))
        throw ModelError("horizon must be positive");

    for (std::size_t i = 0; i < kernel.curves.size(); ++i) {
        const S zero(0.0);
        const double a0 = to_double(kernel.curves[i].value(zero));
        if (std::fabs(a0) > 1e-12)
            throw ModelError("boundary curve " + std::to_string(i) + " has alpha(0) != 0");
    }

    for (int k = 1; k <= sample_points; ++k) {
        const double td = kernel.horizon * k / sample_points;
        const S t(td);
        double prev = 0.0;
        for (std::size_t i = 0; i < kernel.curves.size(); ++i) {
            const double a = to_double(kernel.curves[i].value(t));
            const double ad = to_double(kernel.curves[i].derivative(t));
            if (!std::isfinite(a) || !std::isfinite(ad))
                throw ModelError("boundary curve " + std::to_string(i) +
                                 " is not finite at t=" + std::to_string(td));
            if (!(a > prev) || !(a < td))
                throw ModelError("boundary curves are not ordered as 0 < alpha_1 < ... < t at t=" +
                                 std::to_string(td));
            prev = a;
        }
    }

    if (problem.g) {
        const double g0 = to_double(problem.g(S(0.0)));
        if (std::fabs(g0) > 1e-12)
            throw ModelError("right side must vanish at t = 0, got g(0)=" + std::to_string(g0));
    }
    if (!problem.g_dt && !problem.exact)
        throw ConfigError("problem needs either g' (direct mode) or an exact solution (manufactured mode)");
}

} // namespace volterra
