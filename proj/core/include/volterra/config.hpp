#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "volterra/expr.hpp"
#include "volterra/problem.hpp"

namespace volterra {

struct BranchConfig {
    ExprPtr kernel;    // K(t,s)
    ExprPtr kernel_dt; // dK/dt(t,s)
};

struct CurveConfig {
    ExprPtr alpha;    // alpha(t)
    ExprPtr alpha_dt; // alpha'(t)
};

/// Parsed problem description. Either `exact` (manufactured right side) or
/// `g_dt` (direct right side) must be present; when both are given g_dt
/// forms the right side and exact is used for error reporting.
struct ProblemConfig {
    std::string name;
    double horizon = 1.0;
    std::vector<BranchConfig> branches;
    std::vector<CurveConfig> curves;
    ExprPtr exact;
    ExprPtr g_dt;
    int default_order = 5;    // r
    int default_segments = 5; // N
};

/// Parses the `volterra-config v1` format: a required version header line,
/// then [problem]/[branch]/[curve] sections holding key = expression lines.
/// See the README for the grammar.
ProblemConfig parse_config(std::string_view text, const std::string& source_name = "<config>");
ProblemConfig parse_config(std::istream& in, const std::string& source_name);
ProblemConfig load_config(const std::string& path);

const std::vector<std::string>& builtin_problem_names();
bool is_builtin_problem(std::string_view name);
std::string_view builtin_problem_text(std::string_view name);
ProblemConfig builtin_problem(std::string_view name);

/// Instantiates the callable problem for a scalar type. The returned
/// closures evaluate the parsed expressions, so the stochastic mode
/// propagates rounding noise through every kernel and curve evaluation.
template <typename S>
FirstKindProblem<S> make_problem(const ProblemConfig& config) {
    FirstKindProblem<S> problem;
    problem.kernel.horizon = config.horizon;
    for (const auto& branch : config.branches) {
        KernelBranch<S> b;
        b.eval = [e = branch.kernel](const S& t, const S& s) {
            return eval_expression_ts(*e, t, s);
        };
        b.dt = [e = branch.kernel_dt](const S& t, const S& s) {
            return eval_expression_ts(*e, t, s);
        };
        problem.kernel.branches.push_back(std::move(b));
    }
    for (const auto& curve : config.curves) {
        BoundaryCurve<S> c;
        c.value = [e = curve.alpha](const S& t) { return eval_expression_t(*e, t); };
        c.derivative = [e = curve.alpha_dt](const S& t) { return eval_expression_t(*e, t); };
        problem.kernel.curves.push_back(std::move(c));
    }
    if (config.exact)
        problem.exact = [e = config.exact](const S& t) { return eval_expression_t(*e, t); };
    if (config.g_dt)
        problem.g_dt = [e = config.g_dt](const S& t) { return eval_expression_t(*e, t); };
    return problem;
}

} // namespace volterra
