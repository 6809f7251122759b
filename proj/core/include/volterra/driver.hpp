#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "volterra/collocation.hpp"
#include "volterra/stochastic.hpp"

namespace volterra {

/// Stopping rule of the adaptive mesh refinement loop. FPA compares the
/// plain difference of successive probe values against epsilon; SA stops
/// when the stochastic difference becomes an informatical zero.
struct StopRule {
    enum class Mode { fpa, sa };

    Mode mode = Mode::fpa;
    double epsilon = 1e-10; // FPA threshold
    double delta = 0.05;    // SA confidence parameter
    double t_eval = 0.05;   // probe point
    int max_segments = 10;  // largest N tried
};

/// One refinement step of an adaptive run. The difference and digit count
/// compare against the previous step, with x_0 taken as 0, so the first row
/// reports the value itself as its difference.
struct AdaptiveRow {
    int segments = 0;  // N
    double value = 0.0;
    double diff = 0.0; // |x_N - x_{N-1}| at the probe point
    double ncsd = 0.0; // digits shared with the previous value
    bool informatical_zero = false;
    double error_vs_exact = std::numeric_limits<double>::quiet_NaN();
    bool error_zero = false; // SA: error against exact is @.0
};

struct ConvergenceReport {
    std::vector<AdaptiveRow> rows;
    bool converged = false;
    int n_opt = 0;
    double error_opt = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0; // SA runs record their rounding seed
};

/// One row of a fixed-mesh convergence table.
struct StudyRow {
    int segments = 0;
    double error = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN(); // vs previous row
};

struct ConvergenceStudy {
    std::vector<StudyRow> rows;
    double fitted_order = std::numeric_limits<double>::quiet_NaN(); // least-squares slope
};

struct StabilityReport {
    std::vector<double> deltas;
    std::vector<double> errors;
    std::uint64_t seed = 0;
    int trials = 1;
};

/// Solves with N = 1, 2, ... until the stop rule fires, comparing the probe
/// value x_N(t_eval) against the previous step. SA mode requires a
/// stochastic scalar and an engaged RoundingContext; FPA mode works for any
/// scalar. Reaching max_segments without stopping yields a report with
/// converged = false rather than an error.
template <typename S>
ConvergenceReport adaptive_solve(const FirstKindProblem<S>& problem, int order,
                                 const StopRule& rule, const SolveOptions& options = {}) {
    constexpr bool stochastic = ScalarTraits<S>::is_stochastic;
    if (rule.mode == StopRule::Mode::sa && !stochastic)
        throw ConfigError("SA stopping needs the stochastic scalar instantiation");
    if (rule.mode == StopRule::Mode::fpa && !(rule.epsilon > 0.0))
        throw ConfigError("FPA stopping needs a positive epsilon");
    if (!(rule.t_eval > 0.0) || rule.t_eval > problem.kernel.horizon)
        throw ConfigError("probe point t_eval must lie in (0, T]");
    if (rule.max_segments < 1)
        throw ConfigError("max_segments must be at least 1");

    ConvergenceReport report;
    if constexpr (stochastic)
        report.seed = RoundingContext::current().seed();

    const ReducedEquation<S> reduced = reduce(problem, options.reduce);
    const S probe(rule.t_eval);
    S exact_value(0.0);
    const bool have_exact = static_cast<bool>(problem.exact);
    if (have_exact)
        exact_value = problem.exact(probe);

    S previous(0.0);
    double last_resolved_diff = std::numeric_limits<double>::quiet_NaN();

    for (int n = 1; n <= rule.max_segments; ++n) {
        const CollocationSolution<S> solution = solve(reduced, n, order, options);
        const S value = solution.spline.eval(probe);
        const S diff = value - previous;

        AdaptiveRow row;
        row.segments = n;
        row.value = to_double(value);
        row.diff = std::fabs(to_double(diff));

        if constexpr (stochastic) {
            const NcsdReport digits = ncsd_estimate(diff, rule.delta);
            row.ncsd = digits.value;
            row.informatical_zero = digits.informatical_zero;
            if (have_exact) {
                const S err = value - exact_value;
                row.error_vs_exact = std::fabs(to_double(err));
                row.error_zero = ncsd_estimate(err, rule.delta).informatical_zero;
            }
        } else {
            row.ncsd = ncsd_pair(to_double(value), to_double(previous));
            if (have_exact)
                row.error_vs_exact =
                    std::fabs(to_double(value) - to_double(exact_value));
        }
        report.rows.push_back(row);

        bool stop = false;
        if (rule.mode == StopRule::Mode::sa) {
            stop = row.informatical_zero;
        } else {
            stop = row.diff <= rule.epsilon;
        }
        if (!row.informatical_zero)
            last_resolved_diff = row.diff;

        if (stop) {
            report.converged = true;
            report.n_opt = n;
            // FPA cites the stopping difference, SA the last difference that
            // was still resolvable before @.0.
            report.error_opt =
                rule.mode == StopRule::Mode::fpa ? row.diff : last_resolved_diff;
            return report;
        }
        previous = value;
    }
    return report;
}

/// Fixed-order error table over a list of mesh sizes; also fits the overall
/// convergence order by least squares on (log N, log e).
ConvergenceStudy convergence_study(const FirstKindProblem<double>& problem, int order,
                                   const std::vector<int>& segment_counts,
                                   const SolveOptions& options = {}, int samples = 1000);

/// Reruns one (N, r) solve with the right side perturbed by independent
/// uniform(-delta, delta) draws, once per delta. With trials > 1 the
/// reported error is the median over that many independently seeded runs.
StabilityReport stability_study(const FirstKindProblem<double>& problem, int segments, int order,
                                const std::vector<double>& deltas, std::uint64_t seed,
                                int trials = 1, const SolveOptions& options = {});

/// CSV emission with fixed headers (see README): convergence tables are
/// `N,error,order`, adaptive runs `N,value,diff,ncsd,zero_flag`, stability
/// tables `delta,error`.
void write_csv(const ConvergenceStudy& study, std::ostream& os);
void write_csv(const ConvergenceReport& report, std::ostream& os);
void write_csv(const StabilityReport& report, std::ostream& os);

} // namespace volterra
