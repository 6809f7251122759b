#include "volterra/driver.hpp"

#include <algorithm>
#include <cstdio>

namespace volterra {

namespace {

std::string sci(double v) {
    char buf[40];
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.15e", v);
    return buf;
}

std::string digits(double v) {
    char buf[32];
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

ConvergenceStudy convergence_study(const FirstKindProblem<double>& problem, int order,
                                   const std::vector<int>& segment_counts,
                                   const SolveOptions& options, int samples) {
    if (!problem.exact)
        throw ConfigError("convergence study needs an exact solution");
    std::vector<int> counts = segment_counts;
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    if (counts.empty())
        throw ParameterError("convergence study needs at least one mesh size");

    const ReducedEquation<double> reduced = reduce(problem, options.reduce);
    const auto& exact = problem.exact;

    ConvergenceStudy study;
    for (int n : counts) {
        const auto solution = solve(reduced, n, order, options);
        StudyRow row;
        row.segments = n;
        row.error = sup_error(solution, exact, samples);
        if (!study.rows.empty()) {
            const StudyRow& prev = study.rows.back();
            if (row.error > 0.0 && prev.error > 0.0)
                row.order = std::log(prev.error / row.error) /
                            std::log(double(n) / prev.segments);
        }
        study.rows.push_back(row);
    }

    // Least-squares slope of log e against log N.
    int m = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& row : study.rows) {
        if (!(row.error > 0.0))
            continue;
        const double x = std::log(double(row.segments));
        const double y = std::log(row.error);
        ++m;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if (m >= 2) {
        const double denom = m * sxx - sx * sx;
        if (denom != 0.0)
            study.fitted_order = -(m * sxy - sx * sy) / denom;
    }
    return study;
}

StabilityReport stability_study(const FirstKindProblem<double>& problem, int segments, int order,
                                const std::vector<double>& deltas, std::uint64_t seed,
                                int trials, const SolveOptions& options) {
    if (!problem.exact)
        throw ConfigError("stability study needs an exact solution");
    if (trials < 1)
        throw ParameterError("stability study needs at least one trial");
    if (!deltas.empty() && deltas.front() < 0.0)
        throw ParameterError("noise amplitudes must be non-negative");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] > deltas[i - 1]))
            throw ParameterError("noise amplitudes must be ascending");

    const ReducedEquation<double> reduced = reduce(problem, options.reduce);
    const auto& exact = problem.exact;

    StabilityReport report;
    report.seed = seed;
    report.trials = trials;
    report.deltas = deltas;

    SplitMix64 seeder(seed);
    for (double delta : deltas) {
        const int actual_trials = delta > 0.0 ? trials : 1; // noiseless runs repeat exactly
        std::vector<double> errors;
        errors.reserve(actual_trials);
        for (int trial = 0; trial < actual_trials; ++trial) {
            ReducedEquation<double> noisy = reduced;
            if (delta > 0.0) {
                auto rng = std::make_shared<SplitMix64>(seeder.next());
                auto base = reduced.f;
                noisy.f = [base, rng, delta](const double& t) {
                    return base(t) + delta * (2.0 * rng->uniform01() - 1.0);
                };
            }
            const auto solution = solve(noisy, segments, order, options);
            errors.push_back(sup_error(solution, exact));
        }
        std::sort(errors.begin(), errors.end());
        report.errors.push_back(errors[errors.size() / 2]);
    }
    return report;
}

void write_csv(const ConvergenceStudy& study, std::ostream& os) {
    os << "N,error,order\n";
    for (const auto& row : study.rows) {
        os << row.segments << ',' << sci(row.error) << ',';
        if (!std::isnan(row.order))
            os << digits(row.order);
        os << '\n';
    }
}

void write_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "N,value,diff,ncsd,zero_flag\n";
    for (const auto& row : report.rows) {
        os << row.segments << ',' << sci(row.value) << ',' << sci(row.diff) << ','
           << digits(row.ncsd) << ',' << (row.informatical_zero ? 1 : 0) << '\n';
    }
}

void write_csv(const StabilityReport& report, std::ostream& os) {
    os << "delta,error\n";
    char delta_buf[32];
    for (std::size_t i = 0; i < report.deltas.size(); ++i) {
        std::snprintf(delta_buf, sizeof(delta_buf), "%g", report.deltas[i]);
        os << delta_buf << ',' << sci(report.errors[i]) << '\n';
    }
}

} // namespace volterra
