#include "volterra/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "volterra/config.hpp"
#include "volterra/driver.hpp"

namespace volterra::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string sci6(double v) {
    char buf[32];
    if (std::isnan(v))
        return "n/a";
    std::snprintf(buf, sizeof(buf), "%.5e", v);
    return buf;
}

struct CommonFlags {
    std::string problem;
    std::string config_path;
    int order = 0;         // --r; 0 = config default
    int segments = 0;      // --N; 0 = config default
    double t_eval = 0.05;
    std::uint64_t sa_seed = 2021;
    int quad_points = 0;
    bool no_continuity = false;
    std::string csv_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--problem", flags.problem, "Built-in problem name (example1, example2)");
    cmd->add_option("--config", flags.config_path, "Path to a volterra-config v1 file");
    cmd->add_option("--r", flags.order, "Nodes per segment (spline order)");
    cmd->add_option("--quad-points", flags.quad_points,
                    "Gauss points per smooth piece (default r-2, at least 2)");
    cmd->add_flag("--no-continuity", flags.no_continuity,
                  "Solve all r unknowns per segment instead of inheriting the left endpoint");
    cmd->add_option("--csv", flags.csv_path, "Write the data table to this file instead of stdout");
}

ProblemConfig resolve_config(const CommonFlags& flags) {
    if (!flags.problem.empty() && !flags.config_path.empty())
        throw ConfigError("--problem and --config are mutually exclusive");
    if (!flags.problem.empty())
        return builtin_problem(flags.problem);
    if (!flags.config_path.empty())
        return load_config(flags.config_path);
    throw ConfigError("choose a problem with --problem <name> or --config <file>");
}

SolveOptions solve_options(const CommonFlags& flags) {
    SolveOptions options;
    options.quad_points = flags.quad_points;
    options.inherit_continuity = !flags.no_continuity;
    return options;
}

/// Data stream: --csv path or stdout.
class DataSink {
public:
    DataSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw ConfigError("cannot open CSV output file '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ostream* stream_;
    std::unique_ptr<std::ofstream> file_;
};

int resolved_order(const CommonFlags& flags, const ProblemConfig& config) {
    return flags.order > 0 ? flags.order : config.default_order;
}

int resolved_segments(const CommonFlags& flags, const ProblemConfig& config) {
    return flags.segments > 0 ? flags.segments : config.default_segments;
}

void print_adaptive_table(const ConvergenceReport& report, bool sa_mode, std::ostream& err) {
    err << "  N  x_N(t)        |x_N - x_{N-1}|  ncsd     error\n";
    for (const auto& row : report.rows) {
        char line[160];
        const std::string diff = row.informatical_zero ? std::string("@.0") : sci6(row.diff);
        const std::string error = row.error_zero ? std::string("@.0") : sci6(row.error_vs_exact);
        std::snprintf(line, sizeof(line), "%3d  %s  %-14s  %-7.3f  %s\n", row.segments,
                      sci6(row.value).c_str(), diff.c_str(), row.ncsd, error.c_str());
        err << line;
    }
    if (report.converged) {
        err << (sa_mode ? "SA" : "FPA") << " stop: N_opt = " << report.n_opt
            << ", x(t_eval) = " << sci6(report.rows.back().value)
            << ", error_opt = " << sci6(report.error_opt);
        if (sa_mode)
            err << ", seed = " << report.seed;
        err << "\n";
    } else {
        err << "no convergence within N <= " << report.rows.back().segments << "\n";
    }
}

int cmd_solve(const CommonFlags& flags, const std::string& dump_path, std::ostream& out,
              std::ostream& err) {
    const ProblemConfig config = resolve_config(flags);
    const auto problem = make_problem<double>(config);
    validate_problem(problem);
    const int r = resolved_order(flags, config);
    const int n = resolved_segments(flags, config);

    const auto reduced = reduce(problem);
    const auto solution = solve(reduced, n, r, solve_options(flags));

    DataSink sink(flags.csv_path, out);
    auto& os = sink.stream();
    const bool have_exact = static_cast<bool>(problem.exact);
    os << (have_exact ? "t,approx,exact,error\n" : "t,approx\n");
    const int samples = 201;
    char buf[160];
    for (int i = 0; i < samples; ++i) {
        const double t = config.horizon * i / (samples - 1);
        const double approx = solution.spline.eval(t);
        if (have_exact) {
            const double exact = problem.exact(t);
            std::snprintf(buf, sizeof(buf), "%.15e,%.15e,%.15e,%.15e\n", t, approx, exact,
                          std::fabs(approx - exact));
        } else {
            std::snprintf(buf, sizeof(buf), "%.15e,%.15e\n", t, approx);
        }
        os << buf;
    }

    if (!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if (!dump)
            throw ConfigError("cannot open spline dump file '" + dump_path + "'");
        dump_spline(solution.spline, dump);
    }

    err << "problem " << config.name << ": N = " << n << ", r = " << r
        << ", max collocation residual = " << sci6(solution.residual_norm) << "\n";
    if (have_exact)
        err << "sup error = " << sci6(sup_error(solution, problem.exact)) << "\n";
    return kExitOk;
}

int cmd_converge(const CommonFlags& flags, std::vector<int> segment_counts, std::ostream& out,
                 std::ostream& err) {
    const ProblemConfig config = resolve_config(flags);
    const auto problem = make_problem<double>(config);
    validate_problem(problem);
    const int r = resolved_order(flags, config);
    if (segment_counts.empty())
        segment_counts = {1, 5, 10, 20};

    const ConvergenceStudy study =
        convergence_study(problem, r, segment_counts, solve_options(flags));

    DataSink sink(flags.csv_path, out);
    write_csv(study, sink.stream());
    err << "problem " << config.name << ", r = " << r
        << ": fitted order = " << sci6(study.fitted_order) << "\n";
    return kExitOk;
}

int cmd_adaptive(const CommonFlags& flags, StopRule::Mode mode, double epsilon, std::ostream& out,
                 std::ostream& err) {
    const ProblemConfig config = resolve_config(flags);
    StopRule rule;
    rule.mode = mode;
    rule.epsilon = epsilon;
    rule.t_eval = flags.t_eval;
    rule.max_segments = flags.segments > 0 ? flags.segments : 10;
    const int r = resolved_order(flags, config);

    // Validation runs on the plain scalar so it does not consume random
    // draws of the stochastic session.
    validate_problem(make_problem<double>(config));

    ConvergenceReport report;
    if (mode == StopRule::Mode::sa) {
        SaSession session(flags.sa_seed);
        const auto problem = make_problem<SaReal>(config);
        report = adaptive_solve(problem, r, rule, solve_options(flags));
    } else {
        const auto problem = make_problem<double>(config);
        report = adaptive_solve(problem, r, rule, solve_options(flags));
    }

    DataSink sink(flags.csv_path, out);
    write_csv(report, sink.stream());
    print_adaptive_table(report, mode == StopRule::Mode::sa, err);
    return report.converged ? kExitOk : kExitNumerical;
}

int cmd_stability(const CommonFlags& flags, int trials, std::ostream& out, std::ostream& err) {
    const ProblemConfig config = resolve_config(flags);
    const auto problem = make_problem<double>(config);
    validate_problem(problem);
    const int r = resolved_order(flags, config);
    const int n = resolved_segments(flags, config);
    const std::vector<double> deltas = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};

    const StabilityReport report =
        stability_study(problem, n, r, deltas, flags.sa_seed, trials, solve_options(flags));

    DataSink sink(flags.csv_path, out);
    write_csv(report, sink.stream());
    err << "problem " << config.name << ": N = " << n << ", r = " << r << ", trials = " << trials
        << ", seed = " << report.seed << "\n";
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spline-collocation solver for first-kind Volterra equations with "
                 "piecewise kernels"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string dump_path;
    std::vector<int> segment_counts;
    double epsilon = 1e-10;
    int trials = 1;

    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve once and emit the sampled curve");
    add_common(solve_cmd, flags);
    solve_cmd->add_option("--N", flags.segments, "Number of mesh segments");
    solve_cmd->add_option("--dump-spline", dump_path, "Write the spline coefficient table here");

    CLI::App* converge_cmd =
        app.add_subcommand("converge", "Error table over a list of mesh sizes");
    add_common(converge_cmd, flags);
    converge_cmd->add_option("--Ns", segment_counts, "Comma-separated mesh sizes")
        ->delimiter(',');

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Adaptive run with the stochastic-arithmetic stop rule");
    add_common(validate_cmd, flags);
    validate_cmd->add_option("--N", flags.segments, "Largest mesh size tried (default 10)");
    validate_cmd->add_option("--t-eval", flags.t_eval, "Probe point (default 0.05)");
    validate_cmd->add_option("--sa-seed", flags.sa_seed, "Random-rounding seed");

    CLI::App* fpa_cmd =
        app.add_subcommand("fpa", "Adaptive run with the plain epsilon stop rule");
    add_common(fpa_cmd, flags);
    fpa_cmd->add_option("--N", flags.segments, "Largest mesh size tried (default 10)");
    fpa_cmd->add_option("--t-eval", flags.t_eval, "Probe point (default 0.05)");
    fpa_cmd->add_option("--epsilon", epsilon, "Stopping threshold (default 1e-10)");

    CLI::App* stability_cmd =
        app.add_subcommand("stability", "Error under uniform noise on the right side");
    add_common(stability_cmd, flags);
    stability_cmd->add_option("--N", flags.segments, "Number of mesh segments");
    stability_cmd->add_option("--sa-seed", flags.sa_seed, "Noise seed");
    stability_cmd->add_option("--stability-trials", trials,
                              "Trials per noise level; the median error is reported");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (solve_cmd->parsed())
            return cmd_solve(flags, dump_path, out, err);
        if (converge_cmd->parsed())
            return cmd_converge(flags, segment_counts, out, err);
        if (validate_cmd->parsed())
            return cmd_adaptive(flags, StopRule::Mode::sa, epsilon, out, err);
        if (fpa_cmd->parsed())
            return cmd_adaptive(flags, StopRule::Mode::fpa, epsilon, out, err);
        if (stability_cmd->parsed())
            return cmd_stability(flags, trials, out, err);
        err << "usage error: no subcommand given\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParameterError& e) {
        err << "parameter error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? argc - 1 : 0);
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace volterra::cli
