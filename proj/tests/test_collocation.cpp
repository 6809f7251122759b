#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "volterra/collocation.hpp"
#include "volterra/config.hpp"
#include "volterra/stochastic.hpp"

using namespace volterra;

namespace {

FirstKindProblem<double> trivial_problem() {
    FirstKindProblem<double> p;
    p.kernel.horizon = 1.0;
    p.kernel.branches = {{[](const double&, const double&) { return 1.0; },
                          [](const double&, const double&) { return 0.0; }}};
    p.exact = [](const double&) { return 1.0; };
    return p;
}

// Two polynomial branches with a genuine jump across alpha = t/2 and a cubic
// solution: every quadrature in the solve is exact, so the collocation
// reproduces x* to rounding.
FirstKindProblem<double> polynomial_problem() {
    FirstKindProblem<double> p;
    p.kernel.horizon = 1.0;
    p.kernel.branches = {
        {[](const double& t, const double& s) { return 2.0 + t + s; },
         [](const double&, const double&) { return 1.0; }},
        {[](const double& t, const double&) { return 3.0 + 2.0 * t; },
         [](const double&, const double&) { return 2.0; }},
    };
    p.kernel.curves = {
        {[](const double& t) { return t / 2.0; }, [](const double&) { return 0.5; }}};
    p.exact = [](const double& t) { return t * t * t; };
    return p;
}

double fitted_order(const std::vector<int>& meshes, const std::vector<double>& errors) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < meshes.size(); ++i) {
        const double x = std::log(double(meshes[i]));
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const int m = static_cast<int>(meshes.size());
    return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace

TEST_CASE("gauss-jordan solves and pivots") {
    SegmentSystem<double> identity{0, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {4, -1, 2.5}, {0, 1, 2}};
    CHECK(gauss_jordan_solve(identity) == std::vector<double>{4, -1, 2.5});

    SegmentSystem<double> sys{0, 2, {2, 1, 1, 3}, {5, 10}, {0, 1}};
    const auto sol = gauss_jordan_solve(sys);
    CHECK(sol[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol[1] == doctest::Approx(3.0).epsilon(1e-14));

    // needs a row swap to find the pivot
    SegmentSystem<double> swapped{0, 2, {0, 1, 1, 0}, {7, -2}, {0, 1}};
    const auto sol2 = gauss_jordan_solve(swapped);
    CHECK(sol2[0] == doctest::Approx(-2.0));
    CHECK(sol2[1] == doctest::Approx(7.0));

    SegmentSystem<double> singular{0, 2, {1, 2, 2, 4}, {1, 2}, {0, 1}};
    CHECK_THROWS_AS(gauss_jordan_solve(singular), SingularSystemError);
}

TEST_CASE("first segment of the trivial problem is an identity system") {
    const auto eq = reduce(trivial_problem());
    LocalSpline<double> spline(1.0, 1, 3);
    const auto system = assemble_segment(eq, spline, 0, 2);
    REQUIRE(system.size == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(system.rhs[i] == doctest::Approx(1.0).epsilon(1e-14));
        for (int j = 0; j < 3; ++j)
            CHECK(system.matrix[i * 3 + j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    }
    for (double v : gauss_jordan_solve(system))
        CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("trivial problem is exact for every small mesh and order") {
    const auto problem = trivial_problem();
    const auto eq = reduce(problem);
    for (int n = 1; n <= 5; ++n)
        for (int r = 3; r <= 6; ++r) {
            const auto solution = solve(eq, n, r);
            CHECK(sup_error(solution, problem.exact) <= 1e-12);
        }
}

TEST_CASE("polynomial problems are solved exactly at N = 1") {
    const auto problem = polynomial_problem();
    const auto eq = reduce(problem);
    for (int r : {4, 5, 6}) {
        const auto solution = solve(eq, 1, r);
        CHECK(sup_error(solution, problem.exact) <= 1e-10);
    }
}

TEST_CASE("assembled rows vanish on the exact polynomial solution") {
    // substitute the exact solution for the prior segments and verify the
    // residual of the true coefficients on segment k
    const auto problem = polynomial_problem();
    const auto eq = reduce(problem);
    const int n = 4, r = 5, k = 2;
    LocalSpline<double> spline(1.0, n, r);
    for (int seg = 0; seg < n; ++seg)
        for (int j = 0; j < r; ++j)
            spline.set_coefficient(seg, j, problem.exact(spline.segment_nodes(seg).xi[j]));

    const auto system = assemble_segment(eq, spline, k, 3);
    double rhs_scale = 0.0;
    for (const auto& b : system.rhs)
        rhs_scale = std::max(rhs_scale, std::fabs(b));
    for (int row = 0; row < system.size; ++row) {
        double acc = 0.0;
        for (int c = 0; c < system.size; ++c)
            acc += system.matrix[row * system.size + c] *
                   spline.coefficient(k, system.unknown_map[c]);
        CHECK(std::fabs(acc - system.rhs[row]) <= 1e-10 * (1.0 + rhs_scale));
    }
}

TEST_CASE("example 1 at N = 1, r = 4 lands near the paper's first column") {
    const auto problem = make_problem<double>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    const auto solution = solve(eq, 1, 4);
    const double err = sup_error(solution, problem.exact);
    // paper reports 6.57e-4 for this cell
    CHECK(err <= 5.0 * 6.57e-4);
    CHECK(err >= 6.57e-4 / 5.0);
}

TEST_CASE("example 1 high-order run reaches the double-precision floor") {
    const auto problem = make_problem<double>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    CHECK(sup_error(solve(eq, 10, 7), problem.exact) <= 1e-12);
}

TEST_CASE("example 2 high-order run reaches the double-precision floor") {
    const auto problem = make_problem<double>(builtin_problem("example2"));
    const auto eq = reduce(problem);
    CHECK(sup_error(solve(eq, 5, 10), problem.exact) <= 1e-12);
}

TEST_CASE("convergence order matches the spline order") {
    struct Case {
        const char* name;
        int order;
    };
    for (const Case c : {Case{"example1", 4}, Case{"example1", 5}, Case{"example2", 5}}) {
        const auto problem = make_problem<double>(builtin_problem(c.name));
        const auto eq = reduce(problem);
        const std::vector<int> meshes = {5, 10, 20, 50};
        std::vector<double> errors;
        for (int n : meshes)
            errors.push_back(sup_error(solve(eq, n, c.order), problem.exact));
        CHECK(fitted_order(meshes, errors) >= c.order - 0.5);
    }
}

TEST_CASE("solved segments never change afterwards") {
    const auto problem = make_problem<double>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    const int r = 5, n = 6;

    // replay the step method by hand for the first three segments
    LocalSpline<double> partial(eq.horizon, n, r);
    for (int k = 0; k < 3; ++k) {
        if (k > 0)
            partial.set_coefficient(k, 0, partial.coefficient(k - 1, r - 1));
        const auto system = assemble_segment(eq, partial, k, 3);
        const auto values = gauss_jordan_solve(system);
        for (std::size_t c = 0; c < values.size(); ++c)
            partial.set_coefficient(k, system.unknown_map[c], values[c]);
    }

    const auto full = solve(eq, n, r);
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < r; ++j)
            CHECK(full.spline.coefficient(k, j) == partial.coefficient(k, j));
}

TEST_CASE("collocation residuals of the solved spline stay small") {
    const auto problem = make_problem<double>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    const auto solution = solve(eq, 8, 5);
    CHECK(solution.residual_norm <= 1e-9 * (1.0 + 1.0));

    // re-assemble against the final spline: residual of the stored
    // coefficients stays at solver precision
    for (int k = 0; k < 8; ++k) {
        const auto system = assemble_segment(eq, solution.spline, k, 3);
        double rhs_scale = 0.0;
        for (const auto& b : system.rhs)
            rhs_scale = std::max(rhs_scale, std::fabs(b));
        for (int row = 0; row < system.size; ++row) {
            double acc = 0.0;
            for (int c = 0; c < system.size; ++c)
                acc += system.matrix[row * system.size + c] *
                       solution.spline.coefficient(k, system.unknown_map[c]);
            CHECK(std::fabs(acc - system.rhs[row]) <= 1e-9 * (1.0 + rhs_scale));
        }
    }
}

TEST_CASE("continuity inheritance keeps the spline single-valued") {
    const auto problem = make_problem<double>(builtin_problem("example2"));
    const auto eq = reduce(problem);
    const auto solution = solve(eq, 6, 5);
    for (int k = 1; k < 6; ++k)
        CHECK(solution.spline.coefficient(k, 0) == solution.spline.coefficient(k - 1, 4));
}

TEST_CASE("the no-continuity variant also converges") {
    const auto problem = make_problem<double>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    SolveOptions options;
    options.inherit_continuity = false;
    const auto solution = solve(eq, 5, 5, options);
    CHECK(sup_error(solution, problem.exact) <= 1e-6);
}

TEST_CASE("sup_error of a spline against itself is zero") {
    const auto problem = make_problem<double>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    const auto solution = solve(eq, 3, 4);
    const auto& spline = solution.spline;
    CHECK(sup_error(solution, [&spline](double t) { return spline.eval(t); }) <= 1e-13);
}

TEST_CASE("solver parameter validation") {
    const auto eq = reduce(trivial_problem());
    CHECK_THROWS_AS(solve(eq, 0, 4), ParameterError);
    CHECK_THROWS_AS(solve(eq, 3, 2), ParameterError);
}

TEST_CASE("solve runs under stochastic arithmetic") {
    SaSession session(11);
    const auto problem = make_problem<SaReal>(builtin_problem("example1"));
    const auto eq = reduce(problem);
    const auto solution = solve(eq, 3, 5);
    const SaReal probe = solution.spline.eval(SaReal(0.05));
    CHECK(std::fabs(probe.mean() - 0.05 * std::sin(0.05)) < 1e-5);
    CHECK(probe.sigma() > 0.0);
}
