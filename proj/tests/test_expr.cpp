#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "volterra/config.hpp"
#include "volterra/expr.hpp"
#include "volterra/reduction.hpp"
#include "volterra/stochastic.hpp"

using namespace volterra;

namespace {

double eval_ts(const Expr& e, double t, double s) {
    return eval_expression_ts(e, t, s);
}

double eval_t(const Expr& e, double t) {
    return eval_expression_t(e, t);
}

// random expression generator for the round-trip property
ExprPtr random_expr(SplitMix64& rng, int depth) {
    Expr node;
    const auto leaf = depth <= 0;
    const unsigned pick = static_cast<unsigned>(rng.next() % (leaf ? 2 : 5));
    switch (pick) {
    case 0:
        node.kind = Expr::Kind::number;
        node.number = std::round(200.0 * rng.uniform01() - 100.0) / 8.0;
        break;
    case 1:
        node.kind = Expr::Kind::variable;
        node.variable = rng.next() % 2 ? 't' : 's';
        break;
    case 2:
        node.kind = Expr::Kind::negate;
        node.lhs = random_expr(rng, depth - 1);
        if (node.lhs->kind == Expr::Kind::number) { // mirrors the parser's sign fold
            node.kind = Expr::Kind::number;
            node.number = -node.lhs->number;
            node.lhs = nullptr;
        }
        break;
    case 3: {
        node.kind = Expr::Kind::binary;
        const char ops[] = {'+', '-', '*', '/', '^'};
        node.op = ops[rng.next() % 5];
        node.lhs = random_expr(rng, depth - 1);
        node.rhs = random_expr(rng, depth - 1);
        break;
    }
    default:
        node.kind = Expr::Kind::call;
        node.fn = static_cast<Expr::Fn>(rng.next() % 5);
        node.lhs = random_expr(rng, depth - 1);
        break;
    }
    return std::make_shared<const Expr>(std::move(node));
}

} // namespace

TEST_CASE("parses the built-in exact solutions") {
    const ExprPtr e1 = parse_expression("t*sin(t)");
    REQUIRE(e1->kind == Expr::Kind::binary);
    CHECK(e1->op == '*');
    CHECK(e1->lhs->kind == Expr::Kind::variable);
    CHECK(e1->rhs->kind == Expr::Kind::call);
    CHECK(e1->rhs->fn == Expr::Fn::sin);
    CHECK(eval_t(*e1, 0.5) == doctest::Approx(0.5 * std::sin(0.5)).epsilon(1e-15));

    const ExprPtr e2 = parse_expression("exp(2-t)*t^2");
    CHECK(eval_t(*e2, 1.25) == doctest::Approx(std::exp(0.75) * 1.5625).epsilon(1e-15));
}

TEST_CASE("syntax errors carry the byte offset") {
    try {
        parse_expression("(t+s");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
        CHECK(std::string(e.what()).find("')'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expression("t++s"), ParseError);
    CHECK_THROWS_AS(parse_expression(""), ParseError);
    CHECK_THROWS_AS(parse_expression("sin t"), ParseError);
    CHECK_THROWS_AS(parse_expression("2*q"), ParseError);    // unknown identifier
    CHECK_THROWS_AS(parse_expression("foo(t)"), ParseError); // unknown function
    CHECK_THROWS_AS(parse_expression("1 2"), ParseError);    // trailing input
}

TEST_CASE("evaluation basics") {
    CHECK(eval_ts(*parse_expression("t+s"), 0.6, 0.2) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(eval_ts(*parse_expression("1+sin(2*s)"), 0.0, 0.0) == 1.0);
    const double pi = 3.14159265358979323846;
    CHECK(eval_ts(*parse_expression("cos(s)"), 0.0, pi) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
    CHECK(eval_t(*parse_expression("2+3*4"), 0.0) == 14.0);
    CHECK(eval_t(*parse_expression("2^3^2"), 0.0) == 512.0);  // right-associative
    CHECK(eval_t(*parse_expression("-2^2"), 0.0) == -4.0);    // ^ binds tighter than unary -
    CHECK(eval_t(*parse_expression("2^-1"), 0.0) == 0.5);     // unary minus in the exponent
    CHECK(eval_t(*parse_expression("10-4-3"), 0.0) == 3.0);   // left-associative
    CHECK(eval_t(*parse_expression("12/4/3"), 0.0) == 1.0);
    CHECK(eval_t(*parse_expression(" 1e-3 + 2.5E2 "), 0.0) == doctest::Approx(250.001));
}

TEST_CASE("evaluation faults carry positions") {
    const ExprPtr division = parse_expression("1/(t-1)");
    CHECK_THROWS_AS(eval_t(*division, 1.0), EvaluationError);
    const ExprPtr logarithm = parse_expression("log(t)");
    CHECK_THROWS_AS(eval_t(*logarithm, 0.0), EvaluationError);
    CHECK_THROWS_AS(eval_t(*logarithm, -0.5), EvaluationError);
    const ExprPtr root = parse_expression("sqrt(t)");
    CHECK_THROWS_AS(eval_t(*root, -1.0), EvaluationError);

    const ExprPtr unbound = parse_expression("t+s");
    const double t = 0.5;
    ExprBindings<double> only_t;
    only_t.t = &t;
    CHECK_THROWS_AS(eval_expression(*unbound, only_t), EvaluationError);
}

TEST_CASE("variable restrictions per field") {
    const ExprPtr uses_s = parse_expression("2*s");
    CHECK_NOTHROW(check_variables(*uses_s, true, true, "K"));
    CHECK_THROWS_AS(check_variables(*uses_s, true, false, "alpha"), ConfigError);
}

TEST_CASE("printing round-trips structurally") {
    SplitMix64 rng(31337);
    for (int i = 0; i < 200; ++i) {
        const ExprPtr original = random_expr(rng, 4);
        const std::string text = to_string(*original);
        const ExprPtr reparsed = parse_expression(text);
        CHECK(structurally_equal(*original, *reparsed));
    }
}

TEST_CASE("expressions evaluate under the stochastic scalar") {
    SaSession session(17);
    const ExprPtr e = parse_expression("t*sin(t)+1/2");
    const SaReal t(0.7);
    const SaReal v = eval_expression_t(*e, t);
    CHECK(std::fabs(v.mean() - (0.7 * std::sin(0.7) + 0.5)) < 1e-5);
}

TEST_CASE("config parsing") {
    const ProblemConfig ex1 = builtin_problem("example1");
    CHECK(ex1.name == "example1");
    CHECK(ex1.horizon == 1.0);
    REQUIRE(ex1.branches.size() == 3);
    REQUIRE(ex1.curves.size() == 2);
    CHECK(ex1.default_order == 5);
    CHECK(ex1.default_segments == 5);
    REQUIRE(ex1.exact);

    const ProblemConfig ex2 = builtin_problem("example2");
    CHECK(ex2.horizon == 2.0);
    REQUIRE(ex2.branches.size() == 3);

    CHECK_THROWS_AS(builtin_problem("example9"), ConfigError);
    CHECK(is_builtin_problem("example1"));
    CHECK_FALSE(is_builtin_problem("nope"));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("not a header\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("volterra-config v1\n", "<t>"), ConfigError); // no branches
    CHECK_THROWS_AS(parse_config("volterra-config v1\n[branch]\nK = t\nK_dt = 1\n"
                                 "[problem]\nhorizon = 1\n",
                                 "<t>"),
                    ConfigError); // neither exact nor g_dt
    CHECK_THROWS_AS(parse_config("volterra-config v1\n[problem]\nexact = 1\n[branch]\nK = t\n",
                                 "<t>"),
                    ConfigError); // missing K_dt
    CHECK_THROWS_AS(parse_config("volterra-config v1\n[problem]\nexact = 1\nwhat = 3\n"
                                 "[branch]\nK = t\nK_dt = 0\n",
                                 "<t>"),
                    ConfigError); // unknown key
    CHECK_THROWS_AS(parse_config("volterra-config v1\n[weird]\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("volterra-config v1\nname = x\n", "<t>"),
                    ConfigError); // key before section
    CHECK_THROWS_AS(parse_config("volterra-config v1\n[problem]\nexact = (t\n"
                                 "[branch]\nK = 1\nK_dt = 0\n",
                                 "<t>"),
                    ConfigError); // embedded expression error
    CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("curve expressions may not use s") {
    const std::string text = "volterra-config v1\n"
                             "[problem]\nexact = 1\n"
                             "[branch]\nK = 1\nK_dt = 0\n"
                             "[branch]\nK = 2\nK_dt = 0\n"
                             "[curve]\nalpha = s/2\nalpha_dt = 0.5\n";
    CHECK_THROWS_AS(parse_config(text, "<t>"), ConfigError);
}

TEST_CASE("built-in problems reduce consistently through the parser") {
    // ties config ingestion to the math core: the manufactured residual of
    // the parsed problem vanishes
    for (const auto& name : builtin_problem_names()) {
        const auto problem = make_problem<double>(builtin_problem(name));
        validate_problem(problem);
        const auto eq = reduce(problem);
        SplitMix64 rng(name.back());
        for (int i = 0; i < 25; ++i) {
            const double t = problem.kernel.horizon * rng.uniform01();
            double residual = problem.exact(t) - eq.f(t);
            for (std::size_t c = 0; c < eq.delays.size(); ++c)
                residual += eq.delay_coeffs[c](t) * problem.exact(eq.delays[c].value(t));
            if (t > 0.0) {
                auto interval = breakpoints_for_curves(eq.delays, t, 0.0, t);
                residual -= integrate(
                    [&](double s) { return eq.h(t, s) * problem.exact(s); }, interval, 16,
                    std::max(1, static_cast<int>(std::ceil(t / 0.125))));
            }
            CHECK(std::fabs(residual) <= 1e-8);
        }
    }
}
