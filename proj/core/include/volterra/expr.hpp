#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <string_view>

#include "volterra/errors.hpp"
#include "volterra/scalar.hpp"

namespace volterra {

/// Arithmetic expression over the variables t and s with the functions
/// sin, cos, exp, sqrt and log. Built by parse_expression.
struct Expr {
    enum class Kind { number, variable, negate, binary, call };
    enum class Fn { sin, cos, exp, sqrt, log };

    Kind kind = Kind::number;
    std::size_t offset = 0; // byte position in the source text
    double number = 0.0;
    char variable = 't'; // 't' or 's'
    char op = '+';       // + - * / ^
    Fn fn = Fn::sin;
    std::shared_ptr<const Expr> lhs; // binary left / negate child / call argument
    std::shared_ptr<const Expr> rhs; // binary right
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Recursive-descent parse with the usual precedence: ^ (right-assoc) binds
/// tighter than unary minus, then * /, then + -. Errors carry the byte
/// offset and what was expected.
ExprPtr parse_expression(std::string_view text);

/// Rejects variables outside the allowed set (e.g. `s` in a curve
/// expression). `field` names the config field for the error message.
void check_variables(const Expr& expr, bool allow_t, bool allow_s, const std::string& field);

/// Minimal-parentheses rendering; parse_expression(to_string(e)) is
/// structurally identical to e.
std::string to_string(const Expr& expr);

bool structurally_equal(const Expr& a, const Expr& b);

namespace detail {
[[noreturn]] void throw_eval_fault(const char* what, std::size_t offset, double value);
} // namespace detail

template <typename S>
struct ExprBindings {
    const S* t = nullptr;
    const S* s = nullptr;
};

/// Numeric evaluation; works for the plain and the stochastic scalar alike.
/// Domain faults (division by zero, log/sqrt outside their domain) and
/// unbound variables are reported with the node's source offset.
template <typename S>
S eval_expression(const Expr& expr, const ExprBindings<S>& bindings) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    switch (expr.kind) {
    case Expr::Kind::number:
        return S(expr.number);
    case Expr::Kind::variable: {
        const S* bound = expr.variable == 't' ? bindings.t : bindings.s;
        if (!bound)
            throw EvaluationError("unbound variable '" + std::string(1, expr.variable) +
                                      "' at offset " + std::to_string(expr.offset),
                                  0.0);
        return *bound;
    }
    case Expr::Kind::negate:
        return -eval_expression(*expr.lhs, bindings);
    case Expr::Kind::binary: {
        const S a = eval_expression(*expr.lhs, bindings);
        const S b = eval_expression(*expr.rhs, bindings);
        switch (expr.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
            if (to_double(b) == 0.0)
                detail::throw_eval_fault("division by zero", expr.offset, to_double(a));
            return a / b;
        case '^': return pow(a, b);
        }
        throw Error("corrupt expression node");
    }
    case Expr::Kind::call: {
        const S a = eval_expression(*expr.lhs, bindings);
        switch (expr.fn) {
        case Expr::Fn::sin: return sin(a);
        case Expr::Fn::cos: return cos(a);
        case Expr::Fn::exp: return exp(a);
        case Expr::Fn::sqrt:
            if (to_double(a) < 0.0)
                detail::throw_eval_fault("sqrt of a negative value", expr.offset, to_double(a));
            return sqrt(a);
        case Expr::Fn::log:
            if (to_double(a) <= 0.0)
                detail::throw_eval_fault("log of a non-positive value", expr.offset, to_double(a));
            return log(a);
        }
        throw Error("corrupt expression node");
    }
    }
    throw Error("corrupt expression node");
}

template <typename S>
S eval_expression_t(const Expr& expr, const S& t) {
    ExprBindings<S> b;
    b.t = &t;
    return eval_expression(expr, b);
}

template <typename S>
S eval_expression_ts(const Expr& expr, const S& t, const S& s) {
    ExprBindings<S> b;
    b.t = &t;
    b.s = &s;
    return eval_expression(expr, b);
}

} // namespace volterra
