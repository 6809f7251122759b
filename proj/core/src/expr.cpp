#include "volterra/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace volterra {

namespace {

struct Parser {
    std::string text; // owned so strtod sees a NUL-terminated buffer
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    char peek() {
        skip_space();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& expected) {
        skip_space();
        std::ostringstream msg;
        msg << "syntax error at offset " << pos << ": expected " << expected;
        if (pos < text.size())
            msg << ", got '" << text[pos] << "'";
        else
            msg << ", got end of input";
        throw ParseError(msg.str(), pos);
    }

    ExprPtr make(Expr node) { return std::make_shared<const Expr>(std::move(node)); }

    // expression := term (('+'|'-') term)*
    ExprPtr expression() {
        ExprPtr left = term();
        while (true) {
            const char c = peek();
            if (c != '+' && c != '-')
                return left;
            Expr node;
            node.kind = Expr::Kind::binary;
            node.offset = pos;
            node.op = c;
            ++pos;
            node.lhs = left;
            node.rhs = term();
            left = make(std::move(node));
        }
    }

    // term := factor (('*'|'/') factor)*
    ExprPtr term() {
        ExprPtr left = factor();
        while (true) {
            const char c = peek();
            if (c != '*' && c != '/')
                return left;
            Expr node;
            node.kind = Expr::Kind::binary;
            node.offset = pos;
            node.op = c;
            ++pos;
            node.lhs = left;
            node.rhs = factor();
            left = make(std::move(node));
        }
    }

    // factor := '-' factor | power
    ExprPtr factor() {
        if (peek() == '-') {
            Expr node;
            node.kind = Expr::Kind::negate;
            node.offset = pos;
            ++pos;
            node.lhs = factor();
            // a minus directly on a literal is the literal's sign
            if (node.lhs->kind == Expr::Kind::number) {
                Expr folded = *node.lhs;
                folded.offset = node.offset;
                folded.number = -folded.number;
                return make(std::move(folded));
            }
            return make(std::move(node));
        }
        return power();
    }

    // power := primary ('^' factor)?   (right-associative)
    ExprPtr power() {
        ExprPtr base = primary();
        if (peek() != '^')
            return base;
        Expr node;
        node.kind = Expr::Kind::binary;
        node.offset = pos;
        node.op = '^';
        ++pos;
        node.lhs = base;
        node.rhs = factor();
        return make(std::move(node));
    }

    ExprPtr primary() {
        const char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr inner = expression();
            if (peek() != ')')
                fail("')'");
            ++pos;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return identifier();
        fail("a number, a variable, a function call or '('");
    }

    ExprPtr number() {
        skip_space();
        const char* begin = text.data() + pos;
        char* end = nullptr;
        const double value = std::strtod(begin, &end);
        if (end == begin)
            fail("a number");
        Expr node;
        node.kind = Expr::Kind::number;
        node.offset = pos;
        node.number = value;
        pos += static_cast<std::size_t>(end - begin);
        return make(std::move(node));
    }

    ExprPtr identifier() {
        skip_space();
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string name = text.substr(start, pos - start);

        if (name == "t" || name == "s") {
            Expr node;
            node.kind = Expr::Kind::variable;
            node.offset = start;
            node.variable = name[0];
            return make(std::move(node));
        }

        Expr node;
        node.kind = Expr::Kind::call;
        node.offset = start;
        if (name == "sin")
            node.fn = Expr::Fn::sin;
        else if (name == "cos")
            node.fn = Expr::Fn::cos;
        else if (name == "exp")
            node.fn = Expr::Fn::exp;
        else if (name == "sqrt")
            node.fn = Expr::Fn::sqrt;
        else if (name == "log")
            node.fn = Expr::Fn::log;
        else
            throw ParseError("unknown identifier '" + std::string(name) + "' at offset " +
                                 std::to_string(start),
                             start);
        if (peek() != '(')
            fail("'(' after function name");
        ++pos;
        node.lhs = expression();
        if (peek() != ')')
            fail("')'");
        ++pos;
        return make(std::move(node));
    }
};

int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::binary:
        if (e.op == '+' || e.op == '-')
            return 1;
        if (e.op == '*' || e.op == '/')
            return 2;
        return 4; // ^
    case Expr::Kind::negate:
        return 3;
    default:
        return 5;
    }
}

void render(const Expr& e, std::ostream& os) {
    const auto child = [&](const Expr& c, bool needs_parens) {
        if (needs_parens)
            os << '(';
        render(c, os);
        if (needs_parens)
            os << ')';
    };
    switch (e.kind) {
    case Expr::Kind::number: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", e.number);
        os << buf;
        return;
    }
    case Expr::Kind::variable:
        os << e.variable;
        return;
    case Expr::Kind::negate:
        os << '-';
        child(*e.lhs, precedence(*e.lhs) < precedence(e));
        return;
    case Expr::Kind::binary: {
        const int p = precedence(e);
        // + - * / are left-associative: an equal-precedence right operand
        // needs parentheses to survive a reparse. ^ is right-associative,
        // so its left operand does instead; a negative literal base also
        // needs them since the power otherwise captures the bare minus.
        bool left_parens = precedence(*e.lhs) < p;
        bool right_parens = precedence(*e.rhs) < p;
        if (e.op == '^') {
            if (precedence(*e.lhs) == p)
                left_parens = true;
            if (e.lhs->kind == Expr::Kind::number &&
                std::signbit(e.lhs->number))
                left_parens = true;
        } else if (precedence(*e.rhs) == p) {
            right_parens = true;
        }
        child(*e.lhs, left_parens);
        os << e.op;
        child(*e.rhs, right_parens);
        return;
    }
    case Expr::Kind::call:
        switch (e.fn) {
        case Expr::Fn::sin: os << "sin("; break;
        case Expr::Fn::cos: os << "cos("; break;
        case Expr::Fn::exp: os << "exp("; break;
        case Expr::Fn::sqrt: os << "sqrt("; break;
        case Expr::Fn::log: os << "log("; break;
        }
        render(*e.lhs, os);
        os << ')';
        return;
    }
}

} // namespace

ExprPtr parse_expression(std::string_view text) {
    Parser parser{std::string(text)};
    ExprPtr root = parser.expression();
    parser.skip_space();
    if (parser.pos != text.size())
        parser.fail("end of input or an operator");
    return root;
}

void check_variables(const Expr& expr, bool allow_t, bool allow_s, const std::string& field) {
    switch (expr.kind) {
    case Expr::Kind::variable:
        if ((expr.variable == 't' && !allow_t) || (expr.variable == 's' && !allow_s))
            throw ConfigError("variable '" + std::string(1, expr.variable) +
                              "' is not allowed in field '" + field + "'");
        return;
    case Expr::Kind::negate:
    case Expr::Kind::call:
        check_variables(*expr.lhs, allow_t, allow_s, field);
        return;
    case Expr::Kind::binary:
        check_variables(*expr.lhs, allow_t, allow_s, field);
        check_variables(*expr.rhs, allow_t, allow_s, field);
        return;
    case Expr::Kind::number:
        return;
    }
}

std::string to_string(const Expr& expr) {
    std::ostringstream os;
    render(expr, os);
    return os.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case Expr::Kind::number:
        return a.number == b.number;
    case Expr::Kind::variable:
        return a.variable == b.variable;
    case Expr::Kind::negate:
        return structurally_equal(*a.lhs, *b.lhs);
    case Expr::Kind::binary:
        return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) &&
               structurally_equal(*a.rhs, *b.rhs);
    case Expr::Kind::call:
        return a.fn == b.fn && structurally_equal(*a.lhs, *b.lhs);
    }
    return false;
}

namespace detail {

void throw_eval_fault(const char* what, std::size_t offset, double value) {
    throw EvaluationError(std::string(what) + " in expression at offset " +
                              std::to_string(offset),
                          value);
}

} // namespace detail

} // namespace volterra
