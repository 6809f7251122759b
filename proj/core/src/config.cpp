#include "volterra/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace volterra {

namespace {

constexpr std::string_view kHeader = "volterra-config v1";

constexpr std::string_view kExample1 = R"(volterra-config v1
# First test equation: three kernel branches split at t/2 and 2t/3,
# manufactured so that x*(t) = t sin t on [0,1].
[problem]
name = example1
horizon = 1
exact = t*sin(t)
r = 5
N = 5

[branch]
K = t + s
K_dt = 1

[branch]
K = t*s
K_dt = s

[branch]
K = exp(s)
K_dt = 0

[curve]
alpha = t/2
alpha_dt = 1/2

[curve]
alpha = 2*t/3
alpha_dt = 2/3
)";

constexpr std::string_view kExample2 = R"(volterra-config v1
# Second test equation: branches split at t/3 and 3t/4,
# manufactured so that x*(t) = exp(2-t) t^2 on [0,2].
[problem]
name = example2
horizon = 2
exact = exp(2-t)*t^2
r = 5
N = 5

[branch]
K = (t-s)^2
K_dt = 2*(t-s)

[branch]
K = cos(s)
K_dt = 0

[branch]
K = 1 + sin(2*s)
K_dt = 0

[curve]
alpha = t/3
alpha_dt = 1/3

[curve]
alpha = 3*t/4
alpha_dt = 3/4
)";

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& message) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + message);
}

ExprPtr parse_field(const std::string& source, int line, const std::string& key,
                    const std::string& value, bool allow_t, bool allow_s) {
    ExprPtr expr;
    try {
        expr = parse_expression(value);
    } catch (const ParseError& e) {
        fail(source, line, "in '" + key + "': " + e.what());
    }
    check_variables(*expr, allow_t, allow_s, key);
    return expr;
}

double parse_number_field(const std::string& source, int line, const std::string& key,
                          const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        fail(source, line, "'" + key + "' must be a plain number, got '" + value + "'");
    return v;
}

} // namespace

ProblemConfig parse_config(std::string_view text, const std::string& source_name) {
    std::istringstream in{std::string(text)};
    return parse_config(in, source_name);
}

ProblemConfig parse_config(std::istream& in, const std::string& source_name) {
    ProblemConfig config;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line))
        throw ConfigError(source_name + ": empty config");
    ++line_no;
    if (trim(line) != kHeader)
        fail(source_name, line_no,
             "first line must be the version header '" + std::string(kHeader) + "'");

    enum class Section { none, problem, branch, curve };
    Section section = Section::none;
    bool have_problem_section = false;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;

        if (stripped.front() == '[') {
            if (stripped == "[problem]") {
                if (have_problem_section)
                    fail(source_name, line_no, "duplicate [problem] section");
                have_problem_section = true;
                section = Section::problem;
            } else if (stripped == "[branch]") {
                section = Section::branch;
                config.branches.emplace_back();
            } else if (stripped == "[curve]") {
                section = Section::curve;
                config.curves.emplace_back();
            } else {
                fail(source_name, line_no, "unknown section '" + stripped + "'");
            }
            continue;
        }

        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(source_name, line_no, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (value.empty())
            fail(source_name, line_no, "'" + key + "' has no value");

        switch (section) {
        case Section::none:
            fail(source_name, line_no, "'" + key + "' appears before any section");
        case Section::problem:
            if (key == "name") {
                config.name = value;
            } else if (key == "horizon") {
                config.horizon = parse_number_field(source_name, line_no, key, value);
            } else if (key == "exact") {
                config.exact = parse_field(source_name, line_no, key, value, true, false);
            } else if (key == "g_dt") {
                config.g_dt = parse_field(source_name, line_no, key, value, true, false);
            } else if (key == "r") {
                config.default_order =
                    static_cast<int>(parse_number_field(source_name, line_no, key, value));
            } else if (key == "N") {
                config.default_segments =
                    static_cast<int>(parse_number_field(source_name, line_no, key, value));
            } else {
                fail(source_name, line_no, "unknown [problem] key '" + key + "'");
            }
            break;
        case Section::branch: {
            auto& branch = config.branches.back();
            if (key == "K")
                branch.kernel = parse_field(source_name, line_no, key, value, true, true);
            else if (key == "K_dt")
                branch.kernel_dt = parse_field(source_name, line_no, key, value, true, true);
            else
                fail(source_name, line_no, "unknown [branch] key '" + key + "'");
            break;
        }
        case Section::curve: {
            auto& curve = config.curves.back();
            if (key == "alpha")
                curve.alpha = parse_field(source_name, line_no, key, value, true, false);
            else if (key == "alpha_dt")
                curve.alpha_dt = parse_field(source_name, line_no, key, value, true, false);
            else
                fail(source_name, line_no, "unknown [curve] key '" + key + "'");
            break;
        }
        }
    }

    if (config.branches.empty())
        throw ConfigError(source_name + ": config needs at least one [branch]");
    if (config.curves.size() + 1 != config.branches.size())
        throw ConfigError(source_name + ": expected " +
                          std::to_string(config.branches.size() - 1) + " [curve] sections, got " +
                          std::to_string(config.curves.size()));
    for (std::size_t i = 0; i < config.branches.size(); ++i)
        if (!config.branches[i].kernel || !config.branches[i].kernel_dt)
            throw ConfigError(source_name + ": branch " + std::to_string(i + 1) +
                              " needs both K and K_dt");
    for (std::size_t i = 0; i < config.curves.size(); ++i)
        if (!config.curves[i].alpha || !config.curves[i].alpha_dt)
            throw ConfigError(source_name + ": curve " + std::to_string(i + 1) +
                              " needs both alpha and alpha_dt");
    if (!config.exact && !config.g_dt)
        throw ConfigError(source_name + ": config needs 'exact' or 'g_dt'");
    if (!(config.horizon > 0.0))
        throw ConfigError(source_name + ": horizon must be positive");
    if (config.default_order < 3)
        throw ConfigError(source_name + ": r must be at least 3");
    if (config.default_segments < 1)
        throw ConfigError(source_name + ": N must be at least 1");
    return config;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

const std::vector<std::string>& builtin_problem_names() {
    static const std::vector<std::string> names = {"example1", "example2"};
    return names;
}

bool is_builtin_problem(std::string_view name) {
    const auto& names = builtin_problem_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::string_view builtin_problem_text(std::string_view name) {
    if (name == "example1")
        return kExample1;
    if (name == "example2")
        return kExample2;
    throw ConfigError("unknown built-in problem '" + std::string(name) +
                      "'; available: example1, example2");
}

ProblemConfig builtin_problem(std::string_view name) {
    return parse_config(builtin_problem_text(name), "<builtin:" + std::string(name) + ">");
}

} // namespace volterra
