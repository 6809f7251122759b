#include "volterra/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace volterra {

namespace {

constexpr int kMaxRule = 64;

// P_m(x) and P_m'(x) from the three-term recurrence.
std::pair<double, double> legendre_value(int m, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 1; k < m; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    const double dp = m * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

GaussRule build_rule(int m) {
    GaussRule rule;
    rule.degree = m;
    rule.nodes.assign(m, 0.0);
    rule.weights.assign(m, 0.0);

    if (m == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }

    const double pi = 3.14159265358979323846;
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev initial guess for the i-th largest root, refined by Newton.
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double delta = 1.0;
        for (int iter = 0; iter < 100 && std::fabs(delta) > 1e-15; ++iter) {
            const auto [p, dp] = legendre_value(m, x);
            delta = p / dp;
            x -= delta;
        }
        if (2 * i + 1 == m)
            x = 0.0; // middle root of an odd rule is exact
        const auto [p, dp] = legendre_value(m, x);
        (void)p;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[m - 1 - i] = x;
        rule.nodes[i] = -x; // mirrored, so symmetry is exact
        rule.weights[m - 1 - i] = w;
        rule.weights[i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& legendre_rule(int m) {
    if (m < 1 || m > kMaxRule)
        throw ParameterError("Gauss rule size must lie in [1," + std::to_string(kMaxRule) +
                             "], got " + std::to_string(m));

    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const GaussRule>> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(m);
    if (it == cache.end())
        it = cache.emplace(m, std::make_unique<const GaussRule>(build_rule(m))).first;
    return *it->second;
}

} // namespace volterra
