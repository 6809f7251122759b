#include "volterra/stochastic.hpp"

#include <map>
#include <mutex>

#include <boost/math/distributions/students_t.hpp>

namespace volterra {

RoundingContext& RoundingContext::current() {
    thread_local RoundingContext ctx;
    return ctx;
}

void RoundingContext::engage(std::uint64_t seed, int mantissa_bits) {
    if (mantissa_bits < 2 || mantissa_bits > std::numeric_limits<double>::digits)
        throw ParameterError("rounding granularity must be between 2 and 53 mantissa bits");
    engaged_ = true;
    seed_ = seed;
    mantissa_bits_ = mantissa_bits;
    rng_ = SplitMix64(seed);
    buffer_ = 0;
    available_ = 0;
    unstable_divisions_ = 0;
}

void RoundingContext::disengage() {
    engaged_ = false;
}

namespace detail {

double student_t_tau(int dof, double delta) {
    if (dof < 1)
        throw ParameterError("Student-t quantile needs at least one degree of freedom");
    if (!(delta > 0.0 && delta < 1.0))
        throw ParameterError("confidence parameter delta must lie in (0,1)");

    static std::mutex mutex;
    static std::map<std::pair<int, double>, double> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(dof, delta);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;

    boost::math::students_t_distribution<double> dist(dof);
    const double tau = boost::math::quantile(dist, 1.0 - delta / 2.0);
    cache.emplace(key, tau);
    return tau;
}

} // namespace detail

} // namespace volterra
