#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "volterra/errors.hpp"
#include "volterra/scalar.hpp"

namespace volterra {

/// Counter-style seedable generator (splitmix64): the state advances by a
/// fixed increment and the output is a finalizing hash of it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform draw on [0,1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_ = 0;
};

/// Per-thread random-rounding state. Arithmetic on Stochastic values is
/// plain double arithmetic until a context is engaged; engaging seeds the
/// bit stream and fixes the perturbation granularity.
///
/// `mantissa_bits` is the virtual mantissa width alpha of the rounding model
/// G* = g* - rho 2^(E-alpha) phi: results are perturbed by one unit in the
/// alpha-th mantissa place. alpha = 53 perturbs to the actual neighboring
/// doubles. The default of 25 is calibrated so the adaptive driver stops at
/// the mesh sizes reported for the single-precision CESTAC experiments.
class RoundingContext {
public:
    static constexpr int default_mantissa_bits = 25;

    static RoundingContext& current();

    void engage(std::uint64_t seed, int mantissa_bits = default_mantissa_bits);
    void disengage();

    bool engaged() const { return engaged_; }
    std::uint64_t seed() const { return seed_; }
    int mantissa_bits() const { return mantissa_bits_; }

    /// Two independent fair bits: (perturb?, direction).
    unsigned draw_pair() {
        if (available_ < 2) {
            buffer_ = rng_.next();
            available_ = 64;
        }
        unsigned r = static_cast<unsigned>(buffer_ & 3u);
        buffer_ >>= 2;
        available_ -= 2;
        return r;
    }

    void note_unstable_division() { ++unstable_divisions_; }
    long unstable_divisions() const { return unstable_divisions_; }
    void reset_instabilities() { unstable_divisions_ = 0; }

private:
    bool engaged_ = false;
    std::uint64_t seed_ = 0;
    int mantissa_bits_ = default_mantissa_bits;
    SplitMix64 rng_;
    std::uint64_t buffer_ = 0;
    int available_ = 0;
    long unstable_divisions_ = 0;
};

/// Scoped activation of random rounding on the current thread.
class SaSession {
public:
    explicit SaSession(std::uint64_t seed,
                       int mantissa_bits = RoundingContext::default_mantissa_bits) {
        RoundingContext::current().engage(seed, mantissa_bits);
    }
    ~SaSession() { RoundingContext::current().disengage(); }

    SaSession(const SaSession&) = delete;
    SaSession& operator=(const SaSession&) = delete;
};

/// One random-rounding step: returns the value unchanged with probability
/// 1/2, otherwise moves it one unit in the alpha-th mantissa place in a fair
/// random direction. Zero stays zero (a zero mantissa has no missing
/// segment) and non-finite values propagate unchanged.
inline double random_round(double exact_result, RoundingContext& ctx) {
    if (!ctx.engaged() || exact_result == 0.0 || !std::isfinite(exact_result))
        return exact_result;
    const unsigned bits = ctx.draw_pair();
    if ((bits & 1u) == 0)
        return exact_result;
    const bool up = (bits & 2u) != 0;
    if (ctx.mantissa_bits() >= std::numeric_limits<double>::digits) {
        return std::nextafter(exact_result,
                              up ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity());
    }
    int exponent = 0;
    std::frexp(exact_result, &exponent);
    const double step = std::ldexp(1.0, exponent - ctx.mantissa_bits());
    return up ? exact_result + step : exact_result - step;
}

inline double random_round(double exact_result) {
    return random_round(exact_result, RoundingContext::current());
}

/// Scalar carrying p samples of the same computation under independent
/// random rounding. With no engaged RoundingContext all samples follow plain
/// double arithmetic bit for bit.
///
/// Comparisons act on sample means so that control flow is identical across
/// samples; this keeps all p samples on one execution path.
template <int P = 3>
class Stochastic {
    static_assert(P >= 2, "stochastic arithmetic needs at least two samples");

public:
    using Samples = std::array<double, P>;

    Stochastic() : samples_{} {}

    /// Machine representation of a real value: each sample independently
    /// carries the rounding perturbation of the representation model.
    Stochastic(double value) {
        auto& ctx = RoundingContext::current();
        for (double& s : samples_)
            s = random_round(value, ctx);
    }

    static Stochastic from_samples(const Samples& samples) {
        Stochastic r;
        r.samples_ = samples;
        return r;
    }

    const Samples& samples() const { return samples_; }
    static constexpr int sample_count() { return P; }

    double mean() const {
        double acc = 0.0;
        for (double s : samples_)
            acc += s;
        return acc / P;
    }

    /// Unbiased sample standard deviation (p-1 denominator).
    double sigma() const {
        const double m = mean();
        double acc = 0.0;
        for (double s : samples_)
            acc += (s - m) * (s - m);
        return std::sqrt(acc / (P - 1));
    }

    bool finite() const {
        for (double s : samples_)
            if (!std::isfinite(s))
                return false;
        return true;
    }

    Stochastic operator-() const {
        Stochastic r;
        for (int i = 0; i < P; ++i)
            r.samples_[i] = -samples_[i]; // sign flip is exact, no rounding
        return r;
    }

    friend Stochastic operator+(const Stochastic& a, const Stochastic& b) {
        auto& ctx = RoundingContext::current();
        Stochastic r;
        for (int i = 0; i < P; ++i)
            r.samples_[i] = random_round(a.samples_[i] + b.samples_[i], ctx);
        return r;
    }

    friend Stochastic operator-(const Stochastic& a, const Stochastic& b) {
        auto& ctx = RoundingContext::current();
        Stochastic r;
        for (int i = 0; i < P; ++i)
            r.samples_[i] = random_round(a.samples_[i] - b.samples_[i], ctx);
        return r;
    }

    friend Stochastic operator*(const Stochastic& a, const Stochastic& b) {
        auto& ctx = RoundingContext::current();
        Stochastic r;
        for (int i = 0; i < P; ++i)
            r.samples_[i] = random_round(a.samples_[i] * b.samples_[i], ctx);
        return r;
    }

    friend Stochastic operator/(const Stochastic& a, const Stochastic& b) {
        auto& ctx = RoundingContext::current();
        if (ctx.engaged() && b.unreliable_divisor())
            ctx.note_unstable_division();
        Stochastic r;
        for (int i = 0; i < P; ++i)
            r.samples_[i] = random_round(a.samples_[i] / b.samples_[i], ctx);
        return r;
    }

    Stochastic& operator+=(const Stochastic& o) { return *this = *this + o; }
    Stochastic& operator-=(const Stochastic& o) { return *this = *this - o; }
    Stochastic& operator*=(const Stochastic& o) { return *this = *this * o; }
    Stochastic& operator/=(const Stochastic& o) { return *this = *this / o; }

    friend bool operator<(const Stochastic& a, const Stochastic& b) { return a.mean() < b.mean(); }
    friend bool operator>(const Stochastic& a, const Stochastic& b) { return a.mean() > b.mean(); }
    friend bool operator<=(const Stochastic& a, const Stochastic& b) { return a.mean() <= b.mean(); }
    friend bool operator>=(const Stochastic& a, const Stochastic& b) { return a.mean() >= b.mean(); }
    friend bool operator==(const Stochastic& a, const Stochastic& b) { return a.mean() == b.mean(); }
    friend bool operator!=(const Stochastic& a, const Stochastic& b) { return a.mean() != b.mean(); }

private:
    bool unreliable_divisor() const;

    Samples samples_;
};

namespace detail {

template <int P>
Stochastic<P> sample_map(const Stochastic<P>& x, double (*fn)(double)) {
    auto& ctx = RoundingContext::current();
    typename Stochastic<P>::Samples out;
    for (int i = 0; i < P; ++i)
        out[i] = random_round(fn(x.samples()[i]), ctx);
    return Stochastic<P>::from_samples(out);
}

/// Two-tailed Student-t quantile at confidence 1-delta with `dof` degrees of
/// freedom (tau_delta of the CESTAC test).
double student_t_tau(int dof, double delta);

} // namespace detail

template <int P>
Stochastic<P> abs(const Stochastic<P>& x) {
    typename Stochastic<P>::Samples out;
    for (int i = 0; i < P; ++i)
        out[i] = std::fabs(x.samples()[i]); // exact
    return Stochastic<P>::from_samples(out);
}

template <int P> Stochastic<P> sin(const Stochastic<P>& x) { return detail::sample_map(x, static_cast<double (*)(double)>(std::sin)); }
template <int P> Stochastic<P> cos(const Stochastic<P>& x) { return detail::sample_map(x, static_cast<double (*)(double)>(std::cos)); }
template <int P> Stochastic<P> exp(const Stochastic<P>& x) { return detail::sample_map(x, static_cast<double (*)(double)>(std::exp)); }
template <int P> Stochastic<P> log(const Stochastic<P>& x) { return detail::sample_map(x, static_cast<double (*)(double)>(std::log)); }
template <int P> Stochastic<P> sqrt(const Stochastic<P>& x) { return detail::sample_map(x, static_cast<double (*)(double)>(std::sqrt)); }

template <int P>
Stochastic<P> pow(const Stochastic<P>& a, const Stochastic<P>& b) {
    auto& ctx = RoundingContext::current();
    typename Stochastic<P>::Samples out;
    for (int i = 0; i < P; ++i)
        out[i] = random_round(std::pow(a.samples()[i], b.samples()[i]), ctx);
    return Stochastic<P>::from_samples(out);
}

/// Number of common significant digits of two reals (Definition 1 of the
/// CESTAC literature): +inf when equal, otherwise log10 |(l1+l2)/(2(l1-l2))|.
/// The degenerate case l1 = -l2 != 0 reports 0 common digits.
inline double ncsd_pair(double l1, double l2) {
    if (l1 == l2)
        return std::numeric_limits<double>::infinity();
    if (l1 + l2 == 0.0)
        return 0.0;
    return std::log10(std::fabs((l1 + l2) / (2.0 * (l1 - l2))));
}

/// Result of estimating the reliable digits of a stochastic value.
struct NcsdReport {
    double value = 0.0;           // digits; may be +/-inf
    bool informatical_zero = false;
};

/// CESTAC digit estimate: log10( sqrt(p) |mean| / (tau_delta sigma) ) with
/// tau_delta the two-tailed Student-t quantile at p-1 degrees of freedom.
/// The value is the informatical zero @.0 when the mean vanishes or no digit
/// is significant.
template <int P>
NcsdReport ncsd_estimate(const Stochastic<P>& x, double delta = 0.05) {
    NcsdReport report;
    const double m = x.mean();
    const double s = x.sigma();
    if (m == 0.0) {
        report.value = -std::numeric_limits<double>::infinity();
        report.informatical_zero = true;
        return report;
    }
    if (s == 0.0) {
        report.value = std::numeric_limits<double>::infinity();
        report.informatical_zero = false;
        return report;
    }
    const double tau = detail::student_t_tau(P - 1, delta);
    report.value = std::log10(std::sqrt(double(P)) * std::fabs(m) / (tau * s));
    report.informatical_zero = report.value <= 0.0;
    return report;
}

/// True iff a - b is indistinguishable from rounding noise (the @.0 stopping
/// signal of the adaptive driver).
template <int P>
bool sa_difference_zero(const Stochastic<P>& a, const Stochastic<P>& b, double delta = 0.05) {
    return ncsd_estimate(a - b, delta).informatical_zero;
}

template <int P>
bool Stochastic<P>::unreliable_divisor() const {
    return ncsd_estimate(*this).informatical_zero;
}

template <int P>
struct ScalarTraits<Stochastic<P>> {
    static constexpr bool is_stochastic = true;

    static double to_double(const Stochastic<P>& v) { return v.mean(); }
    static Stochastic<P> from_double(double v) { return Stochastic<P>(v); }

    static double noise_epsilon() {
        const auto& ctx = RoundingContext::current();
        const int alpha = ctx.engaged() ? ctx.mantissa_bits()
                                        : RoundingContext::default_mantissa_bits;
        return std::ldexp(1.0, 1 - alpha);
    }
};

/// Default stochastic scalar: three samples, the established CESTAC choice.
using SaReal = Stochastic<3>;

} // namespace volterra
