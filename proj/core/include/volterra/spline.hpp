#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/scalar.hpp"

namespace volterra {

/// Interpolation nodes of one segment: both endpoints plus the roots of the
/// Legendre polynomial of degree r-2 mapped into the segment.
template <typename S>
struct SegmentNodes {
    int index = 0;
    S t_lo;
    S t_hi;
    std::vector<S> xi; // size r, strictly increasing, endpoints exact
};

/// Uniform partition of [0,T] into N segments with r nodes each. The shared
/// knots are constructed once so that neighbouring segments hold bitwise
/// identical endpoint values.
template <typename S>
std::vector<SegmentNodes<S>> make_nodes(double horizon, int segments, int nodes_per_segment) {
    if (segments < 1)
        throw ParameterError("need at least one segment");
    if (nodes_per_segment < 3)
        throw ParameterError("spline order r must be at least 3 (degree r-2 Legendre rule)");
    if (!(horizon > 0.0))
        throw ParameterError("horizon must be positive");

    const int r = nodes_per_segment;
    const GaussRule& rule = legendre_rule(r - 2);

    std::vector<S> knots;
    knots.reserve(segments + 1);
    for (int k = 0; k <= segments; ++k)
        knots.emplace_back(k * horizon / segments);

    std::vector<SegmentNodes<S>> out;
    out.reserve(segments);
    for (int k = 0; k < segments; ++k) {
        SegmentNodes<S> seg;
        seg.index = k;
        seg.t_lo = knots[k];
        seg.t_hi = knots[k + 1];
        seg.xi.reserve(r);
        seg.xi.push_back(knots[k]);
        const double lo = k * horizon / segments;
        const double hi = (k + 1) * horizon / segments;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int j = 0; j < r - 2; ++j)
            seg.xi.emplace_back(mid + half * rule.nodes[j]);
        seg.xi.push_back(knots[k + 1]);
        out.push_back(std::move(seg));
    }
    return out;
}

/// Lagrange cardinal polynomial L_j over the given nodes, evaluated at t.
/// Evaluation outside [t_lo, t_hi] is rejected.
template <typename S>
S lagrange_basis(const SegmentNodes<S>& nodes, int j, const S& t) {
    const double td = to_double(t);
    const double lo = to_double(nodes.t_lo);
    const double hi = to_double(nodes.t_hi);
    const double slack = 1e-9 * (hi - lo);
    if (td < lo - slack || td > hi + slack)
        throw DomainError("basis evaluation outside segment " + std::to_string(nodes.index) +
                          ": t=" + std::to_string(td));
    const int r = static_cast<int>(nodes.xi.size());
    S numerator(1.0);
    S denominator(1.0);
    for (int m = 0; m < r; ++m) {
        if (m == j)
            continue;
        numerator *= t - nodes.xi[m];
        denominator *= nodes.xi[j] - nodes.xi[m];
    }
    return numerator / denominator;
}

/// Piecewise polynomial x_N: per-segment degree r-1 interpolation in Lagrange
/// form. Segment lookup is half-open [t_k, t_{k+1}) with the last segment
/// closed. Immutable once the solver has written all coefficients.
template <typename S>
class LocalSpline {
public:
    LocalSpline(double horizon, int segments, int nodes_per_segment)
        : horizon_(horizon),
          order_(nodes_per_segment),
          nodes_(make_nodes<S>(horizon, segments, nodes_per_segment)),
          coeffs_(segments, std::vector<S>(nodes_per_segment, S(0.0))) {
        knot_ds_.reserve(segments + 1);
        for (const auto& seg : nodes_)
            knot_ds_.push_back(to_double(seg.t_lo));
        knot_ds_.push_back(to_double(nodes_.back().t_hi));
        denoms_.reserve(segments);
        for (const auto& seg : nodes_) {
            std::vector<S> d(nodes_per_segment, S(1.0));
            for (int j = 0; j < nodes_per_segment; ++j)
                for (int m = 0; m < nodes_per_segment; ++m)
                    if (m != j)
                        d[j] *= seg.xi[j] - seg.xi[m];
            denoms_.push_back(std::move(d));
        }
    }

    double horizon() const { return horizon_; }
    int segment_count() const { return static_cast<int>(nodes_.size()); }
    int order() const { return order_; }

    const SegmentNodes<S>& segment_nodes(int k) const { return nodes_[k]; }
    const std::vector<S>& coefficients(int k) const { return coeffs_[k]; }
    const S& coefficient(int k, int j) const { return coeffs_[k][j]; }
    void set_coefficient(int k, int j, S value) { coeffs_[k][j] = std::move(value); }

    /// Segment owning t under the half-open convention.
    int locate(double t) const {
        auto it = std::upper_bound(knot_ds_.begin(), knot_ds_.end(), t);
        int k = static_cast<int>(it - knot_ds_.begin()) - 1;
        return std::clamp(k, 0, segment_count() - 1);
    }

    /// All cardinal polynomials of segment k at t, using the precomputed
    /// denominators.
    void basis_at(int k, const S& t, std::vector<S>& out) const {
        const auto& xi = nodes_[k].xi;
        const auto& den = denoms_[k];
        const int r = order_;
        out.assign(r, S(0.0));
        for (int j = 0; j < r; ++j) {
            S num(1.0);
            for (int m = 0; m < r; ++m)
                if (m != j)
                    num *= t - xi[m];
            out[j] = num / den[j];
        }
    }

    S eval_on_segment(int k, const S& t) const {
        const auto& xi = nodes_[k].xi;
        const auto& den = denoms_[k];
        const int r = order_;
        S acc(0.0);
        for (int j = 0; j < r; ++j) {
            S num(1.0);
            for (int m = 0; m < r; ++m)
                if (m != j)
                    num *= t - xi[m];
            acc += coeffs_[k][j] * num / den[j];
        }
        return acc;
    }

    S eval(const S& t) const {
        const double td = to_double(t);
        const double slack = 1e-6 * std::max(1.0, horizon_);
        if (td < -slack || td > horizon_ + slack)
            throw DomainError("spline evaluated outside [0,T]: t=" + std::to_string(td));
        return eval_on_segment(locate(td), t);
    }

private:
    double horizon_;
    int order_;
    std::vector<SegmentNodes<S>> nodes_;
    std::vector<std::vector<S>> coeffs_;
    std::vector<std::vector<S>> denoms_;
    std::vector<double> knot_ds_;
};

/// Plain-text coefficient table: one row per coefficient (k, j, xi, value).
template <typename S>
void dump_spline(const LocalSpline<S>& spline, std::ostream& os) {
    os << "k j xi value\n";
    char line[128];
    for (int k = 0; k < spline.segment_count(); ++k) {
        const auto& seg = spline.segment_nodes(k);
        for (int j = 0; j < spline.order(); ++j) {
            std::snprintf(line, sizeof(line), "%d %d %.17g %.17g\n", k, j,
                          to_double(seg.xi[j]), to_double(spline.coefficient(k, j)));
            os << line;
        }
    }
}

} // namespace volterra
