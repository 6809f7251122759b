#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/reduction.hpp"
#include "volterra/spline.hpp"

namespace volterra {

/// Linear system of one collocation step. `unknown_map[c]` is the node index
/// j represented by column c (j starts at 1 on continuity-inherited
/// segments, where the left endpoint is known).
template <typename S>
struct SegmentSystem {
    int segment = 0;
    int size = 0;
    std::vector<S> matrix; // row-major size*size
    std::vector<S> rhs;
    std::vector<int> unknown_map;
};

struct SolveOptions {
    int quad_points = 0;          // 0 -> max(2, r-2)
    int quad_refine = 1;          // extra uniform split of each smooth piece
    bool inherit_continuity = true;
    ReduceOptions reduce;
};

namespace detail {

template <typename S>
double residual_tolerance(double rhs_scale) {
    const double eps = ScalarTraits<S>::noise_epsilon();
    return std::max(1e-10, 256.0 * eps) * (1.0 + rhs_scale);
}

template <typename S>
double max_abs_mean(const std::vector<S>& values) {
    double m = 0.0;
    for (const auto& v : values)
        m = std::max(m, std::fabs(to_double(v)));
    return m;
}

} // namespace detail

/// Jordan-Gauss elimination with partial pivoting. The solution is verified
/// by back-substitution into the original system.
template <typename S>
std::vector<S> gauss_jordan_solve(const SegmentSystem<S>& system) {
    const int n = system.size;
    if (n <= 0 || static_cast<int>(system.matrix.size()) != n * n ||
        static_cast<int>(system.rhs.size()) != n)
        throw ParameterError("segment system has inconsistent dimensions");

    std::vector<S> a = system.matrix;
    std::vector<S> b = system.rhs;
    const double scale = std::max(detail::max_abs_mean(a), 1e-300);

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(to_double(a[col * n + col]));
        for (int row = col + 1; row < n; ++row) {
            const double candidate = std::fabs(to_double(a[row * n + col]));
            if (candidate > best) {
                best = candidate;
                pivot = row;
            }
        }
        if (best < 1e-13 * scale)
            throw SingularSystemError("singular segment system: pivot " + std::to_string(best) +
                                      " below threshold in column " + std::to_string(col));
        if (pivot != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(b[col], b[pivot]);
        }
        const S diag = a[col * n + col];
        for (int j = 0; j < n; ++j)
            a[col * n + j] = a[col * n + j] / diag;
        b[col] = b[col] / diag;
        for (int row = 0; row < n; ++row) {
            if (row == col)
                continue;
            const S factor = a[row * n + col];
            if (to_double(factor) == 0.0)
                continue;
            for (int j = 0; j < n; ++j)
                a[row * n + j] -= factor * a[col * n + j];
            b[row] -= factor * b[col];
        }
    }

    const double rhs_scale = detail::max_abs_mean(system.rhs);
    double residual = 0.0;
    for (int row = 0; row < n; ++row) {
        S acc(0.0);
        for (int j = 0; j < n; ++j)
            acc += system.matrix[row * n + j] * b[j];
        residual = std::max(residual, std::fabs(to_double(acc) - to_double(system.rhs[row])));
    }
    if (residual > detail::residual_tolerance<S>(rhs_scale))
        throw SingularSystemError("segment system too ill-conditioned: residual " +
                                  std::to_string(residual));
    return b;
}

/// Collocation rows for segment k of the reduced equation. Segments
/// 0..k-1 of the spline must already hold solved coefficients; on
/// continuity-inherited segments coefficient (k,0) must be set as well.
template <typename S>
SegmentSystem<S> assemble_segment(const ReducedEquation<S>& eq, const LocalSpline<S>& spline,
                                  int k, int m_quad, bool inherit_continuity = true,
                                  int quad_refine = 1) {
    const int r = spline.order();
    const auto& seg = spline.segment_nodes(k);
    const bool inherited = inherit_continuity && k > 0;
    const int first_unknown = inherited ? 1 : 0;
    const int u = r - first_unknown;

    SegmentSystem<S> system;
    system.segment = k;
    system.size = u;
    system.matrix.assign(static_cast<std::size_t>(u) * u, S(0.0));
    system.rhs.assign(u, S(0.0));
    system.unknown_map.reserve(u);
    for (int j = first_unknown; j < r; ++j)
        system.unknown_map.push_back(j);

    const double t_lo_d = to_double(seg.t_lo);
    std::vector<S> basis(r, S(0.0));
    std::vector<S> row_coeff(r, S(0.0));

    for (int row = 0; row < u; ++row) {
        const int jc = first_unknown + row;
        const S& point = seg.xi[jc];
        const double point_d = to_double(point);

        // x_N(point): cardinal values collapse to a Kronecker delta here but
        // are evaluated uniformly.
        spline.basis_at(k, point, basis);
        for (int j = 0; j < r; ++j)
            row_coeff[j] = basis[j];

        S rhs = eq.f(point);

        // Delay terms b_i(point) * x_N(alpha_i(point)).
        for (std::size_t i = 0; i < eq.delays.size(); ++i) {
            const S a = eq.delays[i].value(point);
            const double ad = to_double(a);
            if (ad > point_d + 1e-9 * std::max(1.0, std::fabs(point_d)))
                throw ModelError("delay point alpha_" + std::to_string(i) + "(" +
                                 std::to_string(point_d) + ") = " + std::to_string(ad) +
                                 " lies ahead of the collocation point");
            const S coeff = eq.delay_coeffs[i](point);
            if (ad >= t_lo_d) {
                // Delay falls inside the current segment: expand in the
                // unknown basis.
                spline.basis_at(k, a, basis);
                for (int j = 0; j < r; ++j)
                    row_coeff[j] += coeff * basis[j];
            } else {
                rhs -= coeff * spline.eval_on_segment(spline.locate(ad), a);
            }
        }

        // Current-segment integral: one column per cardinal polynomial.
        if (point_d > t_lo_d) {
            auto interval = breakpoints_for_curves(eq.delays, point, seg.t_lo, point);
            for (int j = 0; j < r; ++j) {
                const S integral = integrate(
                    [&](const S& s) {
                        spline.basis_at(k, s, basis);
                        return eq.h(point, s) * basis[j];
                    },
                    interval, m_quad, quad_refine);
                row_coeff[j] -= integral;
            }
        }

        // History integrals over the already-solved segments.
        for (int l = 0; l < k; ++l) {
            const auto& prior = spline.segment_nodes(l);
            auto interval = breakpoints_for_curves(eq.delays, point, prior.t_lo, prior.t_hi);
            rhs += integrate(
                [&](const S& s) { return eq.h(point, s) * spline.eval_on_segment(l, s); },
                interval, m_quad, quad_refine);
        }

        // Known left endpoint moves to the right side.
        if (inherited)
            rhs -= row_coeff[0] * spline.coefficient(k, 0);

        for (int c = 0; c < u; ++c)
            system.matrix[static_cast<std::size_t>(row) * u + c] = row_coeff[first_unknown + c];
        system.rhs[row] = rhs;
    }
    return system;
}

template <typename S>
struct CollocationSolution {
    LocalSpline<S> spline;
    double residual_norm = 0.0; // max collocation residual over all segments
    int segments = 0;
    int order = 0;
};

/// Step-by-step collocation solve: assemble and solve segment systems from
/// left to right, inheriting each segment's left endpoint value when the
/// continuity option is on.
template <typename S>
CollocationSolution<S> solve(const ReducedEquation<S>& eq, int segments, int order,
                             const SolveOptions& options = {}) {
    if (segments < 1)
        throw ParameterError("need at least one segment");
    if (order < 3)
        throw ParameterError("spline order r must be at least 3");
    const int m_quad = options.quad_points > 0 ? options.quad_points : std::max(2, order - 2);

    CollocationSolution<S> solution{LocalSpline<S>(eq.horizon, segments, order), 0.0, segments,
                                    order};
    LocalSpline<S>& spline = solution.spline;

    for (int k = 0; k < segments; ++k) {
        try {
            if (options.inherit_continuity && k > 0)
                spline.set_coefficient(k, 0, spline.coefficient(k - 1, order - 1));
            SegmentSystem<S> system = assemble_segment(eq, spline, k, m_quad,
                                                       options.inherit_continuity,
                                                       options.quad_refine);
            std::vector<S> values = gauss_jordan_solve(system);
            for (std::size_t c = 0; c < values.size(); ++c)
                spline.set_coefficient(k, system.unknown_map[c], values[c]);

            double residual = 0.0;
            const int n = system.size;
            for (int row = 0; row < n; ++row) {
                S acc(0.0);
                for (int c = 0; c < n; ++c)
                    acc += system.matrix[row * n + c] * values[c];
                residual = std::max(residual,
                                    std::fabs(to_double(acc) - to_double(system.rhs[row])));
            }
            solution.residual_norm = std::max(solution.residual_norm, residual);
        } catch (const SingularSystemError& e) {
            throw SingularSystemError("segment " + std::to_string(k) + ": " + e.what());
        } catch (const EvaluationError& e) {
            throw EvaluationError("segment " + std::to_string(k) + ": " + e.what(), e.abscissa());
        } catch (const ModelError& e) {
            throw ModelError("segment " + std::to_string(k) + ": " + e.what());
        }
    }
    return solution;
}

/// Sup-norm error against a known solution, sampled on an equispaced grid
/// plus every collocation node.
template <typename S>
double sup_error(const CollocationSolution<S>& solution,
                 const std::function<double(double)>& exact, int samples = 1000) {
    if (samples < 2)
        throw ParameterError("sup_error needs at least two sample points");
    const double horizon = solution.spline.horizon();
    double worst = 0.0;
    auto consider = [&](double t) {
        const double approx = to_double(solution.spline.eval(S(t)));
        worst = std::max(worst, std::fabs(approx - exact(t)));
    };
    for (int i = 0; i < samples; ++i)
        consider(horizon * i / (samples - 1));
    for (int k = 0; k < solution.spline.segment_count(); ++k)
        for (const auto& xi : solution.spline.segment_nodes(k).xi)
            consider(to_double(xi));
    return worst;
}

} // namespace volterra
