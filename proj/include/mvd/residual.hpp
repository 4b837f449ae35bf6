#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mvd/errors.hpp"
#include "mvd/field.hpp"
#include "mvd/grid.hpp"
#include "mvd/model.hpp"
#include "mvd/quadrature.hpp"
#include "mvd/solver.hpp"

namespace mvd {

/// Nodal restriction u_h: samples u at every (x_i, t^n) of the grid, boundaries included.
inline XhElement restrict_to_grid(const FieldFunction& u, const GridSpec& grid) {
    XhElement out(grid);
    const std::size_t width = grid.interior_size();
    for (std::size_t n = 0; n < out.levels(); ++n) {
        const double t = grid.t(n);
        out.left()[n] = u(0.0, t);
        out.right()[n] = u(grid.a_dagger(), t);
        auto row = out.row(n);
        for (std::size_t j = 0; j < width; ++j) row[j] = u(grid.x(j + 1), t);
    }
    for (std::size_t n = 0; n < out.levels(); ++n) {
        if (!std::isfinite(out.left()[n]) || !std::isfinite(out.right()[n]) || !detail::all_finite(out.row(n)))
            throw EvalError("restricted function is not finite at time level " + std::to_string(n));
    }
    return out;
}

/**
 * The discretization operator: its root is exactly the scheme's solution.
 *
 *   P_0^n = (1 + 1/h) V_0^n - V_1^n / h - Q_h(B(Q_h(Psi_2 . V^n)) . V^n)
 *   P_M^n = (V_M^n - g^n) / h                    (g = 0 when homogeneous)
 *   P_i^0 = V_i^0 - U_i^0
 *   P_i^n = (V_i^n - V_i^{n-1}) / k + (V_i^{n-1} - V_{i-1}^{n-1}) / h
 *           + d_i(Q_h(Psi_1 . V^{n-1})) V_i^{n-1}
 *           - (V_{i+1}^{n-1} + V_{i-1}^{n-1} - 2 V_i^{n-1}) / h^2
 *
 * The difference quotients are evaluated as written, not in the solver's
 * rearranged form.
 */
inline ResidualBundle apply_phi(const XhElement& v, const ProblemSpec& problem, InteriorView initial) {
    const GridSpec& grid = v.grid();
    const std::size_t width = grid.interior_size();
    if (initial.size() != width || initial.h() != grid.h())
        throw DimensionMismatch("initial vector does not match the grid");
    if (problem.a_dagger != grid.a_dagger()) throw DimensionMismatch("problem and grid disagree on a_dagger");

    const double h = grid.h();
    const double k = grid.k();
    ExplicitScheme scheme(problem, h, width);
    ResidualBundle p(grid);

    for (std::size_t n = 0; n < v.levels(); ++n) {
        const auto row = v.row(n);
        p.left()[n] = (1.0 + 1.0 / h) * v.left()[n] - 1.0 / h * row[0] - scheme.birth_integral(row);
        p.right()[n] = (v.right()[n] - problem.boundary_value(grid.t(n))) / h;
    }

    {
        auto p0 = p.row(0);
        const auto v0 = v.row(0);
        for (std::size_t j = 0; j < width; ++j) p0[j] = v0[j] - initial[j];
    }

    for (std::size_t n = 1; n < v.levels(); ++n) {
        const auto cur = v.row(n);
        const auto prev = v.row(n - 1);
        const double s1 = scheme.mortality_argument(prev);
        auto out = p.row(n);
        for (std::size_t j = 0; j < width; ++j) {
            const double left = j == 0 ? v.left()[n - 1] : prev[j - 1];
            const double right = j + 1 == width ? v.right()[n - 1] : prev[j + 1];
            out[j] = (cur[j] - prev[j]) / k + (prev[j] - left) / h + scheme.mortality(j, s1) * prev[j]
                     - (right + left - 2.0 * prev[j]) / (h * h);
        }
    }
    return p;
}

/// h (||V_0||_* + ||V_M||_*) + max_n ||V^n||.
inline double xh_norm(const XhElement& v) {
    const GridSpec& grid = v.grid();
    double row_max = 0.0;
    for (std::size_t n = 0; n < v.levels(); ++n) row_max = std::max(row_max, l2_norm(v.row(n), grid.h()));
    return grid.h() * (star_norm(v.left(), grid.k()) + star_norm(v.right(), grid.k())) + row_max;
}

/// (||P_0||_*^2 + ||P^0||^2 + h ||P_M||_*^2 + sum_{n>=1} k ||P^n||^2)^(1/2).
inline double yh_norm(const ResidualBundle& p) {
    const GridSpec& grid = p.grid();
    const double h = grid.h();
    const double k = grid.k();
    const double left = star_norm(p.left(), k);
    const double right = star_norm(p.right(), k);
    const double first = l2_norm(p.row(0), h);
    double acc = left * left + first * first + h * right * right;
    for (std::size_t n = 1; n < p.levels(); ++n) {
        const double rn = l2_norm(p.row(n), h);
        acc += k * rn * rn;
    }
    return std::sqrt(acc);
}

}  // namespace mvd
