#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mvd/errors.hpp"
#include "mvd/field.hpp"
#include "mvd/grid.hpp"
#include "mvd/model.hpp"
#include "mvd/quadrature.hpp"

namespace mvd {

namespace detail {

inline double checked_rate(const RateFunction& f, double x, double s, const char* name) {
    const double v = f(x, s);
    if (!std::isfinite(v))
        throw EvalError(std::string(name) + " is not finite at x = " + std::to_string(x) + ", s = " + std::to_string(s));
    if (v < 0.0)
        throw EvalError(std::string(name) + " is negative at x = " + std::to_string(x) + ", s = " + std::to_string(s));
    return v;
}

inline std::vector<double> sample_interior(const ProfileFunction& f, std::size_t size, double h) {
    std::vector<double> v(size);
    for (std::size_t j = 0; j < size; ++j) {
        v[j] = f(static_cast<double>(j + 1) * h);
        if (!std::isfinite(v[j])) throw EvalError("profile function is not finite at x = " + std::to_string((j + 1) * h));
    }
    return v;
}

inline double qh_of_product(std::span<const double> a, std::span<const double> b, double h,
                            std::vector<double>& scratch) {
    scratch.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) scratch[j] = a[j] * b[j];
    return qh(InteriorView(scratch, h));
}

}  // namespace detail

/// Discrete s_i = Q_h(Psi_i . U).
inline double weighted_population(InteriorView psi_values, InteriorView u) {
    return qh(pointwise_product(psi_values, u));
}

/**
 * Nodal data and scratch space for advancing the scheme on one grid. The
 * boundary solve and the interior update share it so that a run touches
 * no allocator after construction.
 */
class ExplicitScheme {
public:
    ExplicitScheme(const ProblemSpec& problem, double h, std::size_t interior_size)
        : problem_(problem),
          h_(h),
          psi1_(detail::sample_interior(problem.psi1, interior_size, h)),
          psi2_(detail::sample_interior(problem.psi2, interior_size, h)) {}

    double h() const noexcept { return h_; }
    std::span<const double> psi1() const noexcept { return psi1_; }
    std::span<const double> psi2() const noexcept { return psi2_; }

    /// Q_h(B(Q_h(Psi_2 . U)) . U), the discrete birth integral.
    double birth_integral(std::span<const double> u) {
        const double s2 = detail::qh_of_product(psi2_, u, h_, scratch_);
        scratch_.resize(u.size());
        for (std::size_t j = 0; j < u.size(); ++j)
            scratch_[j] = detail::checked_rate(problem_.fertility, x(j), s2, "fertility B") * u[j];
        return qh(InteriorView(scratch_, h_));
    }

    /// Q_h(Psi_1 . U), the argument of the mortality rate.
    double mortality_argument(std::span<const double> u) { return detail::qh_of_product(psi1_, u, h_, scratch_); }

    double mortality(std::size_t j, double s1) const {
        return detail::checked_rate(problem_.mortality, x(j), s1, "mortality d");
    }

    /// U_0 from (1 + 1/h) U_0 - U_1 / h = birth integral, i.e. (h Qb + U_1) / (h + 1).
    double left_boundary(std::span<const double> u) {
        const double qb = birth_integral(u);
        return (h_ * qb + u[0]) / (h_ + 1.0);
    }

    /**
     * One explicit step in convex-combination form
     *   U_i^{n+1} = (1 - lambda - 2r - k d_i) U_i + (r + lambda) U_{i-1} + r U_{i+1},
     * with d_i evaluated at Q_h(Psi_1 . U^n).
     */
    void advance(std::span<const double> u, double left, double right, const GridSpec& grid,
                 std::span<double> out) {
        const double r = grid.r();
        const double lambda = grid.lambda();
        const double k = grid.k();
        const double s1 = mortality_argument(u);
        const std::size_t m = u.size();
        for (std::size_t j = 0; j < m; ++j) {
            const double prev = j == 0 ? left : u[j - 1];
            const double next = j + 1 == m ? right : u[j + 1];
            const double self = 1.0 - lambda - 2.0 * r - k * mortality(j, s1);
            out[j] = self * u[j] + (r + lambda) * prev + r * next;
        }
    }

private:
    double x(std::size_t j) const noexcept { return static_cast<double>(j + 1) * h_; }

    const ProblemSpec& problem_;
    double h_;
    std::vector<double> psi1_;
    std::vector<double> psi2_;
    std::vector<double> scratch_;
};

/// The scheme's starting row U_i^0 = u0(x_i).
inline InteriorVector initial_vector(const ProblemSpec& problem, const GridSpec& grid) {
    return InteriorVector(detail::sample_interior(problem.u0, grid.interior_size(), grid.h()), grid.h());
}

/// Left boundary value satisfying the discrete nonlocal Robin condition for the interior row u.
inline double solve_left_boundary(InteriorView u, double /*t*/, const ProblemSpec& problem) {
    ExplicitScheme scheme(problem, u.h(), u.size());
    return scheme.left_boundary(u.values());
}

inline InteriorVector step(InteriorView u_prev, double left_prev, double right_prev, double t_prev,
                           const ProblemSpec& problem, const GridSpec& grid) {
    if (u_prev.size() != grid.interior_size() || u_prev.h() != grid.h())
        throw DimensionMismatch("state vector does not match the grid");
    detail::check_stability(grid.lambda(), grid.r());
    ExplicitScheme scheme(problem, grid.h(), grid.interior_size());
    std::vector<double> out(u_prev.size());
    scheme.advance(u_prev.values(), left_prev, right_prev, grid, out);
    for (double v : out)
        if (!std::isfinite(v)) throw NonFiniteState(static_cast<std::size_t>(std::llround(t_prev / grid.k())) + 1);
    return InteriorVector(std::move(out), grid.h());
}

namespace detail {

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

/**
 * Runs the explicit scheme from U^0 = u0(x_i) to t_final = N k.
 *
 * At every level n the right trace is g(t^n) (zero when homogeneous) and the
 * left trace is solved from row n before row n + 1 is formed, since the
 * i = 1 stencil needs U_0^n.
 */
inline SolutionHistory run(const ProblemSpec& problem, const GridSpec& grid) {
    if (problem.a_dagger != grid.a_dagger())
        throw InvalidParameter("grid a_dagger " + std::to_string(grid.a_dagger())
                               + " does not match problem a_dagger " + std::to_string(problem.a_dagger));
    detail::check_stability(grid.lambda(), grid.r());

    SolutionHistory hist(grid);
    ExplicitScheme scheme(problem, grid.h(), grid.interior_size());

    const auto initial = detail::sample_interior(problem.u0, grid.interior_size(), grid.h());
    std::copy(initial.begin(), initial.end(), hist.row(0).begin());

    const std::size_t n_steps = grid.n_steps();
    for (std::size_t n = 0; n <= n_steps; ++n) {
        auto row = hist.row(n);
        if (!detail::all_finite(row)) throw NonFiniteState(n);
        hist.right()[n] = problem.boundary_value(grid.t(n));
        hist.left()[n] = scheme.left_boundary(row);
        if (!std::isfinite(hist.left()[n]) || !std::isfinite(hist.right()[n])) throw NonFiniteState(n);
        if (n < n_steps) scheme.advance(row, hist.left()[n], hist.right()[n], grid, hist.row(n + 1));
    }
    return hist;
}

}  // namespace mvd
