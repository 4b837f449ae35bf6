#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "mvd/errors.hpp"

namespace mvd {

/**
 * Uniform space-time mesh on [0, a_dagger] x [0, t_final].
 *
 * The spatial interval is split into M = 2(M' + 3) cells of width h, the
 * time step is k = r h^2 = lambda h, and the explicit update is admissible
 * only when lambda + 2r <= 1. Instances are immutable and can only be
 * obtained from build_grid() or refine(), which enforce these relations.
 */
class GridSpec {
public:
    double a_dagger() const noexcept { return a_dagger_; }
    std::size_t m_prime() const noexcept { return m_prime_; }
    /// Number of spatial intervals M = 2(M' + 3).
    std::size_t m_total() const noexcept { return 2 * (m_prime_ + 3); }
    /// Number of interior nodes M - 1.
    std::size_t interior_size() const noexcept { return m_total() - 1; }
    double h() const noexcept { return h_; }
    double r() const noexcept { return r_; }
    double k() const noexcept { return k_; }
    double lambda() const noexcept { return lambda_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    /// Requested end time; the realized one is t_final() = N k.
    double t_target() const noexcept { return t_target_; }
    double t_final() const noexcept { return static_cast<double>(n_steps_) * k_; }

    double x(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }
    double t(std::size_t n) const noexcept { return static_cast<double>(n) * k_; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    GridSpec() = default;

    friend GridSpec build_grid(double, std::size_t, double, double);
    friend GridSpec refine(const GridSpec&);

    double a_dagger_ = 0.0;
    std::size_t m_prime_ = 0;
    double h_ = 0.0;
    double r_ = 0.0;
    double k_ = 0.0;
    double lambda_ = 0.0;
    std::size_t n_steps_ = 0;
    double t_target_ = 0.0;
};

namespace detail {

inline void check_stability(double lambda, double r) {
    if (lambda + 2.0 * r > 1.0) throw StabilityViolation(lambda, r);
}

// ceil(t/k), except that quotients within a relative 1e-9 of an integer are
// snapped to it, so 0.2 / 0.001 gives 200 steps and not 201.
inline std::size_t step_count(double t_target, double k) {
    const double q = t_target / k;
    const double nearest = std::round(q);
    if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(q));
}

}  // namespace detail

inline GridSpec build_grid(double a_dagger, std::size_t m_prime, double r, double t_target) {
    if (!(a_dagger > 0.0) || !std::isfinite(a_dagger))
        throw InvalidParameter("a_dagger must be positive and finite");
    if (m_prime < 1) throw InvalidParameter("m_prime must be at least 1");
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("r must be positive and finite");
    if (!(t_target > 0.0) || !std::isfinite(t_target))
        throw InvalidParameter("t_target must be positive and finite");

    GridSpec g;
    g.a_dagger_ = a_dagger;
    g.m_prime_ = m_prime;
    g.h_ = a_dagger / static_cast<double>(g.m_total());
    g.r_ = r;
    g.k_ = r * g.h_ * g.h_;
    g.lambda_ = r * g.h_;
    detail::check_stability(g.lambda_, g.r_);
    g.t_target_ = t_target;
    g.n_steps_ = std::max<std::size_t>(1, detail::step_count(t_target, g.k_));
    return g;
}

/**
 * Halves h by mapping M' to 2M' + 3. The time step quarters and the step
 * count is multiplied by four, so every coarse node (i, n) coincides with
 * the fine node (2i, 4n) and both grids end at the same physical time.
 */
inline GridSpec refine(const GridSpec& coarse) {
    GridSpec g;
    g.a_dagger_ = coarse.a_dagger_;
    g.m_prime_ = 2 * coarse.m_prime_ + 3;
    g.h_ = g.a_dagger_ / static_cast<double>(g.m_total());
    g.r_ = coarse.r_;
    g.k_ = g.r_ * g.h_ * g.h_;
    g.lambda_ = g.r_ * g.h_;
    detail::check_stability(g.lambda_, g.r_);
    g.t_target_ = coarse.t_target_;
    g.n_steps_ = 4 * coarse.n_steps_;
    return g;
}

/// Ratio between the spacings of two grids of a refine() chain, or 0 if they are not aligned.
inline std::size_t alignment_factor(const GridSpec& coarse, const GridSpec& fine) {
    if (coarse.a_dagger() != fine.a_dagger() || coarse.r() != fine.r()) return 0;
    std::size_t factor = 1;
    std::size_t m = coarse.m_total();
    std::size_t n = coarse.n_steps();
    while (m < fine.m_total()) {
        m *= 2;
        n *= 4;
        factor *= 2;
    }
    if (m != fine.m_total() || n != fine.n_steps()) return 0;
    return factor;
}

}  // namespace mvd
