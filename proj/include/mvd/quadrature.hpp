#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvd/errors.hpp"

namespace mvd {

namespace detail {

// Interior length M - 1 = 2(M' + 3) - 1 with M' >= 1.
inline void check_interior_length(std::size_t n) {
    if (n < 7 || n % 2 == 0)
        throw DimensionMismatch("interior vector length " + std::to_string(n)
                                + " is not 2(M'+3)-1 for an integer M' >= 1");
}

}  // namespace detail

/// Non-owning view of the nodal values at x_1 ... x_{M-1}.
class InteriorView {
public:
    InteriorView(std::span<const double> values, double h) : values_(values), h_(h) {
        detail::check_interior_length(values_.size());
    }

    std::span<const double> values() const noexcept { return values_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }
    /// Refinement index M' of the grid this vector lives on.
    std::size_t m_prime() const noexcept { return (values_.size() + 1) / 2 - 3; }

private:
    std::span<const double> values_;
    double h_;
};

/**
 * Owning vector of interior nodal values. Boundary nodes x_0 and x_M are
 * deliberately not representable: the quadrature rules below are open at
 * both ends.
 */
class InteriorVector {
public:
    InteriorVector(std::vector<double> values, double h) : values_(std::move(values)), h_(h) {
        detail::check_interior_length(values_.size());
    }

    /// Samples f at x_i = i h for i = 1 .. size.
    template <class F>
    static InteriorVector sample(F&& f, std::size_t size, double h) {
        std::vector<double> v(size);
        for (std::size_t j = 0; j < size; ++j) v[j] = f(static_cast<double>(j + 1) * h);
        return InteriorVector(std::move(v), h);
    }

    static InteriorVector constant(double c, std::size_t size, double h) {
        return InteriorVector(std::vector<double>(size, c), h);
    }

    const std::vector<double>& values() const noexcept { return values_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }

    operator InteriorView() const { return InteriorView(values_, h_); }

private:
    std::vector<double> values_;
    double h_;
};

/**
 * Hybrid quadrature over interior values V_1 .. V_{M-1} (M = 2(M'+3)):
 *
 *   (4h/3)(2V_1 - V_2 + 2V_3)
 *   + (h/3) sum_{i=2}^{M'} (V_{2i} + 4V_{2i+1} + V_{2i+2})
 *   + (4h/3)(2V_{2M'+3} - V_{2M'+4} + 2V_{2M'+5})
 *
 * i.e. Milne's open rule on the first and last four cells and composite
 * Simpson in between. Exact for cubics. Summation runs strictly left to right.
 */
inline double qh(InteriorView v) {
    const auto V = [&](std::size_t i) { return v[i - 1]; };  // 1-based
    const std::size_t mp = v.m_prime();
    const double h = v.h();

    double left = 2.0 * V(1) - V(2) + 2.0 * V(3);
    double middle = 0.0;
    for (std::size_t i = 2; i <= mp; ++i) middle += V(2 * i) + 4.0 * V(2 * i + 1) + V(2 * i + 2);
    double right = 2.0 * V(2 * mp + 3) - V(2 * mp + 4) + 2.0 * V(2 * mp + 5);

    return 4.0 * h / 3.0 * left + h / 3.0 * middle + 4.0 * h / 3.0 * right;
}

/// Weight w_i such that qh(V) = sum_i w_i V_i, in the same 1-based order.
inline std::vector<double> qh_weights(std::size_t size, double h) {
    detail::check_interior_length(size);
    const std::size_t mp = (size + 1) / 2 - 3;
    std::vector<double> w(size, 0.0);
    const auto add = [&](std::size_t i, double c) { w[i - 1] += c; };
    add(1, 8.0 * h / 3.0);
    add(2, -4.0 * h / 3.0);
    add(3, 8.0 * h / 3.0);
    for (std::size_t i = 2; i <= mp; ++i) {
        add(2 * i, h / 3.0);
        add(2 * i + 1, 4.0 * h / 3.0);
        add(2 * i + 2, h / 3.0);
    }
    add(2 * mp + 3, 8.0 * h / 3.0);
    add(2 * mp + 4, -4.0 * h / 3.0);
    add(2 * mp + 5, 8.0 * h / 3.0);
    return w;
}

inline InteriorVector pointwise_product(InteriorView u, InteriorView v) {
    if (u.size() != v.size() || u.h() != v.h())
        throw DimensionMismatch("pointwise product of vectors on different grids");
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = u[j] * v[j];
    return InteriorVector(std::move(out), u.h());
}

/// Discrete L2 norm sqrt(sum_i h V_i^2) over interior nodes.
inline double l2_norm(std::span<const double> v, double h) {
    double acc = 0.0;
    for (double x : v) acc += h * x * x;
    return std::sqrt(acc);
}

inline double l2_norm(InteriorView v) { return l2_norm(v.values(), v.h()); }

inline double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double inf_norm(InteriorView v) { return inf_norm(v.values()); }

/// Discrete inner product sum_{i=1}^{M-1} h V_i W_i.
inline double inner_product(InteriorView v, InteriorView w) {
    if (v.size() != w.size() || v.h() != w.h())
        throw DimensionMismatch("inner product of vectors on different grids");
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += v.h() * v[j] * w[j];
    return acc;
}

/// Time-trace norm sqrt(sum_n k z_n^2).
inline double star_norm(std::span<const double> z, double k) {
    double acc = 0.0;
    for (double x : z) acc += k * x * x;
    return std::sqrt(acc);
}

}  // namespace mvd
