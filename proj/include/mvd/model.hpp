#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mvd/errors.hpp"

namespace mvd {

/// Rate depending on age x and a weighted population s (mortality d, fertility B).
using RateFunction = std::function<double(double x, double s)>;
using ProfileFunction = std::function<double(double x)>;
using TimeFunction = std::function<double(double t)>;
using FieldFunction = std::function<double(double x, double t)>;

/// u(a_dagger, t) = 0.
struct Homogeneous {};

/// u(a_dagger, t) = g(t).
struct Dirichlet {
    TimeFunction g;
};

using RightBoundary = std::variant<Homogeneous, Dirichlet>;

/**
 * Age-structured population model with diffusion on (0, a_dagger):
 *
 *   u_t + u_x + d(x, s1(t)) u = u_xx
 *   u(0,t) - u_x(0,t) = int_0^a B(x, s2(t)) u(x,t) dx
 *   u(a,t) = 0 or g(t)
 *   s_i(t) = int_0^a psi_i(x) u(x,t) dx
 */
struct ProblemSpec {
    RateFunction mortality;
    RateFunction fertility;
    ProfileFunction psi1;
    ProfileFunction psi2;
    ProfileFunction u0;
    RightBoundary right_boundary = Homogeneous{};
    double a_dagger = 1.0;

    bool is_dirichlet() const noexcept { return std::holds_alternative<Dirichlet>(right_boundary); }

    double boundary_value(double t) const {
        if (const auto* d = std::get_if<Dirichlet>(&right_boundary)) return d->g(t);
        return 0.0;
    }
};

struct ExactSolution {
    FieldFunction u;
    std::string description;

    double operator()(double x, double t) const { return u(x, t); }
};

struct BuiltinProblem {
    std::string id;
    std::string description;
    ProblemSpec problem;
    std::optional<ExactSolution> exact;
    /// Evaluation time used for this example's figures.
    double t_final = 0.2;
};

inline constexpr std::array<std::string_view, 3> builtin_ids{"example1", "example2", "example3"};

inline BuiltinProblem builtin_problem(std::string_view id) {
    using std::numbers::e;
    const auto one = [](double) { return 1.0; };
    const double inv_e = std::exp(-1.0);
    const double mass_scale = 1.0 - inv_e;

    BuiltinProblem out;
    out.id = std::string(id);
    ProblemSpec& p = out.problem;
    p.psi1 = one;
    p.psi2 = one;
    p.a_dagger = 1.0;

    if (id == "example1") {
        out.description = "linear test case: d = 1, B = e, u0 = e - e^x, exact u = (e - e^x) e^-t";
        p.u0 = [](double x) { return e - std::exp(x); };
        p.mortality = [](double, double) { return 1.0; };
        p.fertility = [](double, double) { return e; };
        p.right_boundary = Homogeneous{};
        out.exact = ExactSolution{[](double x, double t) { return (e - std::exp(x)) * std::exp(-t); },
                                  "(e - e^x) e^-t"};
        out.t_final = 0.2;
    } else if (id == "example2") {
        out.description = "nonlinear mortality: d = 1/2 + s/(1-e^-1), B = 2e^x, u0 = e - e^x, no exact solution";
        p.u0 = [](double x) { return e - std::exp(x); };
        p.mortality = [mass_scale](double, double s) { return 0.5 + s / mass_scale; };
        p.fertility = [](double x, double) { return 2.0 * std::exp(x); };
        p.right_boundary = Homogeneous{};
        out.t_final = 0.8;
    } else if (id == "example3") {
        out.description =
            "non-homogeneous Dirichlet: d = 1 + s/(1-e^-1), B = 2e^x, g = e^-1/(1+e^-t), exact u = e^-x/(1+e^-t)";
        p.u0 = [](double x) { return std::exp(-x) / 2.0; };
        p.mortality = [mass_scale](double, double s) { return 1.0 + s / mass_scale; };
        p.fertility = [](double x, double) { return 2.0 * std::exp(x); };
        p.right_boundary = Dirichlet{[inv_e](double t) { return inv_e / (1.0 + std::exp(-t)); }};
        out.exact = ExactSolution{[](double x, double t) { return std::exp(-x) / (1.0 + std::exp(-t)); },
                                  "e^-x / (1 + e^-t)"};
        out.t_final = 0.8;
    } else {
        throw UnknownProblem("unknown built-in problem '" + std::string(id) + "'");
    }
    return out;
}

/**
 * Adaptive Gauss-Kronrod value of int_0^a psi(x) u(x,t) dx, relative
 * tolerance 1e-12. Only meant as an independent reference for tests.
 */
inline double exact_weighted_integral(const ExactSolution& ex, const ProfileFunction& psi, double t,
                                      double a_dagger) {
    constexpr double tolerance = 1e-12;
    double error = 0.0;
    double l1 = 0.0;
    const auto f = [&](double x) { return psi(x) * ex(x, t); };
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, a_dagger, 20, tolerance, &error, &l1);
    if (!std::isfinite(value) || error > tolerance * std::max(1.0, l1))
        throw QuadratureFailure("adaptive quadrature did not reach 1e-12 (estimate " + std::to_string(error) + ")");
    return value;
}

}  // namespace mvd
