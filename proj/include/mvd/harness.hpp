#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mvd/errors.hpp"
#include "mvd/field.hpp"
#include "mvd/grid.hpp"
#include "mvd/model.hpp"
#include "mvd/quadrature.hpp"
#include "mvd/residual.hpp"
#include "mvd/solver.hpp"

namespace mvd {

struct ConvergenceRow {
    double h = 0.0;
    double k = 0.0;
    std::size_t m_total = 0;
    std::size_t n_steps = 0;
    double err_inf = 0.0;
    double err_l2 = 0.0;
    double err_xh = 0.0;
    std::optional<double> order_inf;
    std::optional<double> order_l2;
    std::optional<double> order_xh;

    friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

struct ConsistencyRow {
    double h = 0.0;
    double k = 0.0;
    std::size_t m_total = 0;
    std::size_t n_steps = 0;
    /// ||Phi_h(u_h)|| with the exact initial row, so P^0 = 0.
    double residual = 0.0;
    /// Same, with the scheme's U^0 = u0(x_i) in the initial-data component.
    double residual_scheme_initial = 0.0;
    std::optional<double> order;
};

struct StabilityRow {
    double h = 0.0;
    double k = 0.0;
    std::size_t m_total = 0;
    std::size_t n_steps = 0;
    /// ||V - W|| in the solution-space norm.
    double numerator = 0.0;
    /// ||Phi(V) - Phi(W)|| in the residual-space norm.
    double denominator = 0.0;
    /// Absent when the denominator underflows (DegenerateRatio).
    std::optional<double> ratio;

    bool degenerate() const noexcept { return !ratio.has_value(); }
};

/// The grids base, refine(base), refine(refine(base)), ...
inline std::vector<GridSpec> refinement_chain(const GridSpec& base, std::size_t levels) {
    std::vector<GridSpec> grids;
    grids.reserve(levels);
    if (levels == 0) return grids;
    grids.push_back(base);
    for (std::size_t j = 1; j < levels; ++j) grids.push_back(refine(grids.back()));
    return grids;
}

namespace detail {

// Levels are independent; results are stored by index so the output order never
// depends on completion order.
template <class F>
auto map_levels(std::size_t count, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::future<R>> jobs;
    jobs.reserve(count);
    for (std::size_t j = 0; j < count; ++j) jobs.push_back(std::async(std::launch::async, f, j));
    std::vector<R> out;
    out.reserve(count);
    for (auto& job : jobs) out.push_back(job.get());
    return out;
}

inline std::optional<double> observed_order(double coarse_err, double fine_err, double coarse_h, double fine_h) {
    if (!(coarse_err > 0.0) || !(fine_err > 0.0)) return std::nullopt;
    return std::log(coarse_err / fine_err) / std::log(coarse_h / fine_h);
}

inline ConvergenceRow error_row(const XhElement& error) {
    const GridSpec& g = error.grid();
    ConvergenceRow row;
    row.h = g.h();
    row.k = g.k();
    row.m_total = g.m_total();
    row.n_steps = g.n_steps();
    const std::size_t last = g.n_steps();
    for (std::size_t i = 0; i <= g.m_total(); ++i) row.err_inf = std::max(row.err_inf, std::abs(error.node(last, i)));
    row.err_l2 = l2_norm(error.row(last), g.h());
    row.err_xh = xh_norm(error);
    return row;
}

inline void fill_orders(std::vector<ConvergenceRow>& rows) {
    for (std::size_t j = 1; j < rows.size(); ++j) {
        const auto& c = rows[j - 1];
        auto& f = rows[j];
        f.order_inf = observed_order(c.err_inf, f.err_inf, c.h, f.h);
        f.order_l2 = observed_order(c.err_l2, f.err_l2, c.h, f.h);
        f.order_xh = observed_order(c.err_xh, f.err_xh, c.h, f.h);
    }
}

}  // namespace detail

/**
 * Runs the scheme on `levels` successively halved grids and measures
 * e_h = u_h - U_h against the exact solution at the common final time.
 */
inline std::vector<ConvergenceRow> convergence_study(const ProblemSpec& problem, const ExactSolution& exact,
                                                     const GridSpec& base, std::size_t levels) {
    if (levels < 1) throw InvalidParameter("convergence study needs at least one level");
    const auto grids = refinement_chain(base, levels);
    auto rows = detail::map_levels(levels, [&](std::size_t j) {
        const auto solution = run(problem, grids[j]);
        return detail::error_row(restrict_to_grid(exact.u, grids[j]) - solution);
    });
    detail::fill_orders(rows);
    return rows;
}

/**
 * Errors of each coarse run against the finest one, compared at shared nodes
 * and time levels. Every run must come from the same refine() chain.
 */
inline std::vector<ConvergenceRow> self_convergence_rows(std::span<const SolutionHistory> runs) {
    if (runs.size() < 2) throw InvalidParameter("self-convergence needs at least two runs");
    const SolutionHistory& reference = runs.back();
    const GridSpec& fine = reference.grid();
    std::vector<ConvergenceRow> rows;
    for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
        const GridSpec& coarse = runs[j].grid();
        const std::size_t factor = alignment_factor(coarse, fine);
        if (factor < 2) throw AlignmentError("grid " + std::to_string(j) + " is not aligned with the reference grid");
        if (j > 0 && alignment_factor(runs[j - 1].grid(), coarse) != 2)
            throw AlignmentError("grid " + std::to_string(j) + " is not the refinement of its predecessor");

        XhElement sampled(coarse);
        const std::size_t time_factor = factor * factor;
        for (std::size_t n = 0; n < sampled.levels(); ++n) {
            const std::size_t fn = n * time_factor;
            sampled.left()[n] = reference.left()[fn];
            sampled.right()[n] = reference.right()[fn];
            auto row = sampled.row(n);
            for (std::size_t i = 1; i <= row.size(); ++i) row[i - 1] = reference.node(fn, i * factor);
        }
        rows.push_back(detail::error_row(sampled - runs[j]));
    }
    detail::fill_orders(rows);
    return rows;
}

inline std::vector<ConvergenceRow> self_convergence_study(const ProblemSpec& problem, const GridSpec& base,
                                                          std::size_t levels) {
    if (levels < 3) throw InvalidParameter("self-convergence study needs at least three levels");
    const auto grids = refinement_chain(base, levels);
    const auto runs = detail::map_levels(levels, [&](std::size_t j) { return run(problem, grids[j]); });
    return self_convergence_rows(runs);
}

/// Local discretization error ||Phi_h(u_h)|| on successively halved grids.
inline std::vector<ConsistencyRow> consistency_study(const ProblemSpec& problem, const ExactSolution& exact,
                                                     const GridSpec& base, std::size_t levels) {
    if (levels < 1) throw InvalidParameter("consistency study needs at least one level");
    const auto grids = refinement_chain(base, levels);
    auto rows = detail::map_levels(levels, [&](std::size_t j) {
        const GridSpec& g = grids[j];
        const auto restricted = restrict_to_grid(exact.u, g);
        ConsistencyRow row;
        row.h = g.h();
        row.k = g.k();
        row.m_total = g.m_total();
        row.n_steps = g.n_steps();
        const InteriorVector exact_initial(
            std::vector<double>(restricted.row(0).begin(), restricted.row(0).end()), g.h());
        row.residual = yh_norm(apply_phi(restricted, problem, exact_initial));
        row.residual_scheme_initial = yh_norm(apply_phi(restricted, problem, initial_vector(problem, g)));
        return row;
    });
    for (std::size_t j = 1; j < rows.size(); ++j)
        rows[j].order = detail::observed_order(rows[j - 1].residual, rows[j].residual, rows[j - 1].h, rows[j].h);
    return rows;
}

/**
 * Deterministic low-frequency perturbation: a sum of three sine modes in x
 * (vanishing at both ends of the domain), each modulated smoothly in time.
 * The same seed gives the same continuous field on every grid.
 */
class SmoothPerturbation {
public:
    explicit SmoothPerturbation(double a_dagger, double t_final, std::uint64_t seed = 20240521)
        : a_dagger_(a_dagger), t_final_(t_final) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> amplitude(-1.0, 1.0);
        std::uniform_real_distribution<double> modulation(-0.5, 0.5);
        for (auto& m : modes_) {
            m.amplitude = amplitude(rng);
            m.modulation = modulation(rng);
        }
    }

    double operator()(double x, double t) const {
        using std::numbers::pi;
        double v = 0.0;
        for (std::size_t j = 0; j < modes_.size(); ++j) {
            const double wave = std::sin(static_cast<double>(j + 1) * pi * x / a_dagger_);
            v += modes_[j].amplitude * wave * (1.0 + modes_[j].modulation * std::sin(pi * t / t_final_));
        }
        return v;
    }

private:
    struct Mode {
        double amplitude;
        double modulation;
    };
    double a_dagger_;
    double t_final_;
    std::array<Mode, 3> modes_{};
};

/// Perturbation restricted to the grid and scaled to a solution-space norm of `radius`.
inline XhElement scaled_perturbation(const GridSpec& grid, double radius, std::uint64_t seed = 20240521) {
    const SmoothPerturbation shape(grid.a_dagger(), grid.t_final(), seed);
    XhElement delta = restrict_to_grid([&](double x, double t) { return shape(x, t); }, grid);
    const double norm = xh_norm(delta);
    if (norm > 0.0) delta *= radius / norm;
    return delta;
}

/**
 * Perturbation pairs around V (the restricted exact solution, or the computed
 * solution when no exact one is given): W = V + delta with ||delta|| =
 * fraction * R * h, reporting ||V - W|| / ||Phi(V) - Phi(W)|| per level.
 */
inline std::vector<StabilityRow> stability_probe(const ProblemSpec& problem, const std::optional<ExactSolution>& exact,
                                                 const GridSpec& base, std::size_t levels, double radius_scale,
                                                 double fraction = 0.5) {
    if (!(radius_scale > 0.0)) throw InvalidParameter("perturbation scale R must be positive");
    if (levels < 1) throw InvalidParameter("stability probe needs at least one level");
    const auto grids = refinement_chain(base, levels);
    return detail::map_levels(levels, [&](std::size_t j) {
        const GridSpec& g = grids[j];
        const XhElement v = exact ? restrict_to_grid(exact->u, g) : run(problem, g);
        const XhElement w = v + scaled_perturbation(g, fraction * radius_scale * g.h());
        const auto initial = initial_vector(problem, g);

        StabilityRow row;
        row.h = g.h();
        row.k = g.k();
        row.m_total = g.m_total();
        row.n_steps = g.n_steps();
        row.numerator = xh_norm(v - w);
        row.denominator = yh_norm(apply_phi(v, problem, initial) - apply_phi(w, problem, initial));
        if (row.denominator > std::numeric_limits<double>::min()) row.ratio = row.numerator / row.denominator;
        return row;
    });
}

/**
 * For a problem whose coefficients do not depend on s the operator is affine,
 * so Phi(V) - Phi(W) = Phi(V - W) - Phi(0). Returns the residual-space norm of
 * the defect relative to 1 + ||Phi(V) - Phi(W)||.
 */
inline double linearity_defect(const ProblemSpec& problem, const XhElement& v, const XhElement& w,
                               InteriorView initial) {
    const XhElement zero(v.grid());
    const ResidualBundle lhs = apply_phi(v, problem, initial) - apply_phi(w, problem, initial);
    const ResidualBundle rhs = apply_phi(v - w, problem, initial) - apply_phi(zero, problem, initial);
    return yh_norm(lhs - rhs) / (1.0 + yh_norm(lhs));
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view convergence_csv_header =
    "h,k,M,N,err_inf,err_l2,err_xh,order_inf,order_l2,order_xh";

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidParameter("malformed number '" + std::string(s) + "' in CSV");
    return v;
}

inline std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidParameter("malformed integer '" + std::string(s) + "' in CSV");
    return v;
}

inline std::optional<double> parse_optional(std::string_view s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

}  // namespace detail

inline void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows) {
    os << convergence_csv_header << '\n';
    for (const auto& r : rows) {
        os << format_double(r.h) << ',' << format_double(r.k) << ',' << r.m_total << ',' << r.n_steps << ','
           << format_double(r.err_inf) << ',' << format_double(r.err_l2) << ',' << format_double(r.err_xh) << ','
           << detail::format_optional(r.order_inf) << ',' << detail::format_optional(r.order_l2) << ','
           << detail::format_optional(r.order_xh) << '\n';
    }
}

inline std::vector<ConvergenceRow> read_convergence_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != convergence_csv_header)
        throw InvalidParameter("missing or unexpected convergence CSV header");
    std::vector<ConvergenceRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 10) throw InvalidParameter("convergence CSV row has " + std::to_string(f.size()) + " fields");
        ConvergenceRow r;
        r.h = detail::parse_double(f[0]);
        r.k = detail::parse_double(f[1]);
        r.m_total = detail::parse_size(f[2]);
        r.n_steps = detail::parse_size(f[3]);
        r.err_inf = detail::parse_double(f[4]);
        r.err_l2 = detail::parse_double(f[5]);
        r.err_xh = detail::parse_double(f[6]);
        r.order_inf = detail::parse_optional(f[7]);
        r.order_l2 = detail::parse_optional(f[8]);
        r.order_xh = detail::parse_optional(f[9]);
        rows.push_back(r);
    }
    return rows;
}

inline void write_consistency_csv(std::ostream& os, std::span<const ConsistencyRow> rows) {
    os << "h,k,M,N,yh_residual,yh_residual_scheme_initial,order\n";
    for (const auto& r : rows) {
        os << format_double(r.h) << ',' << format_double(r.k) << ',' << r.m_total << ',' << r.n_steps << ','
           << format_double(r.residual) << ',' << format_double(r.residual_scheme_initial) << ','
           << detail::format_optional(r.order) << '\n';
    }
}

inline void write_stability_csv(std::ostream& os, std::span<const StabilityRow> rows) {
    os << "h,k,M,N,xh_difference,yh_difference,ratio,status\n";
    for (const auto& r : rows) {
        os << format_double(r.h) << ',' << format_double(r.k) << ',' << r.m_total << ',' << r.n_steps << ','
           << format_double(r.numerator) << ',' << format_double(r.denominator) << ','
           << detail::format_optional(r.ratio) << ',' << (r.degenerate() ? "DegenerateRatio" : "ok") << '\n';
    }
}

/// Nodal slice x,u_numeric[,u_exact,abs_err] at the final time level, boundaries included.
inline void write_slice_csv(std::ostream& os, const SolutionHistory& solution,
                            const std::optional<ExactSolution>& exact = std::nullopt) {
    const GridSpec& g = solution.grid();
    const std::size_t last = g.n_steps();
    const double t = g.t(last);
    os << (exact ? "x,u_numeric,u_exact,abs_err\n" : "x,u_numeric\n");
    for (std::size_t i = 0; i <= g.m_total(); ++i) {
        const double x = i == g.m_total() ? g.a_dagger() : g.x(i);
        const double u = solution.node(last, i);
        os << format_double(x) << ',' << format_double(u);
        if (exact) {
            const double ue = exact->u(x, t);
            os << ',' << format_double(ue) << ',' << format_double(std::abs(ue - u));
        }
        os << '\n';
    }
}

}  // namespace mvd
