#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mvd/grid.hpp"
#include "mvd/model.hpp"
#include "mvd/residual.hpp"
#include "mvd/solver.hpp"

namespace {

using std::numbers::e;

const mvd::GridSpec reference = mvd::build_grid(1.0, 7, 0.4, 0.2);

TEST(Restrict, ZeroFunction) {
    const auto v = mvd::restrict_to_grid([](double, double) { return 0.0; }, reference);
    EXPECT_TRUE(v == mvd::XhElement(reference));
}

TEST(Restrict, LinearProfile) {
    const auto v = mvd::restrict_to_grid([](double x, double) { return x; }, reference);
    for (std::size_t n = 0; n < v.levels(); n += 37) {
        EXPECT_EQ(v.left()[n], 0.0);
        EXPECT_EQ(v.right()[n], 1.0);
        for (std::size_t i = 1; i < reference.m_total(); ++i) EXPECT_NEAR(v.row(n)[i - 1], 0.05 * i, 1e-15);
    }
}

TEST(Restrict, Example1AtTheFinalTime) {
    const auto v = mvd::restrict_to_grid(mvd::builtin_problem("example1").exact->u, reference);
    EXPECT_NEAR(v.node(reference.n_steps(), 10), (e - std::exp(0.5)) * std::exp(-0.2), 1e-15);
}

TEST(Restrict, RejectsNonFiniteValues) {
    EXPECT_THROW((void)mvd::restrict_to_grid([](double x, double) { return 1.0 / x; }, reference), mvd::EvalError);
}

TEST(ApplyPhi, RunOutputIsARoot) {
    for (auto id : mvd::builtin_ids) {
        const auto b = mvd::builtin_problem(id);
        const auto g = mvd::build_grid(1.0, 7, 0.4, b.t_final);
        const auto hist = mvd::run(b.problem, g);
        const double residual = mvd::yh_norm(mvd::apply_phi(hist, b.problem, mvd::initial_vector(b.problem, g)));
        EXPECT_LE(residual, 1e-10 * (1.0 + mvd::xh_norm(hist))) << id;
    }
}

TEST(ApplyPhi, ZeroElementOfTheZeroProblem) {
    mvd::ProblemSpec p;
    p.mortality = [](double, double) { return 2.0; };
    p.fertility = [](double x, double s) { return 3.0 + x + s * s; };
    p.psi1 = p.psi2 = [](double) { return 1.0; };
    p.u0 = [](double) { return 0.0; };
    p.a_dagger = 1.0;
    const auto bundle = mvd::apply_phi(mvd::XhElement(reference), p, mvd::initial_vector(p, reference));
    EXPECT_TRUE(bundle == mvd::ResidualBundle(reference));
}

TEST(ApplyPhi, ComponentsWrittenOut) {
    // Spot-check single components of Phi on a random element against hand-assembled formulas.
    const auto b = mvd::builtin_problem("example3");
    const auto g = mvd::build_grid(1.0, 1, 0.4, 0.05);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    mvd::XhElement v(g);
    for (std::size_t n = 0; n < v.levels(); ++n) {
        v.left()[n] = dist(rng);
        v.right()[n] = dist(rng);
        for (double& x : v.row(n)) x = dist(rng);
    }
    const auto initial = mvd::initial_vector(b.problem, g);
    const auto p = mvd::apply_phi(v, b.problem, initial);
    const double h = g.h(), k = g.k();
    const auto w = mvd::qh_weights(g.interior_size(), h);

    const std::size_t n = 2;
    EXPECT_NEAR(p.right()[n], (v.right()[n] - std::exp(-1.0) / (1.0 + std::exp(-g.t(n)))) / h, 1e-12);
    double s1 = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s1 += w[j] * v.row(n - 1)[j];
    const std::size_t j = 3;
    const auto prev = v.row(n - 1);
    const double expected = (v.row(n)[j] - prev[j]) / k + (prev[j] - prev[j - 1]) / h
                            + b.problem.mortality(g.x(j + 1), s1) * prev[j]
                            - (prev[j + 1] + prev[j - 1] - 2.0 * prev[j]) / (h * h);
    EXPECT_NEAR(p.row(n)[j], expected, 1e-9 * std::abs(expected));
    EXPECT_EQ(p.row(0)[1], v.row(0)[1] - initial[1]);
    double s2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s2 += w[i] * v.row(n)[i];
    double qb = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) qb += w[i] * b.problem.fertility(g.x(i + 1), s2) * v.row(n)[i];
    EXPECT_NEAR(p.left()[n], (1.0 + 1.0 / h) * v.left()[n] - v.row(n)[0] / h - qb, 1e-12);
}

TEST(ApplyPhi, DimensionMismatch) {
    const auto b = mvd::builtin_problem("example1");
    const auto other = mvd::build_grid(1.0, 9, 0.4, 0.2);
    EXPECT_THROW((void)mvd::apply_phi(mvd::XhElement(reference), b.problem, mvd::initial_vector(b.problem, other)),
                 mvd::DimensionMismatch);
}

TEST(Norms, XhExamples) {
    mvd::XhElement v(reference);
    EXPECT_EQ(mvd::xh_norm(v), 0.0);
    for (double& x : v.row(3)) x = 1.0;
    EXPECT_NEAR(mvd::xh_norm(v), std::sqrt(0.95), 1e-15);
    EXPECT_NEAR(mvd::xh_norm(-2.5 * v), 2.5 * std::sqrt(0.95), 1e-14);
}

TEST(Norms, XhBoundaryWeighting) {
    // h (||V_0||_* + ||V_M||_*) for constant traces 1 and 2: ||c||_* = |c| sqrt(k (N + 1)).
    mvd::XhElement v(reference);
    for (double& x : v.left()) x = 1.0;
    for (double& x : v.right()) x = 2.0;
    const double star = std::sqrt(reference.k() * static_cast<double>(reference.n_steps() + 1));
    EXPECT_NEAR(mvd::xh_norm(v), reference.h() * 3.0 * star, 1e-15);
}

TEST(Norms, YhExamples) {
    mvd::ResidualBundle p(reference);
    EXPECT_EQ(mvd::yh_norm(p), 0.0);
    for (double& x : p.row(0)) x = 1.0;
    EXPECT_NEAR(mvd::yh_norm(p), std::sqrt(0.95), 1e-15);

    mvd::ResidualBundle q(reference);
    for (double& x : q.row(5)) x = 1.0;  // later rows carry weight k
    EXPECT_NEAR(mvd::yh_norm(q), std::sqrt(reference.k() * 0.95), 1e-15);

    mvd::ResidualBundle r(reference);
    for (double& x : r.right()) x = 1.0;  // right trace carries weight h
    EXPECT_NEAR(mvd::yh_norm(r),
                std::sqrt(reference.h() * reference.k() * static_cast<double>(reference.n_steps() + 1)), 1e-15);
}

TEST(Norms, TriangleInequalityOnRandomPairs) {
    const auto g = mvd::build_grid(1.0, 3, 0.4, 0.05);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 100; ++trial) {
        mvd::ResidualBundle a(g), c(g);
        mvd::XhElement x(g), y(g);
        for (std::size_t n = 0; n < a.levels(); ++n) {
            a.left()[n] = nd(rng);
            c.left()[n] = nd(rng);
            a.right()[n] = nd(rng);
            c.right()[n] = nd(rng);
            x.left()[n] = nd(rng);
            y.right()[n] = nd(rng);
            for (std::size_t j = 0; j < g.interior_size(); ++j) {
                a.row(n)[j] = nd(rng);
                c.row(n)[j] = nd(rng);
                x.row(n)[j] = nd(rng);
                y.row(n)[j] = nd(rng);
            }
        }
        EXPECT_LE(mvd::yh_norm(a + c), (mvd::yh_norm(a) + mvd::yh_norm(c)) * (1.0 + 1e-14));
        EXPECT_LE(mvd::xh_norm(x + y), (mvd::xh_norm(x) + mvd::xh_norm(y)) * (1.0 + 1e-14));
    }
}

TEST(Consistency, ResidualOfTheExactSolutionDecreases) {
    for (const char* id : {"example1", "example3"}) {
        const auto b = mvd::builtin_problem(id);
        auto g = mvd::build_grid(1.0, 7, 0.4, b.t_final);
        double previous = std::numeric_limits<double>::infinity();
        for (int level = 0; level < 3; ++level) {
            const auto u = mvd::restrict_to_grid(b.exact->u, g);
            const double res = mvd::yh_norm(mvd::apply_phi(u, b.problem, mvd::initial_vector(b.problem, g)));
            EXPECT_TRUE(std::isfinite(res));
            EXPECT_LT(res, previous) << id << " h=" << g.h();
            previous = res;
            g = mvd::refine(g);
        }
    }
}

}  // namespace
