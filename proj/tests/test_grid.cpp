#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mvd/grid.hpp"

namespace {

double ulp(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()) - x; }

TEST(Grid, ReferenceGridForTheExamples) {
    const auto g = mvd::build_grid(1.0, 7, 0.4, 0.2);
    EXPECT_EQ(g.m_total(), 20u);
    EXPECT_DOUBLE_EQ(g.h(), 0.05);
    EXPECT_DOUBLE_EQ(g.k(), 0.001);
    EXPECT_DOUBLE_EQ(g.lambda(), 0.02);
    EXPECT_EQ(g.n_steps(), 200u);
    EXPECT_NEAR(g.t_final(), 0.2, 1e-15);
}

TEST(Grid, FineGrid) {
    const auto g = mvd::build_grid(1.0, 47, 0.4, 0.2);
    EXPECT_EQ(g.m_total(), 100u);
    EXPECT_DOUBLE_EQ(g.h(), 0.01);
    EXPECT_NEAR(g.k(), 4e-5, 1e-19);
    EXPECT_EQ(g.n_steps(), 5000u);
    // 2(M'+3) h = a_dagger and N k = t_final, recomputed independently.
    EXPECT_NEAR(2.0 * (47 + 3) * g.h(), 1.0, 4 * ulp(1.0));
    EXPECT_NEAR(5000 * 4e-5, g.t_final(), 1e-14);
}

TEST(Grid, UnstableRatioIsRejected) {
    try {
        (void)mvd::build_grid(1.0, 1, 0.6, 0.1);
        FAIL() << "expected StabilityViolation";
    } catch (const mvd::StabilityViolation& e) {
        EXPECT_DOUBLE_EQ(e.r(), 0.6);
        EXPECT_DOUBLE_EQ(e.lambda(), 0.6 * 0.125);
        EXPECT_GT(e.sum(), 1.0);
    }
}

TEST(Grid, ThresholdBoundaryIsAccepted) {
    // a = 16, M' = 1: h = 2, so r = 0.25 gives lambda = 0.5 and lambda + 2r = 1 exactly.
    const auto g = mvd::build_grid(16.0, 1, 0.25, 100.0);
    EXPECT_EQ(g.lambda() + 2.0 * g.r(), 1.0);
    EXPECT_THROW((void)mvd::build_grid(16.0, 1, std::nextafter(0.25, 1.0), 100.0), mvd::StabilityViolation);
}

TEST(Grid, InvalidInputs) {
    EXPECT_THROW((void)mvd::build_grid(0.0, 7, 0.4, 0.2), mvd::InvalidParameter);
    EXPECT_THROW((void)mvd::build_grid(-1.0, 7, 0.4, 0.2), mvd::InvalidParameter);
    EXPECT_THROW((void)mvd::build_grid(1.0, 0, 0.4, 0.2), mvd::InvalidParameter);
    EXPECT_THROW((void)mvd::build_grid(1.0, 7, 0.0, 0.2), mvd::InvalidParameter);
    EXPECT_THROW((void)mvd::build_grid(1.0, 7, 0.4, 0.0), mvd::InvalidParameter);
    EXPECT_THROW((void)mvd::build_grid(1.0, 7, std::nan(""), 0.2), mvd::InvalidParameter);
}

TEST(Grid, StepCountRoundsUpForUnalignedTargets) {
    const auto g = mvd::build_grid(1.0, 7, 0.4, 0.2005);
    EXPECT_EQ(g.n_steps(), 201u);
    EXPECT_GE(g.t_final(), 0.2005);
}

TEST(Grid, RefineHalvesTheSpacing) {
    const auto g = mvd::build_grid(1.0, 7, 0.4, 0.2);
    const auto f = mvd::refine(g);
    EXPECT_EQ(f.m_prime(), 17u);
    EXPECT_DOUBLE_EQ(f.h(), 0.025);
    EXPECT_EQ(f.n_steps(), 4 * g.n_steps());
    EXPECT_EQ(f.a_dagger(), g.a_dagger());
    EXPECT_EQ(f.r(), g.r());

    const auto c = mvd::refine(mvd::build_grid(1.0, 1, 0.4, 0.2));
    EXPECT_EQ(c.m_prime(), 5u);
    EXPECT_DOUBLE_EQ(c.h(), 0.0625);
}

TEST(Grid, TwiceRefinedNodesContainCoarseNodes) {
    const auto g = mvd::build_grid(1.0, 7, 0.4, 0.2);
    const auto f = mvd::refine(mvd::refine(g));
    EXPECT_DOUBLE_EQ(f.h(), 0.0125);
    EXPECT_EQ(mvd::alignment_factor(g, f), 4u);
    for (std::size_t i = 0; i <= g.m_total(); ++i) EXPECT_NEAR(f.x(4 * i), g.x(i), 4 * ulp(1.0)) << i;
    for (std::size_t n = 0; n <= g.n_steps(); ++n) EXPECT_NEAR(f.t(16 * n), g.t(n), 1e-15);
}

TEST(Grid, PropertiesOnRandomGrids) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a_dist(0.1, 10.0);
    std::uniform_int_distribution<std::size_t> m_dist(1, 200);
    std::uniform_real_distribution<double> r_dist(0.01, 0.49);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = a_dist(rng);
        const std::size_t m = m_dist(rng);
        const double r = r_dist(rng);
        const double h = a / (2.0 * (m + 3));
        if (r * h + 2.0 * r > 1.0) {
            EXPECT_THROW((void)mvd::build_grid(a, m, r, 1.0), mvd::StabilityViolation);
            continue;
        }
        const auto g = mvd::build_grid(a, m, r, 1.0);
        EXPECT_EQ(g.m_total() % 2, 0u);
        EXPECT_GE(g.m_total(), 8u);
        EXPECT_LE(std::abs(2.0 * (m + 3) * g.h() - a), 4 * ulp(a));
        EXPECT_EQ(g.k(), r * g.h() * g.h());
        EXPECT_EQ(g.lambda(), r * g.h());
        EXPECT_LE(g.lambda() + 2.0 * g.r(), 1.0);
        const auto f = mvd::refine(g);
        EXPECT_EQ(f.a_dagger(), a);
        EXPECT_EQ(f.r(), r);
        EXPECT_LE(std::abs(f.h() - g.h() / 2.0), 2 * ulp(g.h()));
    }
}

TEST(Grid, UnrelatedGridsAreNotAligned) {
    const auto g = mvd::build_grid(1.0, 7, 0.4, 0.2);
    EXPECT_EQ(mvd::alignment_factor(g, mvd::build_grid(1.0, 8, 0.4, 0.2)), 0u);
    EXPECT_EQ(mvd::alignment_factor(g, mvd::build_grid(1.0, 17, 0.3, 0.2)), 0u);
    EXPECT_EQ(mvd::alignment_factor(g, mvd::refine(g)), 2u);
}

}  // namespace
