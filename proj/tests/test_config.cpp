#include <gtest/gtest.h>

#include <cmath>
#include <exception>
#include <string>

#include "mvd/config.hpp"
#include "mvd/harness.hpp"

namespace {

mvd::ConfigError config_error_of(const std::string& text) {
    try {
        (void)mvd::parse_config(text);
    } catch (const mvd::ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no ConfigError for:\n" << text;
    return mvd::ConfigError(0, "");
}

TEST(Config, BuiltinExample) {
    const auto cfg = mvd::parse_config("problem = example1\nm_prime = 7\nr = 0.4\nt_final = 0.2\n");
    ASSERT_TRUE(cfg.is_builtin());
    EXPECT_EQ(std::get<std::string>(cfg.problem), "example1");
    EXPECT_EQ(cfg.m_prime, 7u);
    EXPECT_EQ(cfg.r, 0.4);
    EXPECT_EQ(cfg.t_final, 0.2);
    EXPECT_EQ(cfg.study, mvd::StudyKind::single);

    const auto rp = mvd::resolve_problem(cfg);
    EXPECT_EQ(rp.t_final, 0.2);
    const auto g = mvd::build_grid(rp.problem.a_dagger, cfg.m_prime, cfg.r, rp.t_final);
    EXPECT_DOUBLE_EQ(g.h(), 0.05);
    EXPECT_EQ(g.n_steps(), 200u);
}

TEST(Config, InlineProblemMatchesTheBuiltin) {
    const std::string text = R"(# non-homogeneous example written out
[problem]
d = 1 + s/(1-exp(-1))
B = 2*exp(x)
u0 = exp(-x)/2
g = exp(-1)/(1+exp(-t))
exact = exp(-x)/(1+exp(-t))

[study]
kind = convergence
eval_time = 0.8
levels = 2
)";
    const auto cfg = mvd::parse_config(text);
    ASSERT_FALSE(cfg.is_builtin());
    const auto& p = std::get<mvd::InlineProblem>(cfg.problem);
    EXPECT_EQ(p.psi1, "1");
    EXPECT_EQ(cfg.study, mvd::StudyKind::convergence);
    EXPECT_EQ(cfg.levels, 2u);

    const auto rp = mvd::resolve_problem(cfg);
    const auto ref = mvd::builtin_problem("example3");
    EXPECT_EQ(rp.t_final, 0.8);
    EXPECT_TRUE(rp.problem.is_dirichlet());
    for (double x : {0.0, 0.3, 1.0}) {
        for (double s : {0.0, 0.6}) {
            EXPECT_NEAR(rp.problem.mortality(x, s), ref.problem.mortality(x, s), 1e-15);
            EXPECT_NEAR(rp.problem.fertility(x, s), ref.problem.fertility(x, s), 1e-15);
        }
        EXPECT_NEAR(rp.problem.u0(x), ref.problem.u0(x), 1e-16);
        EXPECT_NEAR((*rp.exact)(x, 0.4), (*ref.exact)(x, 0.4), 1e-16);
    }
    EXPECT_NEAR(rp.problem.boundary_value(0.5), ref.problem.boundary_value(0.5), 1e-16);

    // Both descriptions drive the solver to the same answer up to rounding.
    const auto g = mvd::build_grid(1.0, 7, 0.4, 0.8);
    const auto a = mvd::run(rp.problem, g);
    const auto b = mvd::run(ref.problem, g);
    EXPECT_LE(mvd::xh_norm(a - b), 1e-12);
}

TEST(Config, UnknownVariableIsReported) {
    const std::string text = "[problem]\nd = 1 + q\nB = 1\nu0 = 1\n";
    try {
        (void)mvd::parse_config(text);
        FAIL();
    } catch (const mvd::ConfigError& err) {
        EXPECT_EQ(err.line(), 2u);
        try {
            std::rethrow_if_nested(err);
            ADD_FAILURE() << "expected a nested ParseError";
        } catch (const mvd::ParseError& inner) {
            EXPECT_EQ(inner.position(), 4u);
        }
    }
}

TEST(Config, SlotVariablesAreEnforced) {
    EXPECT_EQ(config_error_of("[problem]\nd = 1\nB = 1\nu0 = t\n").line(), 4u);
    EXPECT_EQ(config_error_of("[problem]\nd = 1\nB = 1\nu0 = 1\ng = x\n").line(), 5u);
    EXPECT_EQ(config_error_of("[problem]\nd = 1\nB = 1\nu0 = 1\npsi1 = s\n").line(), 5u);
    EXPECT_NO_THROW((void)mvd::parse_config("[problem]\nd = x*s\nB = s + x\nu0 = x\nexact = x*t\n"));
}

TEST(Config, StructuralErrorsCarryLineNumbers) {
    EXPECT_EQ(config_error_of("problem = example1\nproblem = example2\n").line(), 2u);
    EXPECT_EQ(config_error_of("problem = example1\nspeed = 3\n").line(), 2u);
    EXPECT_EQ(config_error_of("problem = example1\n[solver]\n").line(), 2u);
    EXPECT_EQ(config_error_of("problem = example1\njust words\n").line(), 2u);
    EXPECT_EQ(config_error_of("problem = example1\nr = -0.4\n").line(), 2u);
    EXPECT_EQ(config_error_of("problem = example1\nlevels = two\n").line(), 2u);
    EXPECT_EQ(config_error_of("problem = example9\n").line(), 1u);
    EXPECT_EQ(config_error_of("problem = example1\n[study]\nkind = fastest\n").line(), 3u);
    EXPECT_EQ(config_error_of("problem = example1\na_dagger = 2\n").line(), 2u);
    EXPECT_EQ(config_error_of("[problem]\nd = 1\n").line(), 0u);
    EXPECT_EQ(config_error_of("problem = example1\n[problem]\nd = 1\n").line(), 3u);
    EXPECT_THROW((void)mvd::parse_config(""), mvd::ConfigError);
    EXPECT_THROW((void)mvd::parse_config("# nothing\n"), mvd::ConfigError);
}

TEST(Config, CommentsAndWhitespace) {
    const auto cfg = mvd::parse_config("  # header\n\tproblem = example2   # trailing\r\n\n[study]\n levels=4\n");
    EXPECT_EQ(std::get<std::string>(cfg.problem), "example2");
    EXPECT_EQ(cfg.levels, 4u);
}

TEST(Config, EvalTimeOverridesTFinal) {
    const auto cfg = mvd::parse_config("problem = example1\nt_final = 0.3\n[study]\neval_time = 0.5\n");
    EXPECT_EQ(mvd::resolve_problem(cfg).t_final, 0.5);
    EXPECT_EQ(mvd::resolve_problem(mvd::parse_config("problem = example2\n")).t_final, 0.8);
}

TEST(Config, StudyKindNames) {
    for (auto k : {mvd::StudyKind::single, mvd::StudyKind::convergence, mvd::StudyKind::self_convergence,
                   mvd::StudyKind::consistency, mvd::StudyKind::stability})
        EXPECT_EQ(mvd::study_kind_from(mvd::to_string(k)), k);
    EXPECT_FALSE(mvd::study_kind_from("Convergence").has_value());
}

TEST(Config, InlineProblemOnAnotherDomain) {
    const auto cfg = mvd::parse_config("[problem]\nd = 0\nB = 0\nu0 = x*(2-x)\na_dagger = 2\n");
    const auto rp = mvd::resolve_problem(cfg);
    EXPECT_EQ(rp.problem.a_dagger, 2.0);
    EXPECT_FALSE(rp.exact.has_value());
    EXPECT_EQ(rp.problem.psi2(1.7), 1.0);
}

}  // namespace
