#pragma once

// Run configuration: a line-oriented `key = value` format.
//
//   # comments start with '#'
//   problem = example1          # built-in id, or an inline [problem] block
//   m_prime = 7
//   r = 0.4
//   t_final = 0.2
//
//   [problem]                   # inline coefficients (replaces `problem = id`)
//   d = 1 + s/(1-exp(-1))       # mortality, variables x, s
//   B = 2*exp(x)                # fertility, variables x, s
//   psi1 = 1                    # weights, variable x (default 1)
//   psi2 = 1
//   u0 = exp(-x)/2              # initial datum, variable x
//   g = exp(-1)/(1+exp(-t))     # optional Dirichlet datum at a_dagger, variable t
//   exact = exp(-x)/(1+exp(-t)) # optional exact solution, variables x, t
//   a_dagger = 1
//
//   [study]
//   kind = convergence          # single | convergence | self_convergence | consistency | stability
//   levels = 3
//   perturbation_scale = 1      # R of the stability probe
//   eval_time = 0.8             # overrides t_final
//   output_dir = out
//
// Keys before the first section header form the global section, which
// accepts `problem` and every [study] key plus a_dagger.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>

#include "mvd/errors.hpp"
#include "mvd/expr.hpp"
#include "mvd/model.hpp"

namespace mvd {

enum class StudyKind { single, convergence, self_convergence, consistency, stability };

inline std::optional<StudyKind> study_kind_from(std::string_view s) {
    if (s == "single") return StudyKind::single;
    if (s == "convergence") return StudyKind::convergence;
    if (s == "self_convergence") return StudyKind::self_convergence;
    if (s == "consistency") return StudyKind::consistency;
    if (s == "stability") return StudyKind::stability;
    return std::nullopt;
}

inline std::string_view to_string(StudyKind k) {
    switch (k) {
        case StudyKind::single: return "single";
        case StudyKind::convergence: return "convergence";
        case StudyKind::self_convergence: return "self_convergence";
        case StudyKind::consistency: return "consistency";
        case StudyKind::stability: return "stability";
    }
    return "?";
}

/// Coefficient expressions of an inline problem, already validated.
struct InlineProblem {
    std::string d;
    std::string B;
    std::string psi1 = "1";
    std::string psi2 = "1";
    std::string u0;
    std::optional<std::string> g;
    std::optional<std::string> exact;
};

struct RunConfig {
    std::variant<std::string, InlineProblem> problem;
    std::optional<double> a_dagger;
    std::size_t m_prime = 7;
    double r = 0.4;
    std::optional<double> t_final;
    std::optional<double> eval_time;
    std::string output_dir = "out";
    StudyKind study = StudyKind::single;
    std::size_t levels = 3;
    double perturbation_scale = 1.0;

    bool is_builtin() const noexcept { return std::holds_alternative<std::string>(problem); }
};

/// Variables each coefficient slot may reference.
inline VarSet slot_variables(std::string_view key) {
    if (key == "d" || key == "B") return {Var::x, Var::s};
    if (key == "g") return {Var::t};
    if (key == "exact") return {Var::x, Var::t};
    return {Var::x};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class ConfigParser {
public:
    RunConfig parse(std::string_view text) {
        if (trim(text).empty()) throw ConfigError(0, "empty configuration");
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto end = text.find('\n', pos);
            std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
            ++line_no;
            handle_line(line, line_no);
            if (end == std::string_view::npos) break;
            pos = end + 1;
        }
        return finish();
    }

private:
    enum class Section { global, problem, study };

    void handle_line(std::string_view raw, std::size_t line_no) {
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) return;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name == "problem") section_ = Section::problem;
            else if (name == "study") section_ = Section::study;
            else throw ConfigError(line_no, "unknown section [" + std::string(name) + "]");
            return;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
        if (!seen_.emplace(key, line_no).second) throw ConfigError(line_no, "duplicate key '" + key + "'");

        switch (section_) {
            case Section::global:
                if (key == "problem") {
                    builtin_ = std::make_pair(value, line_no);
                    return;
                }
                if (key == "a_dagger") return set_a_dagger(value, line_no);
                if (study_key(key, value, line_no)) return;
                break;
            case Section::problem:
                if (key == "id") {
                    builtin_ = std::make_pair(value, line_no);
                    return;
                }
                if (key == "a_dagger") return set_a_dagger(value, line_no);
                if (expression_key(key, value, line_no)) return;
                break;
            case Section::study:
                if (study_key(key, value, line_no)) return;
                break;
        }
        throw ConfigError(line_no, "unknown key '" + key + "'");
    }

    bool expression_key(const std::string& key, const std::string& value, std::size_t line_no) {
        static constexpr std::string_view slots[] = {"d", "B", "psi1", "psi2", "u0", "g", "exact"};
        bool known = false;
        for (auto s : slots) known = known || key == s;
        if (!known) return false;
        try {
            (void)parse_expr(value, slot_variables(key));
        } catch (const ParseError& e) {
            std::throw_with_nested(ConfigError(line_no, "in '" + key + "': " + e.message() + " (column "
                                                            + std::to_string(e.position() + 1) + ")"));
        }
        expressions_[key] = value;
        first_expression_line_ = std::min(first_expression_line_, line_no);
        return true;
    }

    bool study_key(const std::string& key, const std::string& value, std::size_t line_no) {
        if (key == "kind" || key == "study") {
            auto kind = study_kind_from(value);
            if (!kind) throw ConfigError(line_no, "unknown study kind '" + value + "'");
            cfg_.study = *kind;
        } else if (key == "levels") {
            cfg_.levels = parse_count(value, line_no);
            if (cfg_.levels < 1) throw ConfigError(line_no, "levels must be at least 1");
        } else if (key == "m_prime") {
            cfg_.m_prime = parse_count(value, line_no);
            if (cfg_.m_prime < 1) throw ConfigError(line_no, "m_prime must be at least 1");
        } else if (key == "r") {
            cfg_.r = parse_positive(value, line_no);
        } else if (key == "t_final") {
            cfg_.t_final = parse_positive(value, line_no);
        } else if (key == "eval_time") {
            cfg_.eval_time = parse_positive(value, line_no);
        } else if (key == "perturbation_scale") {
            cfg_.perturbation_scale = parse_positive(value, line_no);
        } else if (key == "output_dir") {
            cfg_.output_dir = value;
        } else {
            return false;
        }
        return true;
    }

    void set_a_dagger(const std::string& value, std::size_t line_no) { cfg_.a_dagger = parse_positive(value, line_no); }

    static double parse_positive(const std::string& value, std::size_t line_no) {
        double v = 0.0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v))
            throw ConfigError(line_no, "'" + value + "' is not a finite number");
        if (!(v > 0.0)) throw ConfigError(line_no, "'" + value + "' must be positive");
        return v;
    }

    static std::size_t parse_count(const std::string& value, std::size_t line_no) {
        std::size_t v = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size())
            throw ConfigError(line_no, "'" + value + "' is not a non-negative integer");
        return v;
    }

    RunConfig finish() {
        if (builtin_ && !expressions_.empty())
            throw ConfigError(first_expression_line_, "both a built-in problem and inline coefficients are given");
        if (builtin_) {
            const auto& [id, line_no] = *builtin_;
            bool known = false;
            for (auto b : builtin_ids) known = known || id == b;
            if (!known) throw ConfigError(line_no, "unknown built-in problem '" + id + "'");
            if (cfg_.a_dagger && *cfg_.a_dagger != 1.0)
                throw ConfigError(seen_.at("a_dagger"), "built-in problems are posed on a_dagger = 1");
            cfg_.problem = id;
            return cfg_;
        }
        if (expressions_.empty()) throw ConfigError(0, "no problem given: set 'problem = <id>' or a [problem] block");
        InlineProblem p;
        for (const char* required : {"d", "B", "u0"}) {
            if (!expressions_.count(required))
                throw ConfigError(0, std::string("inline problem is missing '") + required + "'");
        }
        p.d = expressions_.at("d");
        p.B = expressions_.at("B");
        p.u0 = expressions_.at("u0");
        if (expressions_.count("psi1")) p.psi1 = expressions_.at("psi1");
        if (expressions_.count("psi2")) p.psi2 = expressions_.at("psi2");
        if (expressions_.count("g")) p.g = expressions_.at("g");
        if (expressions_.count("exact")) p.exact = expressions_.at("exact");
        cfg_.problem = std::move(p);
        return cfg_;
    }

    RunConfig cfg_;
    Section section_ = Section::global;
    std::map<std::string, std::size_t> seen_;
    std::optional<std::pair<std::string, std::size_t>> builtin_;
    std::map<std::string, std::string> expressions_;
    std::size_t first_expression_line_ = static_cast<std::size_t>(-1);
};

}  // namespace detail

inline RunConfig parse_config(std::string_view text) { return detail::ConfigParser().parse(text); }

/// Problem, optional exact solution and default evaluation time described by a config.
struct ResolvedProblem {
    ProblemSpec problem;
    std::optional<ExactSolution> exact;
    double t_final = 0.2;
    std::string label;
};

/// Compiles an inline problem into callable coefficients.
inline ResolvedProblem make_problem(const InlineProblem& p, double a_dagger) {
    const Expr d = parse_expr(p.d, slot_variables("d"));
    const Expr b = parse_expr(p.B, slot_variables("B"));
    const Expr psi1 = parse_expr(p.psi1, slot_variables("psi1"));
    const Expr psi2 = parse_expr(p.psi2, slot_variables("psi2"));
    const Expr u0 = parse_expr(p.u0, slot_variables("u0"));

    ResolvedProblem out;
    out.label = "inline";
    ProblemSpec& spec = out.problem;
    spec.a_dagger = a_dagger;
    spec.mortality = [d](double x, double s) { return d(Bindings{x, s, std::nullopt}); };
    spec.fertility = [b](double x, double s) { return b(Bindings{x, s, std::nullopt}); };
    spec.psi1 = [psi1](double x) { return psi1(Bindings{x, std::nullopt, std::nullopt}); };
    spec.psi2 = [psi2](double x) { return psi2(Bindings{x, std::nullopt, std::nullopt}); };
    spec.u0 = [u0](double x) { return u0(Bindings{x, std::nullopt, std::nullopt}); };
    if (p.g) {
        const Expr g = parse_expr(*p.g, slot_variables("g"));
        spec.right_boundary = Dirichlet{[g](double t) { return g(Bindings{std::nullopt, std::nullopt, t}); }};
    }
    if (p.exact) {
        const Expr u = parse_expr(*p.exact, slot_variables("exact"));
        out.exact = ExactSolution{[u](double x, double t) { return u(Bindings{x, std::nullopt, t}); }, *p.exact};
    }
    return out;
}

inline ResolvedProblem resolve_problem(const RunConfig& cfg) {
    ResolvedProblem out;
    if (const auto* id = std::get_if<std::string>(&cfg.problem)) {
        auto b = builtin_problem(*id);
        out.problem = std::move(b.problem);
        out.exact = std::move(b.exact);
        out.t_final = b.t_final;
        out.label = b.id;
    } else {
        out = make_problem(std::get<InlineProblem>(cfg.problem), cfg.a_dagger.value_or(1.0));
    }
    if (cfg.t_final) out.t_final = *cfg.t_final;
    if (cfg.eval_time) out.t_final = *cfg.eval_time;
    return out;
}

}  // namespace mvd
