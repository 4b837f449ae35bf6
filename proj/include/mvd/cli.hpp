#pragma once

// Command-line front end shared by the `mvd` executable and its tests.
//
//   mvd list
//   mvd run          --config FILE [--out DIR]
//   mvd convergence  --config FILE [--out DIR] [--levels N]
//   mvd consistency  --config FILE [--out DIR] [--levels N]
//   mvd stability    --config FILE [--out DIR] [--levels N]
//   mvd examples ID  [--levels N] [--m-prime M] [--r R] [--t-final T] [--out DIR]
//
// Exit codes: 0 success, 1 usage/config error, 2 stability threshold
// violated, 3 non-finite state, 4 any other failure.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mvd/config.hpp"
#include "mvd/errors.hpp"
#include "mvd/grid.hpp"
#include "mvd/harness.hpp"
#include "mvd/model.hpp"
#include "mvd/solver.hpp"

namespace mvd::cli {

enum ExitCode : int { ok = 0, config_error = 1, stability_error = 2, blow_up = 3, failure = 4 };

/// Files produced by one command; nothing reaches the disk until commit().
class OutputSet {
public:
    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
    const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

    /// Writes every file to a temporary name first, then renames into place.
    void commit(const std::filesystem::path& dir) const {
        namespace fs = std::filesystem;
        fs::create_directories(dir);
        std::vector<std::pair<fs::path, fs::path>> staged;
        for (const auto& [name, content] : files_) {
            const fs::path final_path = dir / name;
            const fs::path tmp = dir / (name + ".tmp");
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            os << content;
            os.close();
            if (!os) {
                for (const auto& s : staged) fs::remove(s.first);
                fs::remove(tmp);
                throw Error("could not write " + tmp.string());
            }
            staged.emplace_back(tmp, final_path);
        }
        for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

namespace detail {

template <class Rows, class Writer>
std::string render(const Rows& rows, Writer writer) {
    std::ostringstream os;
    writer(os, std::span(rows));
    return os.str();
}

inline std::string slice_csv(const SolutionHistory& hist, const std::optional<ExactSolution>& exact) {
    std::ostringstream os;
    write_slice_csv(os, hist, exact);
    return os.str();
}

inline void print_convergence(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    for (const auto& r : rows) {
        out << "  h=" << format_double(r.h) << "  N=" << r.n_steps << "  err_inf=" << format_double(r.err_inf);
        if (r.order_inf) out << "  order=" << format_double(*r.order_inf);
        out << '\n';
    }
}

/// Runs the requested study and collects its output files under `prefix`.
inline OutputSet execute(const ResolvedProblem& rp, const GridSpec& base, StudyKind study, std::size_t levels,
                         double perturbation_scale, const std::string& prefix, std::ostream& out) {
    OutputSet files;
    out << rp.label << ": h=" << format_double(base.h()) << " k=" << format_double(base.k())
        << " N=" << base.n_steps() << " t_final=" << format_double(base.t_final()) << '\n';

    switch (study) {
        case StudyKind::single: {
            const auto hist = run(rp.problem, base);
            files.add(prefix + "slice.csv", slice_csv(hist, rp.exact));
            if (rp.exact) {
                const std::vector<ConvergenceRow> rows{
                    mvd::detail::error_row(restrict_to_grid(rp.exact->u, base) - hist)};
                files.add(prefix + "convergence.csv", render(rows, write_convergence_csv));
                print_convergence(out, rows);
            }
            break;
        }
        case StudyKind::convergence:
            if (rp.exact) {
                const auto rows = convergence_study(rp.problem, *rp.exact, base, levels);
                files.add(prefix + "slice.csv", slice_csv(run(rp.problem, base), rp.exact));
                files.add(prefix + "convergence.csv", render(rows, write_convergence_csv));
                print_convergence(out, rows);
                break;
            }
            [[fallthrough]];
        case StudyKind::self_convergence: {
            if (levels < 3) throw InvalidParameter("self-convergence needs --levels >= 3");
            const auto rows = self_convergence_study(rp.problem, base, levels);
            files.add(prefix + "slice.csv", slice_csv(run(rp.problem, base), std::nullopt));
            files.add(prefix + "self_convergence.csv", render(rows, write_convergence_csv));
            print_convergence(out, rows);
            break;
        }
        case StudyKind::consistency: {
            if (!rp.exact) throw InvalidParameter("a consistency study needs an exact solution");
            const auto rows = consistency_study(rp.problem, *rp.exact, base, levels);
            files.add(prefix + "consistency.csv", render(rows, write_consistency_csv));
            for (const auto& r : rows) out << "  h=" << format_double(r.h) << "  residual=" << format_double(r.residual) << '\n';
            break;
        }
        case StudyKind::stability: {
            const auto rows = stability_probe(rp.problem, rp.exact, base, levels, perturbation_scale);
            files.add(prefix + "stability.csv", render(rows, write_stability_csv));
            for (const auto& r : rows) {
                out << "  h=" << format_double(r.h) << "  ratio=";
                out << (r.ratio ? format_double(*r.ratio) : std::string("DegenerateRatio")) << '\n';
            }
            break;
        }
    }
    return files;
}

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(0, "cannot open config file '" + path + "'");
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Entry point; returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Explicit finite-difference solver for age-structured diffusion with a nonlocal Robin boundary"};
    app.require_subcommand(1);

    app.add_subcommand("list", "List the built-in problems");

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> levels;

    auto* run_cmd = app.add_subcommand("run", "Run the study named in a config file");
    std::vector<std::pair<CLI::App*, std::optional<StudyKind>>> config_cmds{{run_cmd, std::nullopt}};
    config_cmds.emplace_back(app.add_subcommand("convergence", "Convergence study (self-convergence without an exact solution)"),
                             StudyKind::convergence);
    config_cmds.emplace_back(app.add_subcommand("consistency", "Local discretization error study"), StudyKind::consistency);
    config_cmds.emplace_back(app.add_subcommand("stability", "Perturbation-pair stability probe"), StudyKind::stability);
    for (auto& [cmd, kind] : config_cmds) {
        cmd->add_option("--config,-c", config_path, "Config file")->required();
        cmd->add_option("--out,-o", out_dir, "Output directory (overrides output_dir)");
        if (kind) cmd->add_option("--levels", levels, "Number of refinement levels")->check(CLI::PositiveNumber);
    }

    std::string example_id;
    std::optional<std::size_t> ex_m_prime;
    std::optional<double> ex_r;
    std::optional<double> ex_t_final;
    auto* examples_cmd = app.add_subcommand("examples", "Reproduce a built-in example");
    examples_cmd->add_option("id", example_id, "Built-in problem id")->required();
    examples_cmd->add_option("--levels", levels, "Number of refinement levels")->check(CLI::PositiveNumber);
    examples_cmd->add_option("--m-prime", ex_m_prime, "Refinement index of the base grid")->check(CLI::PositiveNumber);
    examples_cmd->add_option("--r", ex_r, "Parabolic mesh ratio k/h^2")->check(CLI::PositiveNumber);
    examples_cmd->add_option("--t-final", ex_t_final, "Evaluation time")->check(CLI::PositiveNumber);
    examples_cmd->add_option("--out,-o", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }

    try {
        if (app.got_subcommand("list")) {
            for (auto id : builtin_ids) out << id << "  " << builtin_problem(id).description << '\n';
            return ok;
        }

        if (app.got_subcommand(examples_cmd)) {
            auto b = builtin_problem(example_id);
            ResolvedProblem rp{b.problem, b.exact, ex_t_final.value_or(b.t_final), b.id};
            const auto base = build_grid(rp.problem.a_dagger, ex_m_prime.value_or(7), ex_r.value_or(0.4), rp.t_final);
            const StudyKind kind = rp.exact ? StudyKind::convergence : StudyKind::self_convergence;
            const auto files = detail::execute(rp, base, kind, levels.value_or(3), 1.0, b.id + "_", out);
            files.commit(out_dir.value_or("out"));
            return ok;
        }

        for (auto& [cmd, kind] : config_cmds) {
            if (!app.got_subcommand(cmd)) continue;
            RunConfig cfg = parse_config(detail::read_file(config_path));
            if (kind) cfg.study = *kind;
            if (levels) cfg.levels = *levels;
            const ResolvedProblem rp = resolve_problem(cfg);
            const auto base = build_grid(rp.problem.a_dagger, cfg.m_prime, cfg.r, rp.t_final);
            const auto files = detail::execute(rp, base, cfg.study, cfg.levels, cfg.perturbation_scale, "", out);
            files.commit(out_dir.value_or(cfg.output_dir));
            return ok;
        }
        return config_error;
    } catch (const StabilityViolation& e) {
        err << "error: " << e.what() << "\n  lambda=" << format_double(e.lambda()) << " r=" << format_double(e.r())
            << " lambda+2r=" << format_double(e.sum()) << '\n';
        return stability_error;
    } catch (const NonFiniteState& e) {
        err << "error: " << e.what() << '\n';
        return blow_up;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const UnknownProblem& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
}

}  // namespace mvd::cli
