#include "chemflow/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chemflow/config.hpp"
#include "chemflow/driver.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/io.hpp"

namespace chemflow {

namespace {

namespace fs = std::filesystem;

constexpr int kExitClean = 0;
constexpr int kExitInvariant = 2;
constexpr int kExitConfig = 3;
constexpr int kExitSolver = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Periodic output driven from the sample hook: records CSV rewritten at
/// every sample so an interrupted run leaves a consistent pair of
/// (records, checkpoint) files behind.
struct OutputWriter {
    const RunConfig& rc;
    int snapshot_index = 0;
    double next_snapshot;
    double next_checkpoint;

    explicit OutputWriter(const RunConfig& cfg) : rc(cfg) {
        next_snapshot = rc.snapshot_every > 0.0 ? rc.snapshot_every : -1.0;
        next_checkpoint = rc.checkpoint_every > 0.0 ? rc.checkpoint_every : -1.0;
    }

    void reset_from(double t) {
        if (rc.snapshot_every > 0.0) {
            snapshot_index = 0;
            next_snapshot = rc.snapshot_every;
            while (next_snapshot <= t * (1.0 + 1e-12)) {
                next_snapshot += rc.snapshot_every;
                ++snapshot_index;
            }
        }
        if (rc.checkpoint_every > 0.0) {
            next_checkpoint = rc.checkpoint_every;
            while (next_checkpoint <= t * (1.0 + 1e-12)) next_checkpoint += rc.checkpoint_every;
        }
    }

    void operator()(const SimState& state, const std::vector<DiagnosticsRecord>& records) {
        write_records(records, rc.params.p_norms, rc.output_dir + "/records.csv");
        const double tol = 1e-9 * std::max(1.0, state.t);
        if (next_snapshot >= 0.0 && state.t >= next_snapshot - tol) {
            char name[64];
            std::snprintf(name, sizeof name, "/snapshot_%04d.chfl", snapshot_index++);
            write_snapshot(state, rc.output_dir + name);
            while (next_snapshot <= state.t + tol) next_snapshot += rc.snapshot_every;
        }
        if (next_checkpoint >= 0.0 && state.t >= next_checkpoint - tol) {
            write_snapshot(state, rc.output_dir + "/checkpoint.chfl");
            while (next_checkpoint <= state.t + tol) next_checkpoint += rc.checkpoint_every;
        }
    }
};

int finish_run(const RunConfig& rc, const RunResult& res) {
    write_records(res.records, rc.params.p_norms, rc.output_dir + "/records.csv");
    if (res.aborted) {
        write_snapshot(res.final_state, rc.output_dir + "/postmortem.chfl");
        std::cerr << "run aborted at t = " << fmt(res.final_state.t) << "\n";
    } else {
        write_snapshot(res.final_state, rc.output_dir + "/final.chfl");
        write_snapshot(res.final_state, rc.output_dir + "/checkpoint.chfl");
    }
    std::cout << "scenario " << rc.scenario << ": t = " << fmt(res.final_state.t) << ", "
              << res.records.size() << " records, " << res.violations.size() << " violations, "
              << fmt(res.wall_time) << " s\n";
    for (const auto& v : res.violations)
        std::cerr << "violation at t = " << fmt(v.t) << ": " << v.what << "\n";
    return res.violations.empty() ? kExitClean : kExitInvariant;
}

int cmd_run(const std::string& config_path) {
    RunConfig rc = parse_config_file(config_path);
    fs::create_directories(rc.output_dir);
    {
        std::ofstream cfg(rc.output_dir + "/config_used.txt", std::ios::trunc);
        cfg << serialize(rc);
    }
    OutputWriter writer(rc);
    RunResult res = run(rc.params, std::ref(writer));
    return finish_run(rc, res);
}

int cmd_resume(const std::string& config_path, std::string checkpoint_path) {
    RunConfig rc = parse_config_file(config_path);
    if (checkpoint_path.empty()) checkpoint_path = rc.output_dir + "/checkpoint.chfl";
    SimState state = read_snapshot(checkpoint_path);
    RecordsFile prior = read_records(rc.output_dir + "/records.csv");
    OutputWriter writer(rc);
    writer.reset_from(state.t);
    RunResult res = resume_run(rc.params, std::move(state), std::move(prior.records),
                               std::ref(writer));
    return finish_run(rc, res);
}

int cmd_oracle(double kappa, double mu, double n0, double c0, double eps, double t) {
    const auto [n, c] = homogeneous_oracle(n0, c0, eps, t, kappa, mu);
    std::cout << "n(" << fmt(t) << ") = " << fmt(n) << "\n";
    std::cout << "c(" << fmt(t) << ") = " << fmt(c) << "\n";
    return kExitClean;
}

int cmd_eps_study(const std::string& config_path, const std::string& eps_csv) {
    RunConfig rc = parse_config_file(config_path);
    std::vector<double> eps;
    {
        std::istringstream in(eps_csv);
        std::string item;
        while (std::getline(in, item, ',')) eps.push_back(std::strtod(item.c_str(), nullptr));
    }
    fs::create_directories(rc.output_dir);
    EpsStudyResult res = epsilon_study(rc.params, eps);

    std::ostringstream out;
    out << "eps_hi,eps_lo,d_n,d_c,d_u\n";
    for (std::size_t j = 0; j < res.distances.size(); ++j)
        out << fmt(res.eps[j]) << ',' << fmt(res.eps[j + 1]) << ',' << fmt(res.distances[j][0])
            << ',' << fmt(res.distances[j][1]) << ',' << fmt(res.distances[j][2]) << "\n";
    const std::string table = out.str();
    std::ofstream(rc.output_dir + "/eps_study.csv", std::ios::trunc) << table;
    std::cout << table;

    bool violations = false;
    for (const auto& v : res.per_run_violations) violations = violations || !v.empty();
    const bool cauchy = res.strictly_decreasing[0] && res.strictly_decreasing[1] &&
                        res.strictly_decreasing[2];
    if (!cauchy) std::cerr << "pairwise distances are not strictly decreasing\n";
    if (violations) std::cerr << "per-eps runs reported violations\n";
    return (cauchy && !violations) ? kExitClean : kExitInvariant;
}

int cmd_check(const std::string& records_path) {
    RecordsFile rf = read_records(records_path);
    CheckReport rep = check_records(rf.records);
    if (rep.ok) {
        std::cout << records_path << ": " << rf.records.size() << " records, all invariants hold\n";
        return kExitClean;
    }
    for (const auto& p : rep.problems) std::cerr << p << "\n";
    return kExitInvariant;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"finite-difference chemotaxis-fluid simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string records_path;
    std::string checkpoint_path;
    std::string eps_csv = "1e-1,1e-2,1e-3,1e-4";
    double o_kappa = 1.0, o_mu = 1.0, o_n0 = 1.0, o_c0 = 1.0, o_eps = 1e-3, o_t = 1.0;

    auto* c_run = app.add_subcommand("run", "run a full simulation from a config file");
    c_run->add_option("config", config_path, "config file")->required();

    auto* c_oracle = app.add_subcommand("oracle", "print the homogeneous closed-form solution");
    c_oracle->add_option("--kappa", o_kappa, "growth rate");
    c_oracle->add_option("--mu", o_mu, "overcrowding coefficient");
    c_oracle->add_option("--n0", o_n0, "initial density");
    c_oracle->add_option("--c0", o_c0, "initial oxygen");
    c_oracle->add_option("--eps", o_eps, "regularization");
    c_oracle->add_option("--t", o_t, "evaluation time");

    auto* c_eps = app.add_subcommand("eps-study", "run the eps-family convergence study");
    c_eps->add_option("config", config_path, "config file")->required();
    c_eps->add_option("--eps-list", eps_csv, "comma-separated descending eps values");

    auto* c_check = app.add_subcommand("check", "re-assert diagnostics invariants offline");
    c_check->add_option("records", records_path, "records CSV")->required();

    auto* c_resume = app.add_subcommand("resume", "continue a run from its checkpoint");
    c_resume->add_option("config", config_path, "config file")->required();
    c_resume->add_option("--checkpoint", checkpoint_path, "checkpoint file (default: <output.dir>/checkpoint.chfl)");

    try {
        app.parse(argc, argv);
        if (c_run->parsed()) return cmd_run(config_path);
        if (c_oracle->parsed()) return cmd_oracle(o_kappa, o_mu, o_n0, o_c0, o_eps, o_t);
        if (c_eps->parsed()) return cmd_eps_study(config_path, eps_csv);
        if (c_check->parsed()) return cmd_check(records_path);
        if (c_resume->parsed()) return cmd_resume(config_path, checkpoint_path);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitClean : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace chemflow
