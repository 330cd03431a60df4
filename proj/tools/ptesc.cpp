// ptesc: command-line front end for prescribed-time extremum seeking runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptesc/analysis.hpp"
#include "ptesc/config.hpp"
#include "ptesc/errors.hpp"
#include "ptesc/output.hpp"
#include "ptesc/scenario.hpp"

namespace {

using namespace ptesc;
using nlohmann::json;

struct CommonFlags {
    std::string out;
    std::string mode;
    std::size_t stride = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--out", f.out, "Output directory (overrides outputs.dir)");
    cmd->add_option("--mode", f.mode, "Simulation mode")
        ->check(CLI::IsMember({"esc", "target", "averaged"}));
    cmd->add_option("--stride", f.stride, "Keep every Nth output sample")
        ->check(CLI::PositiveNumber);
}

ScenarioConfig load_with_flags(const std::string& path, const CommonFlags& f) {
    std::vector<FieldOverride> overrides;
    if (!f.mode.empty()) overrides.push_back({"mode", f.mode});
    if (f.stride > 0) overrides.push_back({"integrator.record_stride", std::to_string(f.stride)});
    ScenarioConfig cfg = load_config(path, overrides);
    if (!f.out.empty()) cfg.outputs.dir = f.out;
    return cfg;
}

void print_run_summary(const RunResult& r) {
    const Trajectory& tr = r.trajectory;
    std::cout << r.config.plant << " [" << to_string(r.config.mode) << "] ";
    if (tr.completed()) {
        std::cout << "completed at t = " << format_double(tr.t.back());
    } else {
        std::cout << "DIVERGED at t = " << format_double(tr.diverged_at) << ": " << tr.reason;
    }
    std::cout << '\n';
    if (r.convergence) {
        const auto& c = *r.convergence;
        std::cout << "  terminal state error   " << c.terminal_state_error << '\n'
                  << "  terminal input error   " << c.terminal_input_error << '\n'
                  << "  reduction ratio        " << c.reduction_ratio << '\n'
                  << "  window mean excess     " << c.window_mean_cost_excess << '\n';
    }
    if (!r.optimum_error.empty()) std::cout << "  optimum unavailable: " << r.optimum_error << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const std::string& path, const CommonFlags& flags) {
    const ScenarioConfig cfg = load_with_flags(path, flags);
    const RunResult r = run_scenario(cfg);
    print_run_summary(r);
    for (const auto& f : write_outputs(r, cfg.outputs.dir)) std::cout << "  wrote " << f << '\n';
    return r.exit_code();
}

int cmd_sweep(const std::string& path, const CommonFlags& flags,
              const std::vector<std::string>& sets, SweepOptions options, bool cell_outputs) {
    const ScenarioConfig cfg = load_with_flags(path, flags);
    std::vector<SweepAxis> axes;
    for (const auto& s : sets) axes.push_back(parse_sweep_axis(s));
    if (cell_outputs) options.cell_output_dir = cfg.outputs.dir;
    const SweepResult result = sweep(cfg, axes, options);

    std::filesystem::create_directories(cfg.outputs.dir);
    const std::string summary = (std::filesystem::path(cfg.outputs.dir) / "summary.csv").string();
    std::ofstream os(summary, std::ios::binary | std::ios::trunc);
    os << sweep_summary_csv(result);
    if (!os) throw Error("write failed for '" + summary + "'");

    std::size_t completed = 0, diverged = 0, failed = 0;
    for (const auto& c : result.cells) {
        if (!c.result) {
            ++failed;
            std::cerr << "cell " << c.index << ": " << c.error << '\n';
        } else if (c.result->trajectory.completed()) {
            ++completed;
        } else {
            ++diverged;
        }
    }
    std::cout << result.cells.size() << " cells: " << completed << " completed, " << diverged
              << " diverged, " << failed << " failed\n  wrote " << summary << '\n';
    return result.any_ran() ? kExitCompleted : kExitUsage;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const CommonFlags& flags) {
    const RunResult a = run_scenario(load_with_flags(path_a, flags));
    const RunResult b = run_scenario(load_with_flags(path_b, flags));
    print_run_summary(a);
    print_run_summary(b);
    if (!a.trajectory.completed() || !b.trajectory.completed()) {
        std::cerr << "error: cannot compare a diverged run\n";
        return kExitDiverged;
    }
    const unsigned all = kSignalState | kSignalInput | kSignalOutput | kSignalEstimate | kSignalIntegral;
    const TrajectoryDifference d = compare_trajectories(a.trajectory, b.trajectory, all);
    json j = {{"a", path_a}, {"b", path_b}, {"sup_error", d.sup_error}, {"rms_error", d.rms_error}};
    json signals = json::array();
    for (const auto& s : d.per_signal) {
        signals.push_back({{"signal", s.name}, {"sup_error", s.sup_error}, {"rms_error", s.rms_error}});
    }
    j["signals"] = signals;
    std::cout << j.dump(2) << '\n';
    if (!flags.out.empty()) {
        std::filesystem::create_directories(flags.out);
        const std::string path = (std::filesystem::path(flags.out) / "compare.json").string();
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << j.dump(2) << '\n';
        if (!os) throw Error("write failed for '" + path + "'");
    }
    return kExitCompleted;
}

int cmd_validate(const std::string& path, std::size_t samples) {
    const ScenarioConfig cfg = load_config(path);
    const PlantModel plant = plants::by_name(cfg.plant);
    const StateBox box = cfg.box ? *cfg.box : plant.box;
    const AssumptionReport rep = check_assumptions(plant, box, cfg.params.k, samples);

    json violations = json::array();
    for (const auto& v : rep.violations) {
        violations.push_back({{"kind", to_string(v.kind)}, {"x", v.x}, {"value", v.value}});
    }
    json j = {{"plant", cfg.plant},
              {"box", {{"lower", box.lower}, {"upper", box.upper}}},
              {"samples", rep.samples},
              {"x_star", rep.x_star},
              {"u_star", rep.u_star},
              {"h_star", rep.h_star},
              {"alpha_h_min", rep.alpha_h_min},
              {"beta1", rep.beta1},
              {"beta2", rep.beta2},
              {"beta3", rep.beta3},
              {"beta4", rep.beta4},
              {"alpha1_min", rep.alpha1_min},
              {"violation_count", rep.violations.size()},
              {"violations", violations},
              {"warnings", ordering_warnings(cfg.params)}};
    std::cout << j.dump(2) << '\n';
    return kExitCompleted;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prescribed-time dual-mode extremum seeking simulator"};
    app.footer(
        "Exit codes:\n"
        "  0  run completed (sweep: at least one cell ran)\n"
        "  1  usage, configuration or IO error; nothing is written for a bad config\n"
        "  2  the simulation diverged; partial outputs are still written");
    app.require_subcommand(1);

    CommonFlags flags;
    std::string cfg_a, cfg_b;

    auto* run = app.add_subcommand("run", "Simulate one scenario and write trajectory.csv, report.json, plots.gp");
    run->add_option("config", cfg_a, "Scenario file")->required();
    add_common(run, flags);

    std::vector<std::string> sets;
    SweepOptions sweep_opts;
    bool cell_outputs = false;
    auto* sw = app.add_subcommand("sweep", "Run the Cartesian product of field overrides and write summary.csv");
    sw->add_option("config", cfg_a, "Scenario file")->required();
    sw->add_option("--set", sets, "Override axis field=v1,v2,... (repeatable)");
    sw->add_option("--workers", sweep_opts.workers, "Concurrent cells (0: all cores)");
    sw->add_option("--max-cells", sweep_opts.max_cells, "Refuse sweeps larger than this");
    sw->add_flag("--cell-outputs", cell_outputs, "Also write every cell's run outputs");
    add_common(sw, flags);

    auto* cmp = app.add_subcommand("compare", "Run two scenarios and report sup/RMS differences");
    cmp->add_option("config_a", cfg_a, "First scenario")->required();
    cmp->add_option("config_b", cfg_b, "Second scenario")->required();
    add_common(cmp, flags);

    std::size_t samples = 4000;
    auto* val = app.add_subcommand("validate", "Load a scenario and audit the plant assumptions");
    val->add_option("config", cfg_a, "Scenario file")->required();
    val->add_option("--samples", samples, "Audit sample count (>= 100)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run) return cmd_run(cfg_a, flags);
        if (*sw) return cmd_sweep(cfg_a, flags, sets, sweep_opts, cell_outputs);
        if (*cmp) return cmd_compare(cfg_a, cfg_b, flags);
        if (*val) return cmd_validate(cfg_a, samples);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
