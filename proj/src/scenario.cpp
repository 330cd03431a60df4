#include "ptesc/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "ptesc/errors.hpp"
#include "ptesc/output.hpp"

namespace ptesc {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json scenario_json(const ScenarioConfig& cfg) {
    const EscParams& p = cfg.params;
    json params = {{"T", p.pt.T},         {"stop_fraction", p.pt.stop_fraction},
                   {"A", p.A},            {"omega", p.omega},
                   {"omega_h", p.omega_h}, {"omega_l", p.omega_l},
                   {"k", p.k},            {"tau_I", p.tau_I},
                   {"u_hat0", p.u_hat0}};
    params["gain_clamp"] = p.pt.gain_clamp ? json(*p.pt.gain_clamp) : json(nullptr);
    const IntegratorConfig& ic = cfg.integrator;
    json integrator = {{"method", to_string(ic.method)},
                       {"rtol", ic.rtol},
                       {"atol", ic.atol},
                       {"dither_resolution", ic.dither_resolution},
                       {"max_step_absolute", ic.max_step_absolute},
                       {"quiet_tau_step", ic.quiet_tau_step},
                       {"output_samples", ic.output_samples},
                       {"record_stride", ic.record_stride},
                       {"divergence_bound", ic.divergence_bound}};
    return {{"mode", to_string(cfg.mode)},
            {"plant", cfg.plant},
            {"x0", cfg.x0},
            {"params", params},
            {"integrator", integrator}};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string cell_dir_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cell_%05zu", index);
    return buf;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    RunResult r;
    r.config = cfg;
    const PlantModel plant = plants::by_name(cfg.plant);
    r.warnings = ordering_warnings(cfg.params);
    r.trajectory = simulate(cfg.mode, plant, cfg.params, cfg.x0, cfg.integrator);

    try {
        r.optimum = to_optimum(resolve_optimum(plant, cfg.params.k));
    } catch (const Error& e) {
        r.optimum_error = e.what();
    }
    if (!r.trajectory.completed() || r.trajectory.size() < 2) return r;

    if (r.optimum) {
        r.convergence = convergence_report(r.trajectory, *r.optimum);
        r.envelope = decay_envelope_check(r.trajectory, r.optimum->y, cfg.params.pt);
    }
    if (cfg.mode == Mode::Esc) r.estimate_error = estimate_tracking(r.trajectory, plant, 0.5);
    return r;
}

std::string report_json(const RunResult& result) {
    const Trajectory& tr = result.trajectory;
    json j;
    j["scenario"] = scenario_json(result.config);
    j["status"] = tr.completed() ? "completed" : "diverged";
    j["diverged_at"] = number(tr.diverged_at);
    j["reason"] = tr.reason;
    j["samples"] = tr.size();
    j["t_end"] = tr.size() > 0 ? number(tr.t.back()) : json(nullptr);
    j["t_stop"] = result.config.params.pt.t_stop();
    if (tr.size() > 0) {
        const std::size_t last = tr.size() - 1;
        json final_state = json::array();
        for (std::size_t k = 0; k < tr.n; ++k) final_state.push_back(number(tr.x[k][last]));
        j["final"] = {{"x", final_state},
                      {"u_hat", number(tr.u_hat[last])},
                      {"y", number(tr.y[last])},
                      {"xi", number(tr.xi[last])}};
    }
    if (result.optimum) {
        j["optimum"] = {{"x", result.optimum->x}, {"u", result.optimum->u}, {"y", result.optimum->y}};
    } else {
        j["optimum"] = nullptr;
        j["optimum_error"] = result.optimum_error;
    }
    if (result.convergence) {
        const auto& c = *result.convergence;
        j["convergence"] = {{"terminal_state_error", number(c.terminal_state_error)},
                            {"terminal_input_error", number(c.terminal_input_error)},
                            {"terminal_cost_excess", number(c.terminal_cost_excess)},
                            {"reduction_ratio", number(c.reduction_ratio)},
                            {"window_mean_cost_excess", number(c.window_mean_cost_excess)},
                            {"window_mean_state_error", number(c.window_mean_state_error)},
                            {"window_mean_input_error", number(c.window_mean_input_error)},
                            {"window_samples", c.window_samples}};
    } else {
        j["convergence"] = nullptr;
    }
    if (result.envelope) {
        const auto& e = *result.envelope;
        j["envelope"] = {{"passes", e.passes},
                         {"fitted_rate", number(e.fitted_rate)},
                         {"points_used", e.points_used},
                         {"trivial", e.trivial}};
    } else {
        j["envelope"] = nullptr;
    }
    j["estimate_error"] = result.estimate_error ? number(*result.estimate_error) : json(nullptr);
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

std::vector<std::string> write_outputs(const RunResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());

    const OutputConfig& out = result.config.outputs;
    std::vector<std::string> files;
    if (out.csv) {
        const std::string path = (fs::path(dir) / "trajectory.csv").string();
        write_trajectory_csv(path, result.trajectory);
        files.push_back(path);
    }
    if (out.json) {
        const std::string path = (fs::path(dir) / "report.json").string();
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << report_json(result);
        if (!os) throw Error("write failed for '" + path + "'");
        files.push_back(path);
    }
    if (out.gnuplot) {
        PlotOptions po;
        po.title = result.config.plant + " (" + to_string(result.config.mode) + ")";
        if (result.optimum) po.y_star = result.optimum->y;
        files.push_back(emit_plots(result.trajectory, dir, po));
    }
    return files;
}

SweepAxis parse_sweep_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("sweep axis '" + spec + "': expected field=v1,v2,...");
    }
    SweepAxis axis;
    axis.field = qualify_field(spec.substr(0, eq));
    std::string current;
    int depth = 0;
    for (char c : spec.substr(eq + 1)) {
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
        if (c == ',' && depth == 0) {
            axis.values.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    axis.values.push_back(current);
    for (const auto& v : axis.values) {
        if (v.find_first_not_of(" \t") == std::string::npos) {
            throw ConfigError("sweep axis '" + spec + "': empty value");
        }
    }
    return axis;
}

bool SweepResult::any_ran() const noexcept {
    return std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.result.has_value(); });
}

SweepResult sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes,
                  const SweepOptions& options) {
    SweepResult out;
    out.axes = axes;
    std::size_t total = 1;
    for (auto& a : out.axes) {
        a.field = qualify_field(a.field);
        if (a.values.empty()) throw ConfigError("sweep axis " + a.field + " has no values");
        if (total > options.max_cells / a.values.size()) {
            throw ConfigError("sweep has more than " + std::to_string(options.max_cells) + " cells");
        }
        total *= a.values.size();
    }

    out.cells.resize(total);
    for (std::size_t c = 0; c < total; ++c) {
        SweepCell& cell = out.cells[c];
        cell.index = c;
        cell.values.resize(out.axes.size());
        std::size_t rem = c;
        for (std::size_t a = out.axes.size(); a-- > 0;) {
            const auto& vals = out.axes[a].values;
            cell.values[a] = vals[rem % vals.size()];
            rem /= vals.size();
        }
    }

    auto run_cell = [&](SweepCell& cell) {
        try {
            std::vector<FieldOverride> overrides;
            for (std::size_t a = 0; a < out.axes.size(); ++a) {
                overrides.push_back({out.axes[a].field, cell.values[a]});
            }
            RunResult r = run_scenario(with_overrides(base, overrides));
            if (options.cell_output_dir) {
                write_outputs(r, (std::filesystem::path(*options.cell_output_dir) /
                                  cell_dir_name(cell.index)).string());
            }
            if (!options.keep_trajectories) {
                Trajectory status_only;
                status_only.n = r.trajectory.n;
                status_only.status = r.trajectory.status;
                status_only.diverged_at = r.trajectory.diverged_at;
                status_only.reason = r.trajectory.reason;
                r.trajectory = std::move(status_only);
            }
            cell.result = std::move(r);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t c = next++; c < total; c = next++) run_cell(out.cells[c]);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::string sweep_summary_csv(const SweepResult& result) {
    std::string s = "cell";
    for (const auto& a : result.axes) s += "," + a.field;
    s += ",status,diverged_at,terminal_state_error,terminal_input_error,terminal_cost_excess,"
         "reduction_ratio,window_mean_cost_excess,window_mean_state_error,"
         "window_mean_input_error,envelope_passes,envelope_rate,estimate_error,error\n";
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
    for (const auto& cell : result.cells) {
        s += std::to_string(cell.index);
        for (const auto& v : cell.values) s += "," + csv_field(v);
        if (!cell.result) {
            s += ",error,,,,,,,,,,,," + csv_field(cell.error) + "\n";
            continue;
        }
        const RunResult& r = *cell.result;
        s += r.trajectory.completed() ? ",completed" : ",diverged";
        s += "," + num(r.trajectory.diverged_at);
        if (r.convergence) {
            const auto& c = *r.convergence;
            for (double v : {c.terminal_state_error, c.terminal_input_error, c.terminal_cost_excess,
                             c.reduction_ratio, c.window_mean_cost_excess,
                             c.window_mean_state_error, c.window_mean_input_error}) {
                s += "," + num(v);
            }
        } else {
            s += ",,,,,,,";
        }
        if (r.envelope) {
            s += std::string(",") + (r.envelope->passes ? "true" : "false") + "," +
                 num(r.envelope->fitted_rate);
        } else {
            s += ",,";
        }
        s += "," + (r.estimate_error ? num(*r.estimate_error) : std::string());
        std::string note = r.trajectory.completed() ? r.optimum_error : r.trajectory.reason;
        s += "," + csv_field(note) + "\n";
    }
    return s;
}

}  // namespace ptesc
