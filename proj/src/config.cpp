#include "ptesc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "ptesc/errors.hpp"

namespace ptesc {

namespace {

struct Section {
    const char* name;
    std::vector<std::string> keys;
};

const std::vector<Section>& schema() {
    static const std::vector<Section> s = {
        {"plant", {"name", "x0", "box"}},
        {"params",
         {"T", "stop_fraction", "gain_clamp", "A", "omega", "omega_h", "omega_l", "k", "tau_I",
          "u_hat0"}},
        {"integrator",
         {"method", "rtol", "atol", "dither_resolution", "max_step_absolute", "quiet_tau_step",
          "output_samples", "record_stride", "divergence_bound"}},
        {"outputs", {"dir", "formats"}},
    };
    return s;
}

const Section* find_section(const std::string& name) {
    for (const auto& s : schema()) {
        if (name == s.name) return &s;
    }
    return nullptr;
}

ConfigError at(const YAML::Node& node, const std::string& msg) {
    const YAML::Mark m = node.Mark();
    return ConfigError(msg, m.line, m.column);
}

double read_double(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw at(n, field + ": expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::BadConversion&) {
        throw at(n, field + ": expected a number, got '" + n.Scalar() + "'");
    }
}

long long read_integer(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw at(n, field + ": expected an integer");
    try {
        return n.as<long long>();
    } catch (const YAML::BadConversion&) {
        throw at(n, field + ": expected an integer, got '" + n.Scalar() + "'");
    }
}

std::size_t read_count(const YAML::Node& n, const std::string& field) {
    const long long v = read_integer(n, field);
    if (v < 0) throw at(n, field + " must be >= 0");
    return static_cast<std::size_t>(v);
}

std::string read_string(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw at(n, field + ": expected a string");
    return n.Scalar();
}

std::vector<double> read_vector(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence()) throw at(n, field + ": expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        out.push_back(read_double(n[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void reject_unknown(const YAML::Node& map, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw at(kv.first, "unknown key '" + key + "' in " + where + " (expected one of: " +
                                   list + ")");
        }
    }
}

YAML::Node require_map(const YAML::Node& n, const std::string& where) {
    if (!n.IsMap()) throw at(n, where + ": expected a mapping");
    return n;
}

Method parse_method(const YAML::Node& n) {
    const std::string s = read_string(n, "integrator.method");
    if (s == "rk4") return Method::Rk4;
    if (s == "rk45") return Method::Rk45;
    throw at(n, "integrator.method: expected rk4 or rk45, got '" + s + "'");
}

// Builds the error for a failed check, positioned at section.key when the
// document carries it.
using Locate = std::function<ConfigError(const std::string& section, const std::string& key,
                                         const std::string& msg)>;

std::string first_word(const std::string& s) { return s.substr(0, s.find(' ')); }

void check(const ScenarioConfig& cfg, const Locate& fail) {
    const auto& names = plants::builtin_names();
    if (std::find(names.begin(), names.end(), cfg.plant) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw fail("plant", "name", "plant.name: unknown plant '" + cfg.plant +
                                        "' (builtin plants: " + list + ")");
    }
    const PlantModel plant = plants::by_name(cfg.plant);
    if (cfg.x0.size() != plant.n) {
        throw fail("plant", "x0", "plant.x0: expected " + std::to_string(plant.n) +
                                      " components for " + cfg.plant + ", got " +
                                      std::to_string(cfg.x0.size()));
    }
    for (double v : cfg.x0) {
        if (!std::isfinite(v)) throw fail("plant", "x0", "plant.x0: components must be finite");
    }
    if (cfg.box) {
        const auto& b = *cfg.box;
        if (b.lower.size() != plant.n || b.upper.size() != plant.n) {
            throw fail("plant", "box", "plant.box: lower and upper need " +
                                           std::to_string(plant.n) + " components");
        }
        for (std::size_t i = 0; i < plant.n; ++i) {
            if (!(b.lower[i] < b.upper[i])) {
                throw fail("plant", "box", "plant.box: lower must be < upper in every component");
            }
        }
    }
    try {
        cfg.params.validate(cfg.mode == Mode::Esc);
    } catch (const std::invalid_argument& e) {
        const std::string key = first_word(e.what());
        throw fail("params", key, "params." + key + ": " + e.what() + " (mode " +
                                      to_string(cfg.mode) + ")");
    }
    try {
        cfg.integrator.validate();
    } catch (const std::invalid_argument& e) {
        const std::string key = first_word(e.what());
        throw fail("integrator", key, "integrator." + key + ": " + e.what());
    }
    if (cfg.outputs.dir.empty()) throw fail("outputs", "dir", "outputs.dir must not be empty");
}

ScenarioConfig from_node(const YAML::Node& root) {
    if (!root.IsMap()) throw at(root, "scenario must be a mapping");
    std::vector<std::string> top = {"mode"};
    for (const auto& s : schema()) top.push_back(s.name);
    reject_unknown(root, top, "scenario");

    ScenarioConfig cfg;
    if (root["mode"]) {
        const YAML::Node n = root["mode"];
        try {
            cfg.mode = parse_mode(read_string(n, "mode"));
        } catch (const std::invalid_argument&) {
            throw at(n, "mode: expected esc, target or averaged, got '" + n.Scalar() + "'");
        }
    }

    for (const auto& s : schema()) {
        if (!root[s.name]) {
            if (std::string(s.name) == "plant") throw at(root, "missing section 'plant'");
            continue;
        }
        require_map(root[s.name], s.name);
        reject_unknown(root[s.name], s.keys, std::string("section '") + s.name + "'");
    }

    const YAML::Node plant = root["plant"];
    if (!plant["name"]) throw at(plant, "plant.name is required");
    cfg.plant = read_string(plant["name"], "plant.name");
    if (!plant["x0"]) throw at(plant, "plant.x0 is required");
    cfg.x0 = read_vector(plant["x0"], "plant.x0");
    if (plant["box"]) {
        const YAML::Node box = require_map(plant["box"], "plant.box");
        reject_unknown(box, {"lower", "upper"}, "plant.box");
        if (!box["lower"] || !box["upper"]) throw at(box, "plant.box needs lower and upper");
        cfg.box = StateBox{read_vector(box["lower"], "plant.box.lower"),
                           read_vector(box["upper"], "plant.box.upper")};
    }

    if (const YAML::Node p = root["params"]) {
        auto num = [&](const char* key, double& dst) {
            if (p[key]) dst = read_double(p[key], std::string("params.") + key);
        };
        num("T", cfg.params.pt.T);
        num("stop_fraction", cfg.params.pt.stop_fraction);
        if (p["gain_clamp"]) cfg.params.pt.gain_clamp = read_double(p["gain_clamp"], "params.gain_clamp");
        num("A", cfg.params.A);
        num("omega", cfg.params.omega);
        num("omega_h", cfg.params.omega_h);
        num("omega_l", cfg.params.omega_l);
        num("k", cfg.params.k);
        num("tau_I", cfg.params.tau_I);
        num("u_hat0", cfg.params.u_hat0);
    }

    if (const YAML::Node in = root["integrator"]) {
        auto& ic = cfg.integrator;
        auto num = [&](const char* key, double& dst) {
            if (in[key]) dst = read_double(in[key], std::string("integrator.") + key);
        };
        if (in["method"]) ic.method = parse_method(in["method"]);
        num("rtol", ic.rtol);
        num("atol", ic.atol);
        if (in["dither_resolution"]) {
            const long long v = read_integer(in["dither_resolution"], "integrator.dither_resolution");
            if (v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min()) {
                throw at(in["dither_resolution"], "integrator.dither_resolution out of range");
            }
            ic.dither_resolution = static_cast<int>(v);
        }
        num("max_step_absolute", ic.max_step_absolute);
        num("quiet_tau_step", ic.quiet_tau_step);
        if (in["output_samples"]) {
            ic.output_samples = read_count(in["output_samples"], "integrator.output_samples");
        }
        if (in["record_stride"]) {
            ic.record_stride = read_count(in["record_stride"], "integrator.record_stride");
        }
        num("divergence_bound", ic.divergence_bound);
    }

    if (const YAML::Node out = root["outputs"]) {
        if (out["dir"]) cfg.outputs.dir = read_string(out["dir"], "outputs.dir");
        if (const YAML::Node f = out["formats"]) {
            if (!f.IsSequence()) throw at(f, "outputs.formats: expected a list");
            cfg.outputs.csv = cfg.outputs.json = cfg.outputs.gnuplot = false;
            for (const auto& item : f) {
                const std::string s = read_string(item, "outputs.formats");
                if (s == "csv") cfg.outputs.csv = true;
                else if (s == "json") cfg.outputs.json = true;
                else if (s == "gnuplot") cfg.outputs.gnuplot = true;
                else throw at(item, "outputs.formats: unknown format '" + s + "' (csv, json, gnuplot)");
            }
        }
    }

    check(cfg, [&](const std::string& section, const std::string& key, const std::string& msg) {
        const YAML::Node sec = root[section];
        if (sec && sec.IsMap() && sec[key]) return at(sec[key], msg);
        if (sec) return at(sec, msg);
        return ConfigError(msg);
    });
    return cfg;
}

YAML::Node flow(const std::vector<double>& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (double d : v) n.push_back(d);
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node to_node(const ScenarioConfig& cfg) {
    YAML::Node root;
    root["mode"] = to_string(cfg.mode);
    YAML::Node plant;
    plant["name"] = cfg.plant;
    plant["x0"] = flow(cfg.x0);
    if (cfg.box) {
        plant["box"]["lower"] = flow(cfg.box->lower);
        plant["box"]["upper"] = flow(cfg.box->upper);
    }
    root["plant"] = plant;

    const EscParams& p = cfg.params;
    YAML::Node params;
    params["T"] = p.pt.T;
    params["stop_fraction"] = p.pt.stop_fraction;
    if (p.pt.gain_clamp) params["gain_clamp"] = *p.pt.gain_clamp;
    params["A"] = p.A;
    params["omega"] = p.omega;
    params["omega_h"] = p.omega_h;
    params["omega_l"] = p.omega_l;
    params["k"] = p.k;
    params["tau_I"] = p.tau_I;
    params["u_hat0"] = p.u_hat0;
    root["params"] = params;

    const IntegratorConfig& ic = cfg.integrator;
    YAML::Node in;
    in["method"] = to_string(ic.method);
    in["rtol"] = ic.rtol;
    in["atol"] = ic.atol;
    in["dither_resolution"] = ic.dither_resolution;
    in["max_step_absolute"] = ic.max_step_absolute;
    in["quiet_tau_step"] = ic.quiet_tau_step;
    in["output_samples"] = ic.output_samples;
    in["record_stride"] = ic.record_stride;
    in["divergence_bound"] = ic.divergence_bound;
    root["integrator"] = in;

    YAML::Node out;
    out["dir"] = cfg.outputs.dir;
    YAML::Node formats(YAML::NodeType::Sequence);
    if (cfg.outputs.csv) formats.push_back("csv");
    if (cfg.outputs.json) formats.push_back("json");
    if (cfg.outputs.gnuplot) formats.push_back("gnuplot");
    formats.SetStyle(YAML::EmitterStyle::Flow);
    out["formats"] = formats;
    root["outputs"] = out;
    return root;
}

std::string emit(const YAML::Node& root) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << root;
    return std::string(e.c_str()) + "\n";
}

void apply_override(YAML::Node& root, const FieldOverride& o) {
    const std::string q = qualify_field(o.field);
    YAML::Node v;
    try {
        v = YAML::Load(o.value);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("override " + q + "=" + o.value + ": " + e.msg);
    }
    if (!root.IsMap()) throw at(root, "scenario must be a mapping");
    if (q == "mode") {
        root["mode"] = v;
        return;
    }
    const auto dot = q.find('.');
    YAML::Node section = root[q.substr(0, dot)];
    if (section && !section.IsMap()) throw at(section, q.substr(0, dot) + ": expected a mapping");
    section[q.substr(dot + 1)] = v;
}

}  // namespace

void ScenarioConfig::validate() const {
    check(*this, [](const std::string&, const std::string&, const std::string& msg) {
        return ConfigError(msg);
    });
}

ScenarioConfig parse_config(const std::string& text, const std::string& source,
                            const std::vector<FieldOverride>& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line, e.mark.column, source);
    }
    for (const auto& o : overrides) {
        try {
            apply_override(root, o);
        } catch (const ConfigError& e) {
            throw ConfigError(e.detail(), -1, -1, source);
        }
    }
    try {
        return from_node(root);
    } catch (const ConfigError& e) {
        // Nodes that came from an override carry positions inside the
        // override text, not the document; report the override instead.
        for (const auto& o : overrides) {
            const std::string q = qualify_field(o.field);
            const std::string& d = e.detail();
            if (d.compare(0, q.size(), q) == 0 &&
                (d.size() == q.size() || d[q.size()] == ':' || d[q.size()] == '[')) {
                throw ConfigError("override " + q + "=" + o.value + ": " + d, -1, -1, source);
            }
        }
        throw ConfigError(e.detail(), e.line(), e.column(), source);
    }
}

ScenarioConfig load_config(const std::string& path, const std::vector<FieldOverride>& overrides) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, overrides);
}

std::string to_yaml(const ScenarioConfig& cfg) { return emit(to_node(cfg)); }

std::string qualify_field(const std::string& field) {
    if (field == "mode") return field;
    if (field == "plant") return "plant.name";
    const auto dot = field.find('.');
    if (dot != std::string::npos) {
        const Section* s = find_section(field.substr(0, dot));
        const std::string key = field.substr(dot + 1);
        if (s == nullptr || std::find(s->keys.begin(), s->keys.end(), key) == s->keys.end()) {
            throw ConfigError("unknown field '" + field + "'");
        }
        return field;
    }
    std::string found;
    for (const auto& s : schema()) {
        if (std::find(s.keys.begin(), s.keys.end(), field) != s.keys.end()) {
            if (!found.empty()) throw ConfigError("ambiguous field '" + field + "'");
            found = std::string(s.name) + "." + field;
        }
    }
    if (found.empty()) throw ConfigError("unknown field '" + field + "'");
    return found;
}

ScenarioConfig with_overrides(const ScenarioConfig& cfg, const std::vector<FieldOverride>& overrides) {
    return parse_config(to_yaml(cfg), "<override>", overrides);
}

ScenarioConfig with_override(const ScenarioConfig& cfg, const std::string& field,
                             const std::string& value) {
    return with_overrides(cfg, {{field, value}});
}

}  // namespace ptesc
