#pragma once

// Scenario files.
//
// A scenario is a YAML document with one top-level key `mode` and four flat
// sections:
//
//   mode: esc                      # esc | target | averaged
//   plant:      { name, x0, box: { lower, upper } }
//   params:     { T, stop_fraction, gain_clamp, A, omega, omega_h, omega_l,
//                 k, tau_I, u_hat0 }
//   integrator: { method, rtol, atol, dither_resolution, max_step_absolute,
//                 quiet_tau_step, output_samples, record_stride,
//                 divergence_bound }
//   outputs:    { dir, formats: [csv, json, gnuplot] }
//
// Unknown keys are rejected. Every error carries the line and column of the
// offending node.

#include <optional>
#include <string>
#include <vector>

#include "ptesc/controller.hpp"
#include "ptesc/integrator.hpp"
#include "ptesc/plant.hpp"
#include "ptesc/sim.hpp"

namespace ptesc {

struct OutputConfig {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
    bool gnuplot = true;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
    Mode mode = Mode::Esc;
    std::string plant;
    std::vector<double> x0;
    /// Audit region for `validate`; the plant's own box when absent.
    std::optional<StateBox> box;
    EscParams params;
    IntegratorConfig integrator;
    OutputConfig outputs;

    /// Checks the cross-field invariants (plant name, x0 length, parameter
    /// ranges). Throws ConfigError without position information.
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// `field = value` applied to the document before validation. The field is
/// `section.key` or an unambiguous bare key (`omega`, `rtol`, `mode`; `plant`
/// means `plant.name`); the
/// value is YAML scalar or flow text (`150`, `[1, 2]`).
struct FieldOverride {
    std::string field;
    std::string value;
};

/// Throws ConfigError (parse or validation) and Error when the file cannot be read.
ScenarioConfig load_config(const std::string& path, const std::vector<FieldOverride>& overrides = {});

/// `source` names the document in error messages.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<string>",
                            const std::vector<FieldOverride>& overrides = {});

/// YAML text that parse_config maps back to an identical config.
std::string to_yaml(const ScenarioConfig& cfg);

/// cfg with fields replaced and the whole config revalidated once, so the
/// order of the overrides does not matter. Throws ConfigError.
ScenarioConfig with_overrides(const ScenarioConfig& cfg, const std::vector<FieldOverride>& overrides);
ScenarioConfig with_override(const ScenarioConfig& cfg, const std::string& field,
                             const std::string& value);

/// Fully qualified name (`params.omega`) of a field accepted by with_override.
std::string qualify_field(const std::string& field);

}  // namespace ptesc
