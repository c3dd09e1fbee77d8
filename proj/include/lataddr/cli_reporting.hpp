// Copyright 2026 The lataddr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Run configuration, scenario execution and CSV/JSON emission.
 *
 * Configs are JSON objects. Unknown keys are rejected; every omitted key
 * takes its default. Nested keys are addressed with dotted paths, e.g.
 * `lattice.L` or `pulses.delta_t`, both in error messages and in
 * `--set key=value` overrides.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lataddr/field_geometry.hpp"
#include "lataddr/pulse_schedule.hpp"
#include "lataddr/quantum_core.hpp"
#include "lataddr/register_protocol.hpp"
#include "lataddr/stirap_engine.hpp"

namespace lataddr {

enum class Scenario {
    stirap_scan,
    quench,
    rotate,
    measure,
    cphase,
    pattern_load,
    precision_budget,
    protocol_script,
};

enum class OutputFormat { csv, json };

std::string_view to_string(Scenario scenario);

/// A wave block; unset fields are derived from the lattice.
struct WaveOptions {
    std::optional<double> wavelength; ///< default: 2 (L + 1), i.e. zero tilt
    std::optional<double> tilt_angle; ///< default: commensurate angle
    double relative_phase = 0.0;
    std::optional<double> peak_rabi;  ///< default: calibrated to neighbour_peak

    /// True when any field departs from the calibrated default.
    bool customized() const {
        return wavelength || tilt_angle || peak_rabi || relative_phase != 0.0;
    }
};

struct ScanOptions {
    double omega_min = 0.0;
    double omega_max = 40.0;
    std::size_t points = 81;
    double threshold_fidelity = 0.9;
};

struct BudgetOptions {
    double wavelength = 2.0;          ///< lambda_qi in d_l; sets the default tilt
    std::optional<double> tilt_angle; ///< overrides the commensurate tilt
    double angle_error = 1e-5;        ///< dtheta
    double phase_error = 0.0;         ///< dphi
};

enum class ScriptOp {
    quench,
    inverse_quench,
    rotate_z,
    rotate_x,
    hadamard,
    measure,
    cphase,
    controlled_rotation,
    pump,
};

/// One protocol-script step. Site and reach default to the lattice's k and L.
struct ScriptStep {
    ScriptOp op = ScriptOp::quench;
    std::optional<std::int64_t> site;
    std::optional<std::int64_t> reach;
    double angle = 0.0;
    std::optional<OperationMode> mode;
    PumpMode pump_mode = PumpMode::deterministic;
};

struct ProtocolOptions {
    OperationMode mode = OperationMode::ideal;
    QuenchMethod quench_method = QuenchMethod::stirap;
    char axis = 'z';                       ///< rotate scenario: 'z' or 'x'
    double angle = 0.0;                    ///< rotate scenario angle
    std::vector<std::string> initial{"plus"}; ///< one label for all sites, or one per site
    std::vector<bool> occupancy;           ///< empty: all occupied
    std::size_t trials = 1;                ///< measure scenario
    SiteLevel pump_target = SiteLevel::a;
    double transfer_phase = kDefaultTransferPhase; ///< phase of the ideal quench
    std::vector<ScriptStep> steps;
};

struct RunConfig {
    Scenario scenario = Scenario::stirap_scan;
    std::uint64_t seed = 0;
    std::string output_path;     ///< empty: stdout
    OutputFormat output_format = OutputFormat::csv;

    LatticeConfig lattice{};
    WaveOptions wave_b{};
    WaveOptions wave_q{};
    double neighbour_peak = 20.0;
    double delta_q = 100.0;
    double gamma_q = 1.0;
    GaussianPair pulses{};
    IntegratorConfig integrator{};
    ScanOptions scan{};
    ManipulationBeam beam{};
    BudgetOptions budget{};
    ProtocolOptions protocol{};
};

/// Parses and validates a JSON config. Throws ConfigError naming the
/// offending dotted key.
RunConfig parse_config(std::string_view text);
RunConfig parse_config_document(const nlohmann::json &document);

/// Full config with every default spelled out; parse_config_document(to_json(c))
/// reproduces c.
nlohmann::json to_json(const RunConfig &config);

/// Applies `key=value` overrides to a config document. The value is read as
/// JSON when it parses, as a plain string otherwise.
void apply_override(nlohmann::json &document, std::string_view assignment);

/// Site-level settings derived from a config.
DriveSettings drive_settings(const RunConfig &config);
ProtocolSetup protocol_setup(const RunConfig &config);
QuenchSetup quench_setup(const RunConfig &config);
LatticeRegister initial_register(const RunConfig &config);

/// Produces the scenario's output file contents. Pure: same config, same bytes.
std::string render_scenario(const RunConfig &config);

/// Writes through a temporary sibling file and renames it into place.
/// Throws IoError.
void write_atomically(const std::string &path, std::string_view contents);

/// Renders and writes (or prints, for an empty output path) one scenario.
void run_scenario(const RunConfig &config);

std::string format_number(double value);
std::string curve_to_csv(const FidelityCurve &curve);
nlohmann::json curve_to_json(const FidelityCurve &curve);
FidelityCurve curve_from_csv(std::string_view text);

/// Writes a curve as CSV or JSON. Throws IoError.
void emit_curve(const FidelityCurve &curve, const std::string &path, OutputFormat format);

/// Basis states with |amplitude| above `threshold`, occupancy and deficit.
nlohmann::json register_to_json(const LatticeRegister &reg, double threshold = 1e-9);

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitIo = 4;

/// Maps the active exception to an exit code and a one-line JSON error.
int describe_current_exception(std::string &error_json);

} // namespace lataddr
