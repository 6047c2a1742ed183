#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abv/abexp.hpp"

namespace abv {

enum class Scenario {
    before_after,
    measured_ab,
    relative_velocity,
    flux_insert_remove,
    feasibility,
    sweep,
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Full description of one run. Defaults are per-scenario (see
// apply_scenario_defaults); every field can be overridden from the config file.
struct RunConfig {
    Scenario scenario = Scenario::before_after;

    GridSpec grid;
    PhysicalParams physics;

    // measurement (composite scenarios)
    double G = 0.5;
    double T = 2.0;
    double T0 = 0.0;
    std::optional<double> a;   ///< nullopt = auto
    double sigma_q = 6.4;

    // scenario-specific knobs
    FluxInsertParams flux;
    FeasibilityInput feas;

    // sampling
    std::size_t n_samples = 100000;
    std::uint64_t seed = 0;

    // output
    enum class Format { csv, json };
    Format format = Format::csv;
    std::string directory = "out";

    // sweep
    Scenario sweep_scenario = Scenario::before_after;
    std::vector<double> sweep_alphas;

    MeasurementConfig measurement_config(double q_hbar) const;
};

/// Scenario-appropriate grid/physics defaults (documented in the README).
void apply_scenario_defaults(RunConfig& cfg);

/// Parse the sectioned key-value format (see README for the grammar). Unknown
/// keys are rejected by name with their section path. `text` is file content.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Render a RunConfig back to config-file text (the echo written to output).
std::string render_config(const RunConfig& cfg);

/// Parse "pi", "pi/2", "-3pi/4", "2pi", or a plain float.
double parse_angle(const std::string& s);

}  // namespace abv
