#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abv/analysis.hpp"
#include "abv/vnmeas.hpp"

namespace abv {

struct ScenarioCheck {
    enum class Kind { exact, numerical, statistical, configuration };
    std::string name;
    Kind kind = Kind::numerical;
    bool passed = false;
    std::string detail;
};

// Everything a scenario produces, ready for serialization: named
// distributions, named Fourier coefficients, optional raw samples, named
// scalars, self-check results, warnings.
struct ScenarioResult {
    std::string label;
    std::map<std::string, Dist> distributions;
    std::map<std::string, FourierCoeff> fourier;
    std::optional<SampleSet> samples;
    std::map<std::string, double> scalars;
    std::vector<ScenarioCheck> checks;
    std::vector<std::string> warnings;

    bool all_passed() const;
    bool statistical_failure() const;
};

// Grid sizes for scenario construction.
struct GridSpec {
    int n_y = 2048;
    double y_extent = 60.0;
    int n_q = 512;
    double q_extent = 52.0;
};

/// Velocity distribution before (alpha = 0) and after (alpha) flux insertion:
/// the distribution shifts while every moment stays put.
ScenarioResult scenario_before_after(const GridSpec& grid, const PhysicalParams& params);

/// Full measured experiment: two-packet state, impulsive two-position velocity
/// measurement, pointer readout rescaled to velocity units, sampling, histogram,
/// fringe fit for alpha-hat. n_samples = 0 fits the analytic readout directly.
ScenarioResult scenario_measured_ab(const GridSpec& grid, const PhysicalParams& params,
                                    const MeasurementConfig& cfg, std::size_t n_samples,
                                    std::uint64_t seed);

/// Relative-velocity variant: fringe-free before the annulling impulse, shifted
/// fringes after; alpha = 0 control recovers the unshifted pattern.
ScenarioResult scenario_relative_velocity(const GridSpec& grid, const PhysicalParams& params);

// Gedanken run: flux phase applied while the packets are far apart, converging
// impulse, free flight to overlap, position-space fringes read out.
struct FluxInsertParams {
    double recombine_v = 5.0;   ///< impulse magnitude; packets meet after L/(2 v)
    double t_overlap = 0.0;     ///< flight time; 0 = L/(2 recombine_v)
    double phase_delay = 0.0;   ///< free evolution before the flux phase goes on
    double impulse_time = -1.0; ///< impulse instant; < 0 = right after the phase
};

ScenarioResult scenario_flux_insert_remove(const GridSpec& grid, const PhysicalParams& params,
                                           const FluxInsertParams& fp);

/// Laboratory-feasibility numbers as a ScenarioResult (scalars + checks).
ScenarioResult scenario_feasibility(const FeasibilityInput& in);

}  // namespace abv
