#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abv/evolve.hpp"

namespace abv {

// Parameters of one velocity measurement. a is the quadratic pointer
// self-interaction that removes the q(0) contamination; leave unset for the
// tuned value G^2 T / m.
struct MeasurementConfig {
    double G = 1.0;            ///< integrated coupling strength per kick
    double T = 1.0;            ///< drift span between kick starts
    double T0 = 0.0;           ///< kick/ramp duration; 0 = impulsive
    std::optional<double> a;   ///< compensation; nullopt = auto (G^2 T / m)
    PointerPrep pointer;

    double a_effective(double mass) const { return a ? *a : G * G * T / mass; }

    void validate() const {
        if (!(T > 0.0)) throw config_error("MeasurementConfig: T must be positive");
        if (T0 < 0.0) throw config_error("MeasurementConfig: T0 must be >= 0");
        if (T0 > 0.0 && T < 20.0 * T0)
            throw config_error("MeasurementConfig: require T >= 20*T0 (impulsive-kick regime)");
    }
};

/// Impulsive position measurement: coupling_kick(G) on the product state.
/// Pointer momentum records +G * y(0).
Composite measure_position_impulsive(const Composite& c, double G);

/// Two-position velocity measurement: kick(-G), drift(T), kick(+G),
/// compensation(a). With a = G^2 T/m the pointer records delta_pi = G T v_y(0).
/// T0 > 0 runs the kicks through evolve_coupled (position form, rect gates)
/// with drift T - T0 between them.
Composite measure_velocity_two_position(const Composite& c, const MeasurementConfig& cfg,
                                        double dt = 0.0);

/// Continuously gated velocity measurement, velocity-form Hamiltonian over the
/// full gate [0, T + T0] (rect gate if T0 = 0). The compensation is part of the
/// Hamiltonian; no separate kick.
Composite measure_velocity_continuous(const Composite& c, const MeasurementConfig& cfg,
                                      double dt = 0.0);

/// Pointer-momentum readout, optionally rescaled to velocity units v = pi/(G T)
/// (density transforms with the Jacobian G T).
Dist pointer_distribution(const Composite& c);
Dist pointer_distribution_as_velocity(const Composite& c, const MeasurementConfig& cfg);

/// Conditional particle velocity distribution given a pointer-momentum reading
/// in the bin nearest pi0 (used by the conditional-spread property).
Dist conditional_velocity_given_pointer(const Composite& c, double pi0);

// Deterministic draw from a tabulated density. Inverse-CDF with linear
// interpolation inside bins; mt19937_64 uniforms via the top 53 bits.
struct SampleSet {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

SampleSet sample_pointer(const Dist& dist, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Laboratory feasibility (CGS units).

struct FeasibilityCheck {
    std::string name;
    std::string requirement;  ///< human-readable inequality
    double ratio = 0.0;       ///< lhs/rhs as stated in `requirement`
    bool pass = false;
};

struct FeasibilityInput {
    double mass = 9.1093837015e-28;   ///< g (electron)
    double charge = 4.80320425e-10;   ///< esu
    double c = 2.99792458e10;         ///< cm/s
    double L = 6.0e-4;                ///< cm (packet separation)
    double flux = 2.0678338e-7;       ///< G*cm^2; alpha = -e*flux/(hbar*c)
    std::optional<double> alpha;      ///< override; unset = derived from flux
    double delta_pi0 = 0.0;           ///< pointer momentum spread, g*cm/s
    double delta_q0 = 0.0;            ///< pointer position spread, cm (0 = hbar/(2 delta_pi0))
    double G = 0.0;                   ///< g/s
    double T = 0.0;                   ///< s
    double T0 = 0.0;                  ///< s
};

struct FeasibilityReport {
    FeasibilityInput in;
    double hbar = 1.0545718176e-27;   ///< erg*s
    double alpha = 0.0;
    double delta_v = 0.0;             ///< modular-velocity quantum h/(m L), cm/s
    double lambda_compton = 0.0;      ///< hbar/(m c), cm
    double t_compton = 0.0;           ///< h/(m c^2), s
    double light_time = 0.0;          ///< L/c, s
    double delta_q0 = 0.0;            ///< resolved pointer spread
    std::vector<FeasibilityCheck> checks;
    bool all_pass = false;
};

/// Pure function of its inputs; ">>"/"<<" mean ratio >= 10 / <= 0.1.
FeasibilityReport feasibility_report(const FeasibilityInput& in);

/// Electron defaults that satisfy every check (see README).
FeasibilityInput electron_defaults();

/// Fringe-resolvability ratio delta_pi(0) / (G T h/(m L)); resolvable if <= 0.1,
/// crisp (visibility >= 0.9 regime) if <= 0.05.
double resolvability_ratio(const MeasurementConfig& cfg, const PhysicalParams& params);

}  // namespace abv
