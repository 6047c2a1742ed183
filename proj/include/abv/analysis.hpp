#pragma once

#include <map>
#include <string>

#include "abv/dist.hpp"
#include "abv/grid.hpp"
#include "abv/vnmeas.hpp"

namespace abv {

/// Left-closed uniform binning of a sample set; density normalized over the
/// counted samples. Errors if range covers less than 99% of the samples.
Dist histogram(const SampleSet& samples, int bins, double lo, double hi,
               Dist::Kind kind = Dist::Kind::velocity);

// Result of the fringe fit  density ~= A exp(-(x-mu)^2/(2 s^2)) (1 + V cos(omega x - phase)).
struct FringeFit {
    double alpha_hat = 0.0;    ///< fitted phase, wrapped to (-pi, pi]
    double visibility = 0.0;   ///< V clamped to [0, 1]
    double period = 0.0;       ///< fixed carrier period 2*pi/omega
    double residual = 0.0;     ///< rms misfit relative to the density peak
    bool reliable = false;     ///< false if visibility < 0.2, residual > 0.1, or no convergence
    bool converged = false;
    double mu = 0.0, width = 0.0, amplitude = 0.0;  // envelope diagnostics
};

/// Least-squares fit with the carrier frequency held fixed at omega.
FringeFit fit_fringe(const Dist& dist, double omega);

/// Velocity-axis convenience: omega = m L / hbar (the known fringe spacing of a
/// two-packet state with separation L).
FringeFit fit_fringe(const Dist& dist, const PhysicalParams& params);

struct DistComparison {
    double l1 = 0.0;          ///< integral |a - b|
    double ks = 0.0;          ///< sup |CDF_a - CDF_b|
    double dmoment[4] = {0, 0, 0, 0};  ///< raw moment differences, n = 1..4
};

/// Distance metrics between two densities of the same kind. Distinct axes are
/// handled by linear re-binning of b onto a's axis.
DistComparison compare_distributions(const Dist& a, const Dist& b);

}  // namespace abv
