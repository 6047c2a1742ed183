#pragma once

#include <cmath>

#include "abv/errors.hpp"

namespace abv {

inline constexpr double pi = 3.14159265358979323846;

/// Wrap an angle into the canonical interval (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

// Uniform 1D grid on [-extent, extent), n points, periodic spectral conventions.
// The conjugate (momentum) lattice spans [-pi*hbar/dy, pi*hbar/dy) with spacing
// dp = 2*pi*hbar/(n*dy), index s <-> p = (s - n/2)*dp.
struct Grid {
    int n = 0;            ///< number of samples, even, >= 16
    double extent = 0.0;  ///< half-width X; domain is [-X, X)
    double hbar = 1.0;    ///< conjugate pairing uses this hbar

    double dy() const { return 2.0 * extent / n; }
    double dp() const { return 2.0 * pi * hbar / (n * dy()); }
    double y(int j) const { return -extent + j * dy(); }
    double p(int s) const { return (s - n / 2) * dp(); }
    double p_max() const { return pi * hbar / dy(); }  // band edge (exclusive)
};

inline Grid build_grid(int n, double extent, double hbar = 1.0) {
    if (n < 16 || n % 2 != 0)
        throw config_error("build_grid: n must be even and >= 16, got " + std::to_string(n));
    if (!(extent > 0.0))
        throw config_error("build_grid: extent must be positive, got " + std::to_string(extent));
    if (!(hbar > 0.0))
        throw config_error("build_grid: hbar must be positive");
    return Grid{n, extent, hbar};
}

// Physical inputs for the two-packet interference states. Natural units by
// default (m = hbar = 1); alpha is the flux phase picked up by the y > 0 branch.
struct PhysicalParams {
    double m = 1.0;
    double hbar = 1.0;
    double L = 10.0;      ///< packet separation (centers at -L/2 and +L/2)
    double alpha = 0.0;   ///< flux phase, canonically in (-pi, pi]
    double sigma = 0.5;   ///< packet width (position std dev)
    double v0 = 0.0;      ///< relative branch velocity (0 = packets at rest)

    double alpha_canonical() const { return wrap_angle(alpha); }

    void validate() const {
        if (!(m > 0.0) || !(hbar > 0.0))
            throw config_error("PhysicalParams: m and hbar must be positive");
        if (!(L > 0.0) || !(sigma > 0.0))
            throw config_error("PhysicalParams: L and sigma must be positive");
    }
};

}  // namespace abv
