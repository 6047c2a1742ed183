#pragma once

#include <complex>
#include <string>
#include <vector>

#include "abv/errors.hpp"

namespace abv {

// A sampled probability density on a uniform axis. Always kept normalized:
// sum(density) * spacing == 1 up to roundoff.
struct Dist {
    enum class Kind { velocity, position, pointer };

    std::vector<double> axis;     ///< uniform, ascending
    std::vector<double> density;  ///< nonnegative
    Kind kind = Kind::velocity;

    double spacing() const {
        if (axis.size() < 2) throw error("Dist: need at least two axis points");
        return axis[1] - axis[0];
    }

    double total() const {
        double s = 0.0;
        for (double d : density) s += d;
        return s * spacing();
    }

    void normalize() {
        double t = total();
        if (!(t > 0.0)) throw guard_error("Dist: cannot normalize, total mass is zero");
        for (double& d : density) d /= t;
    }

    /// Raw moment <x^n> of the density.
    double moment(int n) const {
        double s = 0.0;
        for (std::size_t i = 0; i < axis.size(); ++i)
            s += std::pow(axis[i], n) * density[i];
        return s * spacing();
    }

    double mean() const { return moment(1); }
    double variance() const {
        double mu = mean();
        return moment(2) - mu * mu;
    }
};

inline const char* to_string(Dist::Kind k) {
    switch (k) {
        case Dist::Kind::velocity: return "velocity";
        case Dist::Kind::position: return "position";
        case Dist::Kind::pointer: return "pointer";
    }
    return "?";
}

// One Fourier coefficient f_l = <exp(i m v l / hbar)> of a velocity
// distribution; |f_l| <= 1, f_0 = 1 for any normalized state.
struct FourierCoeff {
    double l = 0.0;
    std::complex<double> value{0.0, 0.0};
};

}  // namespace abv
