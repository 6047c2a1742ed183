#pragma once

#include <complex>
#include <vector>

#include "abv/dist.hpp"
#include "abv/grid.hpp"

namespace abv {

using cplx = std::complex<double>;

/*
 * One-particle state on a Grid, in either representation.
 *
 * Transform convention (continuum form, discretized exactly on the lattice):
 *
 *   phi(p_s) = dy / sqrt(2 pi hbar) * sum_j psi(y_j) exp(-i p_s y_j / hbar)
 *   psi(y_j) = dp / sqrt(2 pi hbar) * sum_s phi(p_s) exp(+i p_s y_j / hbar)
 *
 * with y_j = -X + j dy and p_s = (s - n/2) dp. Both directions are unitary with
 * respect to the measures dy and dp, so sum |amp|^2 * spacing == 1 in either
 * representation.
 */
struct Wave {
    enum class Rep { position, momentum };

    Grid grid;
    double mass = 1.0;
    Rep rep = Rep::position;
    std::vector<cplx> amp;

    double hbar() const { return grid.hbar; }
    double spacing() const { return rep == Rep::position ? grid.dy() : grid.dp(); }
    double coord(int i) const { return rep == Rep::position ? grid.y(i) : grid.p(i); }

    double norm2() const;      ///< sum |amp|^2 * spacing
    void normalize();          ///< rescale to norm 1; throws on zero state
    double max_abs() const;
};

/// Minimum-uncertainty Gaussian, |psi|^2 ~ exp(-(y-center)^2 / (2 sigma^2)),
/// mean momentum k0. Requires sigma >= 4*dy and |center| + 6*sigma <= extent.
Wave gaussian_packet(const Grid& grid, double center, double sigma, double k0);

/// Equal-weight two-packet superposition with centers -L/2 and +L/2.
/// include_phase applies exp(i alpha) to the y > 0 branch. If params.v0 != 0 the
/// branches carry diverging boosts (-v0 on the left packet, +v0 on the right),
/// so apply_branch_impulse(v0) annuls the relative motion exactly.
/// strict enforces the separation precondition L/sigma >= 8; pass false only for
/// convergence studies.
Wave ab_superposition(const Grid& grid, const PhysicalParams& params, bool include_phase,
                      bool strict = true);

/// Unitary transform to the conjugate lattice (position -> momentum).
Wave momentum_amplitudes(const Wave& w);
/// Inverse transform (momentum -> position).
Wave position_amplitudes(const Wave& w);

/// Velocity distribution: density(v = p/m) = m |phi(p)|^2, normalized.
Dist velocity_distribution(const Wave& w);

/// f_l = <exp(i m v l / hbar)> evaluated from the velocity distribution
/// (equal to the position-space autocorrelation <psi| T_l |psi>).
FourierCoeff fourier_coefficient(const Wave& w, double l);

/// <p^n> under the momentum-space density; n in [0, 8].
double moment(const Wave& w, int n);

/// Multiply the y > 0 half-line by exp(i alpha). Errors if the amplitude within
/// one grid step of the cut exceeds 1e-8 of the peak (branches not separated).
Wave apply_flux_phase(const Wave& w, double alpha);

/// Converging impulse: boost the y < 0 branch by +dv and the y > 0 branch by
/// -dv (momentum kick -m*dv*sign(y), continuous at the cut). Same separation
/// guard as apply_flux_phase.
Wave apply_branch_impulse(const Wave& w, double dv);

/// Free evolution by dt: multiplication by exp(-i p^2 dt / (2 m hbar)) in the
/// momentum representation. Errors if position content reaches the box edge.
Wave free_step(const Wave& w, double dt);

namespace detail {
/// Probability mass in the outermost edge_bins samples on each side of |amp|^2.
double edge_mass(const Wave& w, int edge_bins);
/// Guard helper: throws guard_error naming `what` if the mass in the outer
/// 1/64 of the axis exceeds 1e-9.
void check_band_edges(const Wave& w, const char* what);
}  // namespace detail

}  // namespace abv
