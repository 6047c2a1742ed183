#pragma once

#include <vector>

#include "abv/wave.hpp"

namespace abv {

// Measuring-device pointer: zero-mean, zero-momentum Gaussian in the pointer
// coordinate q, conjugate momentum pi. Delta_pi(0) = hbar / (2 sigma_q).
struct PointerPrep {
    Grid grid_q;
    double sigma_q = 1.0;

    double sigma_pi() const { return grid_q.hbar / (2.0 * sigma_q); }
    Wave wave() const;  ///< gaussian_packet(grid_q, 0, sigma_q, 0)
};

/*
 * Particle (x) device state on the product grid. Storage is q-major:
 * amp[iq * n_y + iy], so transforms along y are contiguous. The device has no
 * kinetic term (infinite-mass pointer): nothing in the dynamics couples
 * different q columns, q is conserved throughout.
 */
struct Composite {
    Grid grid_y;
    Grid grid_q;
    double mass = 1.0;  ///< particle mass; the pointer has none
    std::vector<cplx> amp;

    int ny() const { return grid_y.n; }
    int nq() const { return grid_q.n; }
    double hbar() const { return grid_y.hbar; }
    cplx& at(int iy, int iq) { return amp[static_cast<std::size_t>(iq) * ny() + iy]; }
    const cplx& at(int iy, int iq) const {
        return amp[static_cast<std::size_t>(iq) * ny() + iy];
    }

    double norm2() const;  ///< sum |amp|^2 * dy * dq
    void check_norm(const char* where, double tol = 1e-11) const;
};

// Gate profile for the measurement coupling.
//
//   rect:              g(t) = g0 on [0, T0] (position form); for the velocity
//                      form, constant G(t) = g0*T0 on [0, T] (instant switching).
//   ramp_plateau_ramp: cumulative coupling G(t) = g0*t on [0,T0], G = g0*T0 on
//                      [T0, T], G - g0*(t-T) on [T, T+T0]; closes at T + T0.
//                      Velocity form only.
//
// T follows the convention that the plateau ends where the down-ramp starts.
struct Gate {
    enum class Kind { rect, ramp_plateau_ramp };

    Kind kind = Kind::rect;
    double g0 = 0.0;  ///< ramp rate (position form: the coupling itself)
    double T0 = 0.0;  ///< kick/ramp duration
    double T = 0.0;   ///< drift span (down-ramp starts at T); unused for position rect

    double G_total() const { return g0 * T0; }  ///< plateau value = integrated kick
    double duration() const;
    /// Cumulative coupling G(t) (velocity form).
    double G_at(double t) const;
    /// Instantaneous rate g(t) (position form: the y*q coupling strength).
    double g_at(double t) const;
    /// Segment boundaries within [0, duration()].
    std::vector<double> segments() const;
};

enum class CouplingForm { position, velocity };

/// Free evolution of the particle factor by dt; per-q-column momentum mask.
Composite drift_composite(const Composite& c, double dt);

/// Product state particle(y) * pointer(q).
Composite make_composite(const Wave& particle, const Wave& pointer);
Composite make_composite(const Wave& particle, const PointerPrep& pointer);

/// Impulsive coupling exp(+i G y q / hbar): shifts pointer momentum by +G*y
/// (and particle momentum by +G*q). Exact coordinate-space phase; conjugate
/// axes are band-edge checked where they are consumed (drifts and marginals).
Composite coupling_kick(const Composite& c, double G);

/// Impulsive compensation exp(+i a q^2 / (2 hbar)): shifts pointer momentum by
/// +a*q. Exact coordinate-space phase, unguarded like coupling_kick.
Composite compensation_kick(const Composite& c, double a);

/*
 * Strang-split integration of the gated composite dynamics.
 *
 *   position form: H = p^2/(2m) - g(t) y q          (kick Hamiltonian; the sign
 *                  makes the impulsive limit equal coupling_kick(G_total))
 *   velocity form: H = (p - G(t) q)^2/(2m) - G(t)^2 q^2/(2m)
 *                    = p^2/(2m) - G(t) q p / m      (diagonal in (p, q))
 *
 * dt is a requested step; each gate segment runs ceil(segment/dt) uniform steps
 * (at least 32 per segment) with the gate sampled at step midpoints. A
 * Richardson probe estimates the accumulated splitting defect and rejects the
 * step size if the estimate exceeds defect_tol.
 */
Composite evolve_coupled(const Composite& c, const Gate& gate, double dt, CouplingForm form,
                         double defect_tol = 1e-6);

/// Marginal |pointer momentum| distribution: transform along q, trace out y.
Dist pointer_momentum_marginal(const Composite& c);

/// Marginal particle velocity distribution: transform along y, trace out q.
Dist particle_velocity_marginal(const Composite& c);

/// Marginal particle position distribution (no transform).
Dist particle_position_marginal(const Composite& c);

/// Pointer position marginal (no transform).
Dist pointer_position_marginal(const Composite& c);

/// <pi> and Var(pi) of the pointer momentum marginal.
double pointer_momentum_mean(const Composite& c);
double pointer_momentum_variance(const Composite& c);

namespace detail {
void check_band_edges_y(const Composite& c, const char* what);       // position axis
void check_band_edges_p(const Composite& c, const char* what);       // particle momentum
void check_band_edges_pi(const Composite& c, const char* what);      // pointer momentum
/// Fidelity defect 1 - |<a|b>|^2 between two composites on the same grids.
double fidelity_defect(const Composite& a, const Composite& b);
}  // namespace detail

}  // namespace abv
