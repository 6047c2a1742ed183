#include <cmath>
#include <complex>

#include "abv/evolve.hpp"
#include "abv/vnmeas.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abv;

namespace {

Composite demo_composite() {
  const Grid gy = build_grid(256, 16.0);
  const Grid gq = build_grid(128, 12.0);
  const Wave particle = gaussian_packet(gy, 0.8, 0.6, 0.5);
  const PointerPrep prep{gq, 1.0};
  return make_composite(particle, prep);
}

}  // namespace

TEST_CASE("composite product state: norm and marginals factorize") {
  const Grid gy = build_grid(256, 16.0);
  const Grid gq = build_grid(128, 12.0);
  const Wave particle = gaussian_packet(gy, 0.8, 0.6, 0.5);
  const PointerPrep prep{gq, 1.0};
  const Wave pointer = prep.wave();
  const Composite c = make_composite(particle, pointer);

  CHECK(c.norm2() == doctest::Approx(1.0).epsilon(1e-12));

  const Dist dy_ = particle_position_marginal(c);
  double err = 0.0;
  for (int j = 0; j < gy.n; ++j)
    err = std::max(err, std::abs(dy_.density[j] - std::norm(particle.amp[j])));
  CHECK(err < 1e-12);

  const Dist dq_ = pointer_position_marginal(c);
  err = 0.0;
  for (int k = 0; k < gq.n; ++k)
    err = std::max(err, std::abs(dq_.density[k] - std::norm(pointer.amp[k])));
  CHECK(err < 1e-12);

  // velocity marginal of the product equals the particle's own spectrum
  const Dist dv = particle_velocity_marginal(c);
  const Dist dv_ref = velocity_distribution(particle);
  err = 0.0;
  for (std::size_t i = 0; i < dv.density.size(); ++i)
    err = std::max(err, std::abs(dv.density[i] - dv_ref.density[i]));
  CHECK(err < 1e-12);

  // pointer momentum marginal: Gaussian with sigma_pi = hbar/(2 sigma_q)
  const Dist dpi = pointer_momentum_marginal(c);
  CHECK(dpi.mean() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(dpi.variance() == doctest::Approx(prep.sigma_pi() * prep.sigma_pi()).epsilon(1e-10));
}

TEST_CASE("make_composite rejects mismatched factors") {
  const Grid gy = build_grid(64, 8.0);
  const Grid gq = build_grid(64, 8.0, 0.5);  // different hbar
  const Wave a = gaussian_packet(gy, 0.0, 1.2, 0.0);
  const Wave b = gaussian_packet(gq, 0.0, 1.2, 0.0);
  CHECK_THROWS_AS(make_composite(a, b), config_error);
  CHECK_THROWS_AS(make_composite(momentum_amplitudes(a), a), error);
}

TEST_CASE("composite drift: particle spreads, pointer untouched") {
  const Composite c = demo_composite();
  const Composite d = drift_composite(c, 1.5);
  d.check_norm("test");

  // pointer marginals identical
  const Dist q0 = pointer_position_marginal(c), q1 = pointer_position_marginal(d);
  const Dist pi0 = pointer_momentum_marginal(c), pi1 = pointer_momentum_marginal(d);
  double err = 0.0;
  for (std::size_t i = 0; i < q0.density.size(); ++i) {
    err = std::max(err, std::abs(q0.density[i] - q1.density[i]));
    err = std::max(err, std::abs(pi0.density[i] - pi1.density[i]));
  }
  CHECK(err < 1e-12);

  // particle velocity marginal conserved, position density spreads on schedule
  const Dist v0 = particle_velocity_marginal(c), v1 = particle_velocity_marginal(d);
  err = 0.0;
  for (std::size_t i = 0; i < v0.density.size(); ++i)
    err = std::max(err, std::abs(v0.density[i] - v1.density[i]));
  CHECK(err < 1e-12);

  const Dist y1 = particle_position_marginal(d);
  err = 0.0;
  for (std::size_t i = 0; i < y1.density.size(); ++i) {
    const double ref = oracle::free_gaussian_density(y1.axis[i], 1.5, 0.8, 0.6, 0.5, 1.0, 1.0);
    err = std::max(err, std::abs(y1.density[i] - ref));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("coupling kick displaces the pointer momentum by G<y>") {
  const Composite c = demo_composite();
  const double G = 0.8;
  const Composite k = coupling_kick(c, G);
  k.check_norm("test");

  const double y_mean = particle_position_marginal(c).mean();
  CHECK(pointer_momentum_mean(k) ==
        doctest::Approx(pointer_momentum_mean(c) + G * y_mean).epsilon(1e-9));

  // product state: Var(pi') = Var(pi) + G^2 Var(y)
  const double var_y = particle_position_marginal(c).variance();
  CHECK(pointer_momentum_variance(k) ==
        doctest::Approx(pointer_momentum_variance(c) + G * G * var_y).epsilon(1e-9));

  // position densities on both axes are untouched by a phase
  const Dist y0 = particle_position_marginal(c), y1 = particle_position_marginal(k);
  double err = 0.0;
  for (std::size_t i = 0; i < y0.density.size(); ++i)
    err = std::max(err, std::abs(y0.density[i] - y1.density[i]));
  CHECK(err < 1e-13);
}

TEST_CASE("compensation kick shifts pi by a<q> and widens it by a^2 Var(q)") {
  const Composite c = demo_composite();
  const double a = 0.6;
  const Composite k = compensation_kick(c, a);
  k.check_norm("test");

  // centered real pointer: <q> = 0 and Cov(q, pi) = 0
  CHECK(pointer_momentum_mean(k) == doctest::Approx(pointer_momentum_mean(c)).epsilon(1e-10));
  const double var_q = pointer_position_marginal(c).variance();
  CHECK(pointer_momentum_variance(k) ==
        doctest::Approx(pointer_momentum_variance(c) + a * a * var_q).epsilon(1e-9));
}

TEST_CASE("gate profiles") {
  const Gate rect{Gate::Kind::rect, 2.0, 0.5, 0.0};
  CHECK(rect.G_total() == doctest::Approx(1.0));
  CHECK(rect.duration() == doctest::Approx(0.5));
  CHECK(rect.g_at(0.25) == doctest::Approx(2.0));
  CHECK(rect.g_at(0.75) == doctest::Approx(0.0));
  CHECK(rect.segments() == std::vector<double>{0.0, 0.5});

  const Gate plateau{Gate::Kind::rect, 1.5, 1.0, 3.0};  // velocity-form constant G
  CHECK(plateau.duration() == doctest::Approx(3.0));
  CHECK(plateau.G_at(1.7) == doctest::Approx(1.5));
  CHECK(plateau.g_at(1.7) == doctest::Approx(0.0));

  const Gate ramp{Gate::Kind::ramp_plateau_ramp, 2.0, 0.5, 2.0};
  CHECK(ramp.duration() == doctest::Approx(2.5));
  CHECK(ramp.G_at(0.25) == doctest::Approx(0.5));   // up-ramp
  CHECK(ramp.G_at(1.0) == doctest::Approx(1.0));    // plateau = g0*T0
  CHECK(ramp.G_at(2.25) == doctest::Approx(0.5));   // down-ramp
  CHECK(ramp.G_at(2.5) == doctest::Approx(0.0));
  CHECK(ramp.g_at(0.25) == doctest::Approx(2.0));
  CHECK(ramp.g_at(1.0) == doctest::Approx(0.0));
  CHECK(ramp.g_at(2.25) == doctest::Approx(-2.0));
  CHECK(ramp.segments() == std::vector<double>{0.0, 0.5, 2.0, 2.5});

  // degenerate ramp with T0 = 0 keeps strictly increasing boundaries
  const Gate sharp{Gate::Kind::ramp_plateau_ramp, 2.0, 0.0, 2.0};
  CHECK(sharp.segments() == std::vector<double>{0.0, 2.0});
}

TEST_CASE("velocity-form evolution equals the impulsive composition") {
  // exp(-i p^2 T/(2 m hbar)) exp(+i G T q p/(m hbar)) equals
  // kick(+G) drift(T) kick(-G) followed by the tuned compensation
  const Grid gy = build_grid(256, 24.0);
  const Grid gq = build_grid(128, 16.0);
  const Wave particle = gaussian_packet(gy, 0.5, 0.8, 0.4);
  const Composite c = make_composite(particle, PointerPrep{gq, 1.2});
  const double G = 0.4, T = 2.0;

  Composite two_pos = coupling_kick(c, -G);
  two_pos = drift_composite(two_pos, T);
  two_pos = coupling_kick(two_pos, G);
  two_pos = compensation_kick(two_pos, G * G * T / c.mass);

  const Gate gate{Gate::Kind::rect, G, 1.0, T};
  const Composite cont = evolve_coupled(c, gate, T, CouplingForm::velocity);

  CHECK(detail::fidelity_defect(two_pos, cont) < 1e-12);
}

TEST_CASE("position-form rect window against the dense propagator") {
  const Grid gy = build_grid(64, 8.0);
  const Grid gq = build_grid(64, 8.0);
  const Wave particle = gaussian_packet(gy, -0.2, 1.1, 0.5);
  const Wave pointer = gaussian_packet(gq, 0.3, 1.1, 0.0);
  const Composite c = make_composite(particle, pointer);
  const double g0 = 0.8, T0 = 0.5;

  const Gate gate{Gate::Kind::rect, g0, T0, 0.0};
  const Composite num = evolve_coupled(c, gate, T0 / 512.0, CouplingForm::position);

  // dense oracle: q is conserved, so each q column evolves under the 64x64
  // Hamiltonian p^2/(2m) - g0 y q, exponentiated directly
  const oracle::CMat p_op = oracle::momentum_operator(gy);
  const oracle::CMat p2 = oracle::mul(p_op, p_op);
  double err2 = 0.0;
  for (int iq = 0; iq < gq.n; ++iq) {
    const double q = gq.y(iq);
    oracle::CMat h(gy.n);
    for (int r = 0; r < gy.n; ++r)
      for (int s = 0; s < gy.n; ++s) {
        h.at(r, s) = cplx(0.0, -T0) * (p2.at(r, s) / 2.0);
        if (r == s) h.at(r, s) += cplx(0.0, -T0) * (-g0 * gy.y(r) * q);
      }
    const oracle::CMat u = oracle::expm(h);
    std::vector<cplx> col(gy.n);
    for (int iy = 0; iy < gy.n; ++iy) col[iy] = c.at(iy, iq);
    const auto evolved = oracle::mul(u, col);
    for (int iy = 0; iy < gy.n; ++iy) err2 += std::norm(num.at(iy, iq) - evolved[iy]);
  }
  const double err = std::sqrt(err2 * gy.dy() * gq.dy());
  CHECK(err < 1e-6);
}

TEST_CASE("richardson probe rejects an impossible tolerance") {
  const Composite c = demo_composite();
  const Gate gate{Gate::Kind::rect, 1.0, 0.5, 0.0};
  // the probe's defect estimate is tiny but nonzero; an absurd tolerance
  // must surface as a guard failure rather than silent acceptance
  try {
    evolve_coupled(c, gate, 0.5 / 32.0, CouplingForm::position, 1e-30);
    CHECK_MESSAGE(false, "expected a guard failure");
  } catch (const guard_error& e) {
    CHECK(std::string(e.what()).find("splitting defect") != std::string::npos);
  }
}

TEST_CASE("evolution input validation") {
  const Composite c = demo_composite();
  const Gate ramp{Gate::Kind::ramp_plateau_ramp, 1.0, 0.5, 2.0};
  CHECK_THROWS_AS(evolve_coupled(c, ramp, 0.0, CouplingForm::velocity), config_error);
  CHECK_THROWS_AS(evolve_coupled(c, ramp, 0.1, CouplingForm::position), config_error);
  const Gate bad{Gate::Kind::ramp_plateau_ramp, 1.0, 2.0, 0.5};  // T < T0
  CHECK_THROWS_AS(evolve_coupled(c, bad, 0.1, CouplingForm::velocity), config_error);
}

TEST_CASE("drift guards the particle box edge") {
  const Grid gy = build_grid(128, 10.0);
  const Grid gq = build_grid(64, 8.0);
  const Wave particle = gaussian_packet(gy, 4.0, 0.8, 2.0);  // aimed at the wall
  const Composite c = make_composite(particle, PointerPrep{gq, 1.0});
  CHECK_THROWS_AS(drift_composite(c, 4.0), guard_error);
}

TEST_CASE("norm check trips on a scaled state") {
  Composite c = demo_composite();
  for (auto& a : c.amp) a *= 1.001;
  CHECK_THROWS_AS(c.check_norm("test"), guard_error);
}

TEST_CASE("fidelity defect basics") {
  const Composite c = demo_composite();
  CHECK(detail::fidelity_defect(c, c) == doctest::Approx(0.0));
  Composite d = c;
  for (auto& a : d.amp) a *= cplx(0.0, 1.0);  // global phase is invisible
  CHECK(detail::fidelity_defect(c, d) < 1e-15);
  const Composite e = coupling_kick(c, 0.3);
  CHECK(detail::fidelity_defect(c, e) > 1e-3);
}
