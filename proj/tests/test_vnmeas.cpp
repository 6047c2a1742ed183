#include <cmath>
#include <numeric>

#include "abv/analysis.hpp"
#include "abv/vnmeas.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abv;

namespace {

// Shared composite-grid setup for the measurement tests.
struct Setup {
  Grid gy = build_grid(512, 32.0);
  Grid gq = build_grid(128, 16.0);
  MeasurementConfig cfg;

  Setup() {
    cfg.G = 0.25;
    cfg.T = 4.0;
    cfg.pointer.grid_q = gq;
    cfg.pointer.sigma_q = 2.0;
  }

  Composite packet(double k0) const {
    return make_composite(gaussian_packet(gy, 0.0, 1.0, k0), cfg.pointer);
  }
};

}  // namespace

TEST_CASE("measurement config validation") {
  MeasurementConfig cfg;
  cfg.T = 0.0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.T = 2.0;
  cfg.T0 = -0.1;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.T0 = 0.3;  // 20 * T0 = 6 > T
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.T0 = 0.1;
  CHECK_NOTHROW(cfg.validate());

  cfg.G = 0.5;
  cfg.T = 2.0;
  CHECK(cfg.a_effective(1.0) == doctest::Approx(0.5));
  CHECK(cfg.a_effective(2.0) == doctest::Approx(0.25));
  cfg.a = 0.125;
  CHECK(cfg.a_effective(1.0) == doctest::Approx(0.125));
}

TEST_CASE("impulsive position measurement records G*y") {
  const Setup s;
  const Composite c = make_composite(gaussian_packet(s.gy, 1.3, 1.0, 0.0), s.cfg.pointer);
  const Composite m = measure_position_impulsive(c, 0.5);
  CHECK(pointer_momentum_mean(m) == doctest::Approx(0.5 * 1.3).epsilon(1e-9));
}

TEST_CASE("tuned two-position measurement records G*T*v") {
  const Setup s;
  for (double k0 : {-1.5, 0.0, 2.0}) {
    const Composite c = s.packet(k0);
    const Composite m = measure_velocity_two_position(c, s.cfg);
    const double gt = s.cfg.G * s.cfg.T;  // mass 1
    CHECK(pointer_momentum_mean(m) == doctest::Approx(gt * k0).epsilon(1e-9));
    // tuned variance: sigma_pi^2 + (GT/m)^2 Var(p), no q(0) term
    const double var_pi = s.cfg.pointer.sigma_pi() * s.cfg.pointer.sigma_pi();
    const double var_p = 1.0 / (2.0 * 2.0);  // hbar^2 / (4 sigma^2), sigma = 1
    CHECK(pointer_momentum_variance(m) ==
          doctest::Approx(var_pi + gt * gt * var_p).epsilon(1e-9));
  }
}

TEST_CASE("mistuned compensation leaks q(0) into the pointer") {
  Setup s;
  const Composite c = s.packet(1.0);
  const Composite tuned = measure_velocity_two_position(c, s.cfg);
  s.cfg.a = 0.0;
  const Composite mist = measure_velocity_two_position(c, s.cfg);

  // centered pointer: the mean is untouched, the variance inflates by
  // (G^2 T / m)^2 Var(q)
  CHECK(pointer_momentum_mean(mist) == doctest::Approx(pointer_momentum_mean(tuned)).epsilon(1e-9));
  const double back = s.cfg.G * s.cfg.G * s.cfg.T;  // G^2 T / m
  const double var_q = s.cfg.pointer.sigma_q * s.cfg.pointer.sigma_q;
  const double inflation = pointer_momentum_variance(mist) - pointer_momentum_variance(tuned);
  CHECK(inflation == doctest::Approx(back * back * var_q).epsilon(1e-6));
}

TEST_CASE("impulsive continuous gate equals the two-position protocol") {
  const Setup s;
  const Composite c = s.packet(0.7);
  const Composite a = measure_velocity_two_position(c, s.cfg);
  const Composite b = measure_velocity_continuous(c, s.cfg);
  CHECK(detail::fidelity_defect(a, b) < 1e-12);
}

TEST_CASE("finite ramps: two-position with the T0-corrected compensation equals the ramp gate") {
  Setup s;
  s.cfg.T0 = 0.2;  // T = 4 = 20 * T0, boundary of the impulsive regime
  const Composite c = s.packet(0.5);

  const Composite cont = measure_velocity_continuous(c, s.cfg);

  // the rect-window protocol needs a = G^2 (T - T0/3) / m to cancel the
  // during-kick drift; with it the two evolutions are the same unitary
  s.cfg.a = s.cfg.G * s.cfg.G * (s.cfg.T - s.cfg.T0 / 3.0);
  const Composite two = measure_velocity_two_position(c, s.cfg);

  CHECK(detail::fidelity_defect(two, cont) < 1e-8);
}

TEST_CASE("continuous gate with G = 0 is the identity") {
  const Setup s;
  MeasurementConfig off = s.cfg;
  off.G = 0.0;
  const Composite c = s.packet(1.0);
  const Composite r = measure_velocity_continuous(c, off);
  CHECK(detail::fidelity_defect(c, r) == 0.0);
}

TEST_CASE("pointer readout rescales to velocity units") {
  const Setup s;
  const Composite m = measure_velocity_two_position(s.packet(1.2), s.cfg);
  const Dist pi_d = pointer_distribution(m);
  const Dist v_d = pointer_distribution_as_velocity(m, s.cfg);
  const double gt = s.cfg.G * s.cfg.T;
  CHECK(v_d.mean() == doctest::Approx(pi_d.mean() / gt).epsilon(1e-9));
  CHECK(v_d.total() == doctest::Approx(1.0).epsilon(1e-9));
  // axis ascending after the flip for negative G*T
  MeasurementConfig neg = s.cfg;
  neg.G = -s.cfg.G;
  const Dist v_neg = pointer_distribution_as_velocity(m, neg);
  CHECK(v_neg.axis.front() < v_neg.axis.back());

  MeasurementConfig zero = s.cfg;
  zero.G = 0.0;
  CHECK_THROWS_AS(pointer_distribution_as_velocity(m, zero), config_error);
}

TEST_CASE("conditioning on the pointer selects one branch velocity") {
  const Grid gy = build_grid(1024, 60.0);
  const Grid gq = build_grid(512, 52.0);
  MeasurementConfig cfg;
  cfg.G = 0.5;
  cfg.T = 2.0;
  cfg.pointer.grid_q = gq;
  cfg.pointer.sigma_q = 6.4;

  PhysicalParams params;
  params.L = 10.0;
  params.sigma = 0.5;
  params.alpha = 0.0;
  params.v0 = 2.0;  // diverging branches at -v0 and +v0
  const Wave psi = ab_superposition(gy, params, true);
  const Composite c = make_composite(psi, cfg.pointer);
  const Composite m = measure_velocity_two_position(c, cfg);

  const double gt = cfg.G * cfg.T;
  const Dist right = conditional_velocity_given_pointer(m, gt * params.v0);
  CHECK(std::abs(right.mean() - params.v0) < 0.05);
  const Dist left = conditional_velocity_given_pointer(m, -gt * params.v0);
  CHECK(std::abs(left.mean() + params.v0) < 0.05);
}

TEST_CASE("pointer sampling is deterministic and consistent") {
  const Grid gq = build_grid(256, 16.0);
  const Wave pointer = gaussian_packet(gq, 0.5, 1.5, 0.0);
  Dist d;
  d.kind = Dist::Kind::pointer;
  d.axis.resize(gq.n);
  d.density.resize(gq.n);
  for (int i = 0; i < gq.n; ++i) {
    d.axis[i] = gq.y(i);
    d.density[i] = std::norm(pointer.amp[i]);
  }
  d.normalize();

  const SampleSet a = sample_pointer(d, 20000, 42);
  const SampleSet b = sample_pointer(d, 20000, 42);
  CHECK(a.values == b.values);
  const SampleSet c = sample_pointer(d, 20000, 43);
  CHECK(a.values != c.values);

  // sample mean and variance against the density's own moments
  const double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / a.values.size();
  double var = 0.0;
  for (double v : a.values) var += (v - mean) * (v - mean);
  var /= a.values.size();
  CHECK(std::abs(mean - d.mean()) < 5.0 * 1.5 / std::sqrt(20000.0));
  CHECK(var == doctest::Approx(d.variance()).epsilon(0.05));

  // KS distance between the samples and the tabulated CDF
  std::vector<double> sorted = a.values;
  std::sort(sorted.begin(), sorted.end());
  const double ks = oracle::ks_statistic(sorted, [&](double x) {
    const double delta = d.spacing();
    double acc = 0.0;
    for (std::size_t i = 0; i < d.axis.size(); ++i) {
      const double lo = d.axis[i] - 0.5 * delta;
      if (x <= lo) break;
      acc += d.density[i] * delta * std::min(1.0, (x - lo) / delta);
    }
    return std::min(acc, 1.0);
  });
  CHECK(ks < 2.0 / std::sqrt(20000.0));
}

TEST_CASE("sampling input validation") {
  Dist d;
  d.axis = {0.0};
  d.density = {1.0};
  CHECK_THROWS_AS(sample_pointer(d, 10, 0), config_error);
  d.axis = {0.0, 1.0, 2.0};
  d.density = {0.5, -0.1, 0.5};
  CHECK_THROWS_AS(sample_pointer(d, 10, 0), error);
}

TEST_CASE("electron feasibility report") {
  const FeasibilityReport r = feasibility_report(electron_defaults());
  CHECK(r.delta_v == doctest::Approx(1.21231e4).epsilon(1e-4));
  CHECK(r.light_time == doctest::Approx(2.0014e-14).epsilon(1e-4));
  CHECK(r.t_compton == doctest::Approx(8.0933e-21).epsilon(1e-4));
  CHECK(r.lambda_compton == doctest::Approx(3.8616e-11).epsilon(1e-4));
  CHECK(r.alpha == doctest::Approx(-pi).epsilon(1e-6));
  CHECK(r.delta_q0 == doctest::Approx(8.0e-3).epsilon(1e-3));
  CHECK(r.checks.size() == 9);
  CHECK(r.all_pass);

  // a 100x wider pointer momentum spread breaks fringe resolution
  FeasibilityInput wide = electron_defaults();
  wide.delta_pi0 *= 100.0;
  const FeasibilityReport w = feasibility_report(wide);
  CHECK_FALSE(w.all_pass);
  for (const FeasibilityCheck& c : w.checks)
    if (c.name == "fringe_resolvable") CHECK_FALSE(c.pass);

  FeasibilityInput bad = electron_defaults();
  bad.delta_pi0 = 0.0;
  CHECK_THROWS_AS(feasibility_report(bad), config_error);
}

TEST_CASE("resolvability ratio") {
  MeasurementConfig cfg;
  cfg.G = 0.5;
  cfg.T = 2.0;
  cfg.pointer.grid_q = build_grid(512, 52.0);
  cfg.pointer.sigma_q = 6.4;
  PhysicalParams params;
  params.L = 8.0;
  const double threshold = cfg.G * cfg.T * 2.0 * pi / params.L;
  CHECK(resolvability_ratio(cfg, params) ==
        doctest::Approx(cfg.pointer.sigma_pi() / threshold).epsilon(1e-12));

  cfg.G = 0.0;
  CHECK_THROWS_AS(resolvability_ratio(cfg, params), config_error);
}
