#include <cmath>
#include <random>

#include "abv/analysis.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abv;

namespace {

// Normalized two-hump-free fringe density A exp(-x^2/2s^2)(1 + V cos(omega x - alpha)).
Dist fringe_density(double omega, double alpha, double V, int n = 1600, double span = 6.0,
                    double s = 1.0) {
  Dist d;
  d.kind = Dist::Kind::velocity;
  d.axis.resize(n);
  d.density.resize(n);
  const double dx = 2.0 * span / n;
  for (int i = 0; i < n; ++i) {
    const double x = -span + (i + 0.5) * dx;
    d.axis[i] = x;
    d.density[i] = std::exp(-0.5 * x * x / (s * s)) * (1.0 + V * std::cos(omega * x - alpha));
  }
  d.normalize();
  return d;
}

Dist gaussian_density(double mu, double sigma, int n = 2000, double span = 8.0) {
  Dist d;
  d.kind = Dist::Kind::velocity;
  d.axis.resize(n);
  d.density.resize(n);
  const double dx = 2.0 * span / n;
  for (int i = 0; i < n; ++i) {
    const double x = -span + (i + 0.5) * dx;
    d.axis[i] = x;
    d.density[i] = std::exp(-0.5 * (x - mu) * (x - mu) / (sigma * sigma));
  }
  d.normalize();
  return d;
}

}  // namespace

TEST_CASE("histogram bins and normalization") {
  SampleSet s;
  s.values = {0.1, 0.1, 0.3, 0.9};
  s.n = 4;
  const Dist d = histogram(s, 4, 0.0, 1.0);
  CHECK(d.axis[0] == doctest::Approx(0.125));
  CHECK(d.axis[3] == doctest::Approx(0.875));
  CHECK(d.density[0] == doctest::Approx(2.0));
  CHECK(d.density[1] == doctest::Approx(1.0));
  CHECK(d.density[2] == doctest::Approx(0.0));
  CHECK(d.density[3] == doctest::Approx(1.0));
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram input validation") {
  SampleSet s;
  s.values = {0.5};
  CHECK_THROWS_AS(histogram(s, 3, 0.0, 1.0), config_error);
  CHECK_THROWS_AS(histogram(s, 8, 1.0, 1.0), config_error);
  s.values.clear();
  CHECK_THROWS_AS(histogram(s, 8, 0.0, 1.0), error);

  // more than 1% of the samples outside the range
  s.values.assign(1000, 0.5);
  for (int i = 0; i < 15; ++i) s.values[i] = 5.0;
  CHECK_THROWS_AS(histogram(s, 8, 0.0, 1.0), error);
  for (int i = 0; i < 5; ++i) s.values[i] = 0.5;  // back to exactly 99% inside
  CHECK_NOTHROW(histogram(s, 8, 0.0, 1.0));
}

TEST_CASE("histogram converges to the sampled density") {
  const Dist truth = gaussian_density(0.3, 1.2);
  double prev = 1e9;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const SampleSet samples = sample_pointer(truth, n, 7);
    const Dist h = histogram(samples, 64, -8.0, 8.0);
    const double l1 = compare_distributions(h, truth).l1;
    CHECK(l1 < prev);
    prev = l1;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("fringe fit recovers the phase exactly on noiseless input") {
  const double omega = 8.0;
  for (int k = -7; k <= 8; ++k) {
    const double alpha = k * pi / 8.0;
    const FringeFit fit = fit_fringe(fringe_density(omega, alpha, 1.0), omega);
    CHECK(std::abs(wrap_angle(fit.alpha_hat - alpha)) < 1e-6);
    CHECK(fit.visibility > 0.99);
    CHECK(fit.reliable);
    CHECK(fit.period == doctest::Approx(2.0 * pi / omega));
  }
}

TEST_CASE("fringe fit via physical parameters uses omega = m L / hbar") {
  PhysicalParams p;
  p.L = 8.0;
  const double alpha = 0.9;
  const FringeFit fit = fit_fringe(fringe_density(8.0, alpha, 0.8), p);
  CHECK(std::abs(wrap_angle(fit.alpha_hat - alpha)) < 1e-6);
  CHECK(fit.visibility == doctest::Approx(0.8).epsilon(1e-4));
}

TEST_CASE("fringe fit survives 1% deterministic contamination") {
  const double omega = 8.0;
  Dist d = fringe_density(omega, 1.1, 1.0);
  for (std::size_t i = 0; i < d.axis.size(); ++i)
    d.density[i] *= 1.0 + 0.01 * std::sin(17.3 * d.axis[i] + 0.7);
  d.normalize();
  const FringeFit fit = fit_fringe(d, omega);
  CHECK(std::abs(wrap_angle(fit.alpha_hat - 1.1)) < 1e-2);
  CHECK(fit.reliable);
}

TEST_CASE("fringe fit flags a fringe-free distribution") {
  const FringeFit fit = fit_fringe(fringe_density(8.0, 0.0, 0.0), 8.0);
  CHECK(fit.visibility < 0.05);
  CHECK_FALSE(fit.reliable);
}

TEST_CASE("fringe fit input validation") {
  const Dist d = fringe_density(8.0, 0.3, 1.0);
  CHECK_THROWS_AS(fit_fringe(d, 0.0), config_error);
  Dist tiny;
  tiny.axis = {0.0, 1.0};
  tiny.density = {0.5, 0.5};
  CHECK_THROWS_AS(fit_fringe(tiny, 1.0), config_error);
}

TEST_CASE("distribution comparison identities") {
  const Dist g = gaussian_density(0.0, 1.0);
  const DistComparison self = compare_distributions(g, g);
  CHECK(self.l1 == 0.0);
  CHECK(self.ks == 0.0);
  for (double m : self.dmoment) CHECK(m == 0.0);

  // disjoint unit boxes on a shared axis: L1 = 2, KS = 1
  Dist a, b;
  a.kind = b.kind = Dist::Kind::position;
  const int n = 600;
  const double dx = 3.0 / n;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * dx;
    a.axis.push_back(x);
    b.axis.push_back(x);
    a.density.push_back(x < 1.0 ? 1.0 : 0.0);
    b.density.push_back(x >= 2.0 ? 1.0 : 0.0);
  }
  const DistComparison boxes = compare_distributions(a, b);
  CHECK(boxes.l1 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(boxes.ks == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(boxes.dmoment[0] == doctest::Approx(0.5 - 2.5).epsilon(1e-6));

  // Gaussian vs sigma-shifted Gaussian: KS = Phi(1/2) - Phi(-1/2)
  const DistComparison shifted =
      compare_distributions(gaussian_density(0.0, 1.0), gaussian_density(1.0, 1.0));
  CHECK(shifted.ks == doctest::Approx(0.3829).epsilon(0.02));
  CHECK(shifted.dmoment[0] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("distribution comparison is symmetric and triangular on a shared axis") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const int n = 256;
  auto random_dist = [&]() {
    Dist d;
    d.kind = Dist::Kind::velocity;
    for (int i = 0; i < n; ++i) {
      d.axis.push_back(i * 0.05);
      d.density.push_back(u(eng));
    }
    d.normalize();
    return d;
  };
  for (int trial = 0; trial < 8; ++trial) {
    const Dist a = random_dist(), b = random_dist(), c = random_dist();
    const double ab = compare_distributions(a, b).l1;
    const double ba = compare_distributions(b, a).l1;
    const double bc = compare_distributions(b, c).l1;
    const double ac = compare_distributions(a, c).l1;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ac <= ab + bc + 1e-12);
  }
}

TEST_CASE("distribution comparison re-bins mismatched axes") {
  const Dist fine = gaussian_density(0.2, 1.0, 4000, 8.0);
  const Dist coarse = gaussian_density(0.2, 1.0, 500, 7.0);
  const DistComparison cmp = compare_distributions(fine, coarse);
  CHECK(cmp.l1 < 1e-3);

  Dist wrong_kind = coarse;
  wrong_kind.kind = Dist::Kind::position;
  CHECK_THROWS_AS(compare_distributions(fine, wrong_kind), config_error);
}
