#include "abv/vnmeas.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "abv/xform.hpp"

namespace abv {

Composite measure_position_impulsive(const Composite& c, double G) {
  return coupling_kick(c, G);
}

Composite measure_velocity_two_position(const Composite& c, const MeasurementConfig& cfg,
                                        double dt) {
  cfg.validate();
  Composite s = c;
  if (cfg.T0 == 0.0) {
    s = coupling_kick(s, -cfg.G);
    s = drift_composite(s, cfg.T);
    s = coupling_kick(s, cfg.G);
  } else {
    // Finite kicks: rect windows [0, T0] and [T, T + T0], free drift between.
    const double g0 = cfg.G / cfg.T0;
    const double step = dt > 0.0 ? dt : cfg.T0;  // 32-steps-per-segment floor applies
    const Gate w1{Gate::Kind::rect, -g0, cfg.T0, 0.0};
    const Gate w2{Gate::Kind::rect, +g0, cfg.T0, 0.0};
    s = evolve_coupled(s, w1, step, CouplingForm::position);
    s = drift_composite(s, cfg.T - cfg.T0);
    s = evolve_coupled(s, w2, step, CouplingForm::position);
  }
  s = compensation_kick(s, cfg.a_effective(c.mass));
  s.check_norm("measure_velocity_two_position");
  return s;
}

Composite measure_velocity_continuous(const Composite& c, const MeasurementConfig& cfg,
                                      double dt) {
  cfg.validate();
  if (cfg.G == 0.0) return c;  // apparatus off, no interaction window
  Gate gate;
  if (cfg.T0 == 0.0) {
    // Instant-switch plateau; the constant coupling is encoded as g0 * T0 with
    // a nominal T0 = 1 (rect velocity gates have no ramp).
    gate = Gate{Gate::Kind::rect, cfg.G, 1.0, cfg.T};
  } else {
    gate = Gate{Gate::Kind::ramp_plateau_ramp, cfg.G / cfg.T0, cfg.T0, cfg.T};
  }
  const double step = dt > 0.0 ? dt : gate.duration();
  Composite s = evolve_coupled(c, gate, step, CouplingForm::velocity);
  s.check_norm("measure_velocity_continuous");
  return s;
}

Dist pointer_distribution(const Composite& c) { return pointer_momentum_marginal(c); }

Dist pointer_distribution_as_velocity(const Composite& c, const MeasurementConfig& cfg) {
  const double scale = cfg.G * cfg.T;
  if (scale == 0.0)
    throw config_error("pointer_distribution_as_velocity: G*T must be nonzero");
  Dist d = pointer_momentum_marginal(c);
  d.kind = Dist::Kind::velocity;
  for (auto& x : d.axis) x /= scale;
  for (auto& r : d.density) r *= std::abs(scale);
  if (scale < 0.0) {
    std::reverse(d.axis.begin(), d.axis.end());
    std::reverse(d.density.begin(), d.density.end());
  }
  return d;
}

Dist conditional_velocity_given_pointer(const Composite& c, double pi0) {
  detail::check_band_edges_pi(c, "conditional_velocity_given_pointer");
  Composite t = c;
  const int ny = t.ny(), nq = t.nq();
  for (int iq = 1; iq < nq; iq += 2)
    for (int iy = 0; iy < ny; ++iy) t.at(iy, iq) = -t.at(iy, iq);
  detail::fft_many(t.amp.data(), nq, ny, ny, 1, -1);
  // Bin is now pointer momentum: index is holds pi = (is - nq/2) dpi.
  const double dpi = c.grid_q.dp();
  int is0 = static_cast<int>(std::lround(pi0 / dpi)) + nq / 2;
  is0 = std::clamp(is0, 0, nq - 1);
  std::vector<cplx> line(ny);
  for (int iy = 0; iy < ny; ++iy) line[iy] = t.at(iy, is0);
  detail::line_to_momentum(line.data(), c.grid_y);
  Dist d;
  d.kind = Dist::Kind::velocity;
  d.axis.resize(ny);
  d.density.resize(ny);
  double total = 0.0;
  for (int s = 0; s < ny; ++s) {
    d.axis[s] = c.grid_y.p(s) / c.mass;
    d.density[s] = c.mass * std::norm(line[s]);
    total += d.density[s];
  }
  if (!(total > 0.0)) {
    std::ostringstream os;
    os << "conditional_velocity_given_pointer: no probability mass at pi = " << pi0;
    throw error(os.str());
  }
  d.normalize();
  return d;
}

SampleSet sample_pointer(const Dist& dist, std::size_t n, std::uint64_t seed) {
  if (dist.axis.size() < 2) throw config_error("sample_pointer: distribution too small");
  const double delta = dist.spacing();
  std::vector<double> cdf(dist.density.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.density.size(); ++k) {
    if (dist.density[k] < 0.0) throw error("sample_pointer: negative density");
    acc += dist.density[k] * delta;
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw error("sample_pointer: zero distribution");
  SampleSet out;
  out.seed = seed;
  out.n = n;
  out.values.reserve(n);
  std::mt19937_64 eng(seed);
  constexpr double inv53 = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t i = 0; i < n; ++i) {
    const double target = static_cast<double>(eng() >> 11) * inv53 * acc;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    const double prev = k ? cdf[k - 1] : 0.0;
    const double w = cdf[k] - prev;
    const double frac = w > 0.0 ? (target - prev) / w : 0.5;
    out.values.push_back(dist.axis[k] - 0.5 * delta + frac * delta);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

FeasibilityCheck make_check(std::string name, std::string req, double ratio, bool pass) {
  FeasibilityCheck c;
  c.name = std::move(name);
  c.requirement = std::move(req);
  c.ratio = ratio;
  c.pass = pass;
  return c;
}

}  // namespace

FeasibilityReport feasibility_report(const FeasibilityInput& in) {
  if (!(in.mass > 0.0) || !(in.L > 0.0) || !(in.c > 0.0))
    throw config_error("feasibility_report: mass, L, c must be positive");
  FeasibilityReport r;
  r.in = in;
  const double hb = r.hbar;
  const double h = 2.0 * pi * hb;
  r.alpha = in.alpha ? *in.alpha : -in.charge * in.flux / (hb * in.c);
  r.delta_v = h / (in.mass * in.L);
  r.lambda_compton = hb / (in.mass * in.c);
  r.t_compton = h / (in.mass * in.c * in.c);
  r.light_time = in.L / in.c;
  if (!(in.delta_pi0 > 0.0))
    throw config_error("feasibility_report: delta_pi0 must be positive");
  r.delta_q0 = in.delta_q0 > 0.0 ? in.delta_q0 : hb / (2.0 * in.delta_pi0);

  const double gt_over_m = in.G * in.T / in.mass;
  const double kick_speed = in.G * r.delta_q0 / in.mass;
  std::vector<FeasibilityCheck>& ck = r.checks;

  // ">>" passes at ratio >= 10, "<<" at ratio <= 0.1, plain bounds at face value.
  ck.push_back(make_check("pointer_reads_position", "G*(L/2) >> Delta_pi(0)",
                          in.G * 0.5 * in.L / in.delta_pi0,
                          in.G * 0.5 * in.L / in.delta_pi0 >= 10.0));
  {
    const double lhs = in.G * in.G * r.delta_q0 * in.T0 / (6.0 * in.mass);
    ck.push_back(make_check("kick_chirp_negligible",
                            "G^2*Delta_q(0)*T0/(6m) <= Delta_pi(0)", lhs / in.delta_pi0,
                            lhs <= in.delta_pi0));
  }
  {
    const double threshold = gt_over_m * std::abs(r.alpha) * h / in.L;
    ck.push_back(make_check("fringe_resolvable", "Delta_pi(0) << (GT/m)*|alpha|*h/L",
                            in.delta_pi0 / threshold, in.delta_pi0 / threshold <= 0.1));
  }
  ck.push_back(make_check("subluminal_kick", "G*Delta_q(0)/m <= c", kick_speed / in.c,
                          kick_speed <= in.c));
  ck.push_back(make_check("kick_spans_separation", "G*Delta_q(0)/m >> L/T",
                          kick_speed / (in.L / in.T), kick_speed / (in.L / in.T) >= 10.0));
  {
    const double dy = in.delta_pi0 / in.G;  // position resolution of the pointer
    ck.push_back(make_check("position_resolution_compton", "Delta_pi(0)/G >> lambda_c",
                            dy / r.lambda_compton, dy / r.lambda_compton >= 10.0));
  }
  ck.push_back(make_check("kick_duration_compton", "T0 >> h/(m c^2)", in.T0 / r.t_compton,
                          in.T0 / r.t_compton >= 10.0));
  ck.push_back(make_check("drift_exceeds_light_time", "T >> L/c", in.T / r.light_time,
                          in.T / r.light_time >= 10.0));
  ck.push_back(
      make_check("impulsive_hierarchy", "T >= 20*T0", in.T / (20.0 * in.T0),
                 in.T >= 20.0 * in.T0));

  r.all_pass = std::all_of(ck.begin(), ck.end(), [](const FeasibilityCheck& x) { return x.pass; });
  return r;
}

FeasibilityInput electron_defaults() {
  FeasibilityInput in;  // mass, charge, c, L, flux already carry the electron values
  in.T = 8.0e-12;
  in.T0 = 1.0e-19;
  in.G = in.mass / in.T;                 // GT/m = 1
  in.delta_pi0 = 6.5911e-26;             // g*cm/s; Delta_q(0) derived ~ 80 um
  in.delta_q0 = 0.0;
  return in;
}

double resolvability_ratio(const MeasurementConfig& cfg, const PhysicalParams& params) {
  const double h = 2.0 * pi * params.hbar;
  const double threshold = cfg.G * cfg.T * h / (params.m * params.L);
  if (!(threshold > 0.0))
    throw config_error("resolvability_ratio: G*T and L must be positive");
  return cfg.pointer.sigma_pi() / threshold;
}

}  // namespace abv
