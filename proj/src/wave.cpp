#include "abv/wave.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "abv/xform.hpp"

namespace abv {

namespace detail {

namespace {

// C_n = (-1)^(n/2), the center-to-center phase of the parity trick. Real for even n.
double center_phase(int n) { return ((n / 2) & 1) ? -1.0 : 1.0; }

}  // namespace

void line_to_momentum(cplx* a, const Grid& g) {
  const int n = g.n;
  for (int j = 0; j < n; ++j) a[j] *= parity(j);
  fft(a, n, -1);
  const double scale = center_phase(n) * g.dy() / std::sqrt(2.0 * pi * g.hbar);
  for (int s = 0; s < n; ++s) a[s] *= parity(s) * scale;
}

void line_to_position(cplx* a, const Grid& g) {
  const int n = g.n;
  for (int s = 0; s < n; ++s) a[s] *= parity(s);
  fft(a, n, 1);
  const double scale = center_phase(n) * g.dp() / std::sqrt(2.0 * pi * g.hbar);
  for (int j = 0; j < n; ++j) a[j] *= parity(j) * scale;
}

void apply_momentum_mask(cplx* a, const Grid& g, const std::function<cplx(double)>& mask) {
  const int n = g.n;
  for (int j = 0; j < n; ++j) a[j] *= parity(j);
  fft(a, n, -1);
  const double inv_n = 1.0 / n;
  for (int s = 0; s < n; ++s) a[s] *= mask(g.p(s)) * inv_n;
  fft(a, n, 1);
  for (int j = 0; j < n; ++j) a[j] *= parity(j);
}

double edge_mass(const Wave& w, int edge_bins) {
  const int n = w.grid.n;
  edge_bins = std::min(edge_bins, n / 2);
  double m = 0.0;
  for (int i = 0; i < edge_bins; ++i) m += std::norm(w.amp[i]) + std::norm(w.amp[n - 1 - i]);
  return m * w.spacing();
}

void check_band_edges(const Wave& w, const char* what) {
  const int bins = std::max(2, w.grid.n / 64);
  const double mass = edge_mass(w, bins);
  if (mass > 1e-9) {
    std::ostringstream os;
    os << what << ": probability mass " << mass << " in the outer " << bins
       << " bins per side of the " << (w.rep == Wave::Rep::position ? "position" : "momentum")
       << " axis exceeds 1e-9; enlarge the grid extent or resolution";
    throw guard_error(os.str());
  }
}

}  // namespace detail

double Wave::norm2() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s * spacing();
}

void Wave::normalize() {
  const double n2 = norm2();
  if (!(n2 > 0.0)) throw error("cannot normalize a zero wavefunction");
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : amp) a *= inv;
}

double Wave::max_abs() const {
  double m = 0.0;
  for (const auto& a : amp) m = std::max(m, std::abs(a));
  return m;
}

Wave gaussian_packet(const Grid& grid, double center, double sigma, double k0) {
  if (!(sigma > 0.0)) throw config_error("gaussian_packet: sigma must be positive");
  if (sigma < 4.0 * grid.dy()) {
    std::ostringstream os;
    os << "gaussian_packet: sigma " << sigma << " is below 4 grid spacings (" << 4.0 * grid.dy()
       << "); the packet would be undersampled";
    throw config_error(os.str());
  }
  if (std::abs(center) + 6.0 * sigma > grid.extent) {
    std::ostringstream os;
    os << "gaussian_packet: center " << center << " with sigma " << sigma
       << " does not leave 6 sigma of clearance inside extent " << grid.extent;
    throw config_error(os.str());
  }
  const double sigma_p = grid.hbar / (2.0 * sigma);
  if (std::abs(k0) + 4.0 * sigma_p > grid.p_max()) {
    std::ostringstream os;
    os << "gaussian_packet: momentum k0 " << k0 << " with momentum width " << sigma_p
       << " does not fit the band limit " << grid.p_max();
    throw config_error(os.str());
  }
  Wave w;
  w.grid = grid;
  w.rep = Wave::Rep::position;
  w.amp.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double u = grid.y(j) - center;
    w.amp[j] = std::exp(detail::cplx(-u * u / (4.0 * sigma * sigma), k0 * u / grid.hbar));
  }
  w.normalize();
  return w;
}

Wave ab_superposition(const Grid& grid, const PhysicalParams& params, bool include_phase,
                      bool strict) {
  params.validate();
  if (params.hbar != grid.hbar)
    throw config_error("ab_superposition: grid and params disagree on hbar");
  if (strict && params.L < 8.0 * params.sigma) {
    std::ostringstream os;
    os << "ab_superposition: separation " << params.L << " is under 8 sigma (" << params.sigma
       << "); the packets overlap too much for a clean two-path state";
    throw config_error(os.str());
  }
  const double half = 0.5 * params.L;
  Wave left = gaussian_packet(grid, -half, params.sigma, 0.0);
  Wave right = gaussian_packet(grid, half, params.sigma, 0.0);
  const double mv = params.m * params.v0;
  const double sigma_p = grid.hbar / (2.0 * params.sigma);
  if (std::abs(mv) + 4.0 * sigma_p > grid.p_max()) {
    std::ostringstream os;
    os << "ab_superposition: boost momentum " << mv << " with momentum width " << sigma_p
       << " does not fit the band limit " << grid.p_max();
    throw config_error(os.str());
  }
  const detail::cplx phase =
      include_phase ? std::exp(detail::cplx(0.0, params.alpha)) : detail::cplx(1.0, 0.0);
  Wave w;
  w.grid = grid;
  w.mass = params.m;
  w.rep = Wave::Rep::position;
  w.amp.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    // Diverging boost: the left packet moves toward -y, the right toward +y,
    // so a later converging impulse of the same speed brings both to rest.
    const double y = grid.y(j);
    const detail::cplx boost_l = std::exp(detail::cplx(0.0, -mv * y / grid.hbar));
    const detail::cplx boost_r = std::exp(detail::cplx(0.0, mv * y / grid.hbar));
    w.amp[j] = left.amp[j] * boost_l + phase * right.amp[j] * boost_r;
  }
  w.normalize();
  return w;
}

Wave momentum_amplitudes(const Wave& w) {
  if (w.rep != Wave::Rep::position)
    throw error("momentum_amplitudes: input is already in the momentum representation");
  Wave out = w;
  detail::line_to_momentum(out.amp.data(), out.grid);
  out.rep = Wave::Rep::momentum;
  return out;
}

Wave position_amplitudes(const Wave& w) {
  if (w.rep != Wave::Rep::momentum)
    throw error("position_amplitudes: input is already in the position representation");
  Wave out = w;
  detail::line_to_position(out.amp.data(), out.grid);
  out.rep = Wave::Rep::position;
  return out;
}

Dist velocity_distribution(const Wave& w) {
  const Wave phi = (w.rep == Wave::Rep::momentum) ? w : momentum_amplitudes(w);
  Dist d;
  d.kind = Dist::Kind::velocity;
  d.axis.resize(phi.grid.n);
  d.density.resize(phi.grid.n);
  for (int s = 0; s < phi.grid.n; ++s) {
    d.axis[s] = phi.grid.p(s) / w.mass;
    d.density[s] = w.mass * std::norm(phi.amp[s]);
  }
  d.normalize();
  return d;
}

FourierCoeff fourier_coefficient(const Wave& w, double l) {
  const Dist d = velocity_distribution(w);
  const double dv = d.spacing();
  detail::cplx f = 0.0;
  for (std::size_t s = 0; s < d.axis.size(); ++s)
    f += d.density[s] * std::exp(detail::cplx(0.0, w.mass * d.axis[s] * l / w.hbar())) * dv;
  return {l, f};
}

double moment(const Wave& w, int n) {
  if (n < 0 || n > 8) throw config_error("moment: order must be between 0 and 8");
  const Wave phi = (w.rep == Wave::Rep::momentum) ? w : momentum_amplitudes(w);
  double num = 0.0, den = 0.0;
  for (int s = 0; s < phi.grid.n; ++s) {
    const double rho = std::norm(phi.amp[s]);
    num += std::pow(phi.grid.p(s), n) * rho;
    den += rho;
  }
  if (!(den > 0.0)) throw error("moment: zero wavefunction");
  return num / den;
}

namespace {

// The phase masks below are discontinuous (or kinked) at y = 0. They are only
// legitimate when the wavefunction vanishes there, so refuse otherwise.
void check_cut_clear(const Wave& w, const char* what) {
  if (w.rep != Wave::Rep::position) throw error(std::string(what) + ": needs position amplitudes");
  const double peak = w.max_abs();
  if (!(peak > 0.0)) throw error(std::string(what) + ": zero wavefunction");
  double cut = 0.0;
  for (int j = 0; j < w.grid.n; ++j)
    if (std::abs(w.grid.y(j)) <= w.grid.dy()) cut = std::max(cut, std::abs(w.amp[j]));
  if (cut > 1e-8 * peak) {
    std::ostringstream os;
    os << what << ": amplitude at the y=0 cut is " << cut / peak
       << " of the peak (limit 1e-8); the state does not split cleanly into branches";
    throw guard_error(os.str());
  }
}

}  // namespace

Wave apply_flux_phase(const Wave& w, double alpha) {
  check_cut_clear(w, "apply_flux_phase");
  Wave out = w;
  const detail::cplx phase = std::exp(detail::cplx(0.0, alpha));
  for (int j = 0; j < out.grid.n; ++j)
    if (out.grid.y(j) > 0.0) out.amp[j] *= phase;
  return out;
}

Wave apply_branch_impulse(const Wave& w, double dv) {
  check_cut_clear(w, "apply_branch_impulse");
  Wave out = w;
  const double k = out.mass * dv / out.hbar();
  for (int j = 0; j < out.grid.n; ++j) {
    // Converging kick: +dv on the left branch, -dv on the right.
    const double y = out.grid.y(j);
    out.amp[j] *= std::exp(detail::cplx(0.0, -k * std::abs(y)));
  }
  return out;
}

Wave free_step(const Wave& w, double dt) {
  if (w.rep != Wave::Rep::position) throw error("free_step: needs position amplitudes");
  Wave out = w;
  const double c = dt / (2.0 * out.mass * out.hbar());
  detail::apply_momentum_mask(out.amp.data(), out.grid,
                              [c](double p) { return std::exp(detail::cplx(0.0, -c * p * p)); });
  detail::check_band_edges(out, "free_step");
  return out;
}

}  // namespace abv
