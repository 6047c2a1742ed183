#include "abv/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "abv/errors.hpp"

namespace abv {

Dist histogram(const SampleSet& samples, int bins, double lo, double hi, Dist::Kind kind) {
  if (bins < 4) throw config_error("histogram: need at least 4 bins");
  if (!(hi > lo)) throw config_error("histogram: need hi > lo");
  if (samples.values.empty()) throw error("histogram: empty sample set");
  const double w = (hi - lo) / bins;
  std::vector<double> count(bins, 0.0);
  std::size_t in_range = 0;
  for (double x : samples.values) {
    if (x < lo || x >= hi) continue;
    ++count[static_cast<int>((x - lo) / w)];
    ++in_range;
  }
  const double coverage = static_cast<double>(in_range) / samples.values.size();
  if (coverage < 0.99) {
    std::ostringstream os;
    os << "histogram: range [" << lo << ", " << hi << ") covers only " << coverage * 100.0
       << "% of the samples";
    throw error(os.str());
  }
  Dist d;
  d.kind = kind;
  d.axis.resize(bins);
  d.density.resize(bins);
  for (int i = 0; i < bins; ++i) {
    d.axis[i] = lo + (i + 0.5) * w;
    d.density[i] = count[i] / (in_range * w);
  }
  return d;
}

namespace {

constexpr int kNP = 5;  // A, mu, s, V, phase

struct Model {
  double omega;
  double eval(const std::array<double, kNP>& t, double x, double* grad = nullptr) const {
    const double A = t[0], mu = t[1], s = t[2], V = t[3], ph = t[4];
    const double u = (x - mu) / s;
    const double env = std::exp(-0.5 * u * u);
    const double carrier = 1.0 + V * std::cos(omega * x - ph);
    const double f = A * env * carrier;
    if (grad) {
      grad[0] = env * carrier;
      grad[1] = f * u / s;
      grad[2] = f * u * u / s;
      grad[3] = A * env * std::cos(omega * x - ph);
      grad[4] = A * env * V * std::sin(omega * x - ph);
    }
    return f;
  }
};

// Solve M dx = b for a small symmetric system; Gaussian elimination with
// partial pivoting. Returns false on a (numerically) singular matrix.
bool solve5(std::array<std::array<double, kNP>, kNP> m, std::array<double, kNP>& b) {
  for (int col = 0; col < kNP; ++col) {
    int piv = col;
    for (int r = col + 1; r < kNP; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) return false;
    std::swap(m[col], m[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < kNP; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < kNP; ++k) m[r][k] -= f * m[col][k];
      b[r] -= f * b[col];
    }
  }
  for (int col = kNP - 1; col >= 0; --col) {
    double s = b[col];
    for (int k = col + 1; k < kNP; ++k) s -= m[col][k] * b[k];
    b[col] = s / m[col][col];
  }
  return true;
}

double chi2(const Model& mdl, const std::array<double, kNP>& t, const Dist& d) {
  double c = 0.0;
  for (std::size_t i = 0; i < d.axis.size(); ++i) {
    const double r = d.density[i] - mdl.eval(t, d.axis[i]);
    c += r * r;
  }
  return c;
}

}  // namespace

FringeFit fit_fringe(const Dist& dist, double omega) {
  if (!(omega > 0.0)) throw config_error("fit_fringe: omega must be positive");
  if (dist.axis.size() < 8) throw config_error("fit_fringe: distribution too small");
  const double delta = dist.spacing();
  const std::size_t n = dist.axis.size();

  // Moment and first-harmonic initialization.
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += dist.density[i] * delta;
    mean += dist.axis[i] * dist.density[i] * delta;
  }
  if (!(total > 0.0)) throw error("fit_fringe: zero distribution");
  mean /= total;
  double var = 0.0;
  std::complex<double> harm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = dist.axis[i];
    var += (x - mean) * (x - mean) * dist.density[i] * delta;
    harm += dist.density[i] * delta * std::exp(std::complex<double>(0.0, omega * x));
  }
  var /= total;
  harm /= total;

  Model mdl{omega};
  std::array<double, kNP> t{};
  t[2] = std::max(std::sqrt(std::max(var, 0.0)), 2.0 * delta);
  t[1] = mean;
  t[0] = total / (std::sqrt(2.0 * pi) * t[2]);
  t[3] = std::clamp(2.0 * std::abs(harm), 0.0, 1.5);
  t[4] = std::arg(harm);

  double lambda = 1e-3;
  double best = chi2(mdl, t, dist);
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    std::array<std::array<double, kNP>, kNP> jtj{};
    std::array<double, kNP> jtr{};
    double grad[kNP];
    for (std::size_t i = 0; i < n; ++i) {
      const double r = dist.density[i] - mdl.eval(t, dist.axis[i], grad);
      for (int a = 0; a < kNP; ++a) {
        jtr[a] += grad[a] * r;
        for (int b = a; b < kNP; ++b) jtj[a][b] += grad[a] * grad[b];
      }
    }
    for (int a = 0; a < kNP; ++a)
      for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      auto m = jtj;
      for (int a = 0; a < kNP; ++a) m[a][a] += lambda * std::max(jtj[a][a], 1e-300);
      auto step = jtr;
      if (solve5(m, step)) {
        auto cand = t;
        for (int a = 0; a < kNP; ++a) cand[a] += step[a];
        cand[0] = std::abs(cand[0]);
        cand[2] = std::max(std::abs(cand[2]), 0.5 * delta);
        const double c = chi2(mdl, cand, dist);
        if (c < best) {
          improved = true;
          const double rel = (best - c) / std::max(best, 1e-300);
          t = cand;
          best = c;
          lambda = std::max(lambda / 3.0, 1e-12);
          if (rel < 1e-12) {
            converged = true;
          }
          break;
        }
      }
      lambda *= 7.0;
    }
    if (!improved) {
      converged = true;  // stuck at a minimum the damping cannot leave
      break;
    }
    if (converged) break;
  }

  FringeFit out;
  out.converged = converged;
  out.period = 2.0 * pi / omega;
  out.amplitude = t[0];
  out.mu = t[1];
  out.width = t[2];
  double V = t[3], ph = t[4];
  if (V < 0.0) {
    V = -V;
    ph += pi;
  }
  out.visibility = std::clamp(V, 0.0, 1.0);
  out.alpha_hat = wrap_angle(ph);
  double peak = 0.0;
  for (double v : dist.density) peak = std::max(peak, v);
  out.residual = peak > 0.0 ? std::sqrt(best / n) / peak : 1.0;
  out.reliable = out.converged && out.visibility >= 0.2 && out.residual <= 0.1;
  return out;
}

FringeFit fit_fringe(const Dist& dist, const PhysicalParams& params) {
  return fit_fringe(dist, params.m * params.L / params.hbar);
}

DistComparison compare_distributions(const Dist& a, const Dist& b) {
  if (a.kind != b.kind) throw config_error("compare_distributions: kinds differ");
  if (a.axis.size() < 2 || b.axis.size() < 2)
    throw config_error("compare_distributions: distributions too small");
  const double da = a.spacing();

  // Re-bin b onto a's axis unless the axes already agree.
  std::vector<double> bd(a.axis.size());
  bool same = a.axis.size() == b.axis.size();
  if (same) {
    const double tol = 1e-9 * (std::abs(a.axis.back()) + da);
    for (std::size_t i = 0; same && i < a.axis.size(); ++i)
      same = std::abs(a.axis[i] - b.axis[i]) <= tol;
  }
  if (same) {
    bd.assign(b.density.begin(), b.density.end());
  } else {
    for (std::size_t i = 0; i < a.axis.size(); ++i) {
      const double x = a.axis[i];
      if (x <= b.axis.front() || x >= b.axis.back()) {
        bd[i] = 0.0;
        continue;
      }
      const auto it = std::upper_bound(b.axis.begin(), b.axis.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - b.axis.begin());
      const double f = (x - b.axis[k - 1]) / (b.axis[k] - b.axis[k - 1]);
      bd[i] = (1.0 - f) * b.density[k - 1] + f * b.density[k];
    }
  }

  DistComparison out;
  double ca = 0.0, cb = 0.0;
  for (std::size_t i = 0; i < a.axis.size(); ++i) {
    const double diff = a.density[i] - bd[i];
    out.l1 += std::abs(diff) * da;
    ca += a.density[i] * da;
    cb += bd[i] * da;
    out.ks = std::max(out.ks, std::abs(ca - cb));
    double xp = 1.0;
    for (int nmom = 0; nmom < 4; ++nmom) {
      xp *= a.axis[i];
      out.dmoment[nmom] += xp * diff * da;
    }
  }
  return out;
}

}  // namespace abv
