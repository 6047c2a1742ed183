#include "abv/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace abv {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* to_string(ScenarioCheck::Kind k) {
  switch (k) {
    case ScenarioCheck::Kind::exact: return "exact";
    case ScenarioCheck::Kind::numerical: return "numerical";
    case ScenarioCheck::Kind::statistical: return "statistical";
    case ScenarioCheck::Kind::configuration: return "configuration";
  }
  return "?";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path.string());
  out << text;
  if (!out) throw error("write failed for " + path.string());
}

std::string dist_csv(const Dist& d) {
  std::string s = "axis,density\n";
  for (std::size_t i = 0; i < d.axis.size(); ++i)
    s += fmt_g(d.axis[i]) + "," + fmt_g(d.density[i]) + "\n";
  return s;
}

ordered_json dist_json(const Dist& d) {
  ordered_json j;
  j["kind"] = to_string(d.kind);
  j["axis"] = d.axis;
  j["density"] = d.density;
  return j;
}

std::string fourier_csv(const std::map<std::string, FourierCoeff>& fc) {
  std::string s = "name,l,re,im\n";
  for (const auto& [name, c] : fc)
    s += name + "," + fmt_g(c.l) + "," + fmt_g(c.value.real()) + "," + fmt_g(c.value.imag()) +
         "\n";
  return s;
}

std::string samples_csv(const SampleSet& s) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < s.values.size(); ++i)
    out += std::to_string(i) + "," + fmt_g(s.values[i]) + "\n";
  return out;
}

int exit_code_of(const ScenarioResult& r) {
  bool stat = false, other = false;
  for (const ScenarioCheck& c : r.checks) {
    if (c.passed) continue;
    (c.kind == ScenarioCheck::Kind::statistical ? stat : other) = true;
  }
  if (other) return 1;
  return stat ? exit_statistical_failure : exit_ok;
}

ScenarioResult build_scenario(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::before_after:
      return scenario_before_after(cfg.grid, cfg.physics);
    case Scenario::measured_ab:
      return scenario_measured_ab(cfg.grid, cfg.physics,
                                  cfg.measurement_config(cfg.physics.hbar), cfg.n_samples,
                                  cfg.seed);
    case Scenario::relative_velocity:
      return scenario_relative_velocity(cfg.grid, cfg.physics);
    case Scenario::flux_insert_remove:
      return scenario_flux_insert_remove(cfg.grid, cfg.physics, cfg.flux);
    case Scenario::feasibility:
      return scenario_feasibility(cfg.feas);
    case Scenario::sweep:
      break;
  }
  throw config_error("sweep points cannot nest another sweep");
}

/// Writes every artifact of one finished scenario into dir; returns the
/// summary path.
std::string write_result(const fs::path& dir, const RunConfig& cfg, const ScenarioResult& r) {
  fs::create_directories(dir);
  write_text(dir / "config_echo.ini", render_config(cfg));

  std::vector<std::string> files{"config_echo.ini"};
  const bool csv = cfg.format == RunConfig::Format::csv;
  for (const auto& [name, dist] : r.distributions) {
    const std::string fname = name + (csv ? ".csv" : ".json");
    if (csv)
      write_text(dir / fname, dist_csv(dist));
    else
      write_text(dir / fname, dist_json(dist).dump(2) + "\n");
    files.push_back(fname);
  }
  if (!r.fourier.empty()) {
    const std::string fname = csv ? "fourier.csv" : "fourier.json";
    if (csv) {
      write_text(dir / fname, fourier_csv(r.fourier));
    } else {
      ordered_json j = ordered_json::object();
      for (const auto& [name, fc] : r.fourier)
        j[name] = {{"l", fc.l}, {"re", fc.value.real()}, {"im", fc.value.imag()}};
      write_text(dir / fname, j.dump(2) + "\n");
    }
    files.push_back(fname);
  }
  if (r.samples) {
    const std::string fname = csv ? "samples.csv" : "samples.json";
    if (csv) {
      write_text(dir / fname, samples_csv(*r.samples));
    } else {
      ordered_json j;
      j["seed"] = r.samples->seed;
      j["n"] = r.samples->n;
      j["values"] = r.samples->values;
      write_text(dir / fname, j.dump(2) + "\n");
    }
    files.push_back(fname);
  }

  ordered_json j;
  j["label"] = r.label;
  j["scenario"] = to_string(cfg.scenario);
  j["exit_code"] = exit_code_of(r);
  j["warnings"] = r.warnings;
  ordered_json js = ordered_json::object();
  for (const auto& [name, value] : r.scalars) js[name] = value;
  j["scalars"] = js;
  ordered_json jf = ordered_json::object();
  for (const auto& [name, fc] : r.fourier) {
    jf[name] = {{"l", fc.l}, {"re", fc.value.real()}, {"im", fc.value.imag()}};
  }
  j["fourier"] = jf;
  ordered_json jc = ordered_json::array();
  for (const ScenarioCheck& c : r.checks)
    jc.push_back({{"name", c.name},
                  {"kind", to_string(c.kind)},
                  {"passed", c.passed},
                  {"detail", c.detail}});
  j["checks"] = jc;
  j["files"] = files;
  const fs::path summary = dir / "summary.json";
  write_text(summary, j.dump(2) + "\n");
  return summary.string();
}

int thread_count(std::size_t points) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ABV_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw config_error("ABV_THREADS is not an integer: '" + std::string(env) + "'");
    }
  }
  return std::clamp(n, 1, static_cast<int>(points));
}

}  // namespace

RunStatus run(const RunConfig& cfg) {
  if (cfg.scenario != Scenario::sweep) {
    const ScenarioResult r = build_scenario(cfg);
    RunStatus st;
    st.exit_code = exit_code_of(r);
    st.summary_path = write_result(cfg.directory, cfg, r);
    return st;
  }

  if (cfg.sweep_alphas.empty()) throw config_error("sweep needs a nonempty alphas list");
  const std::size_t npoints = cfg.sweep_alphas.size();
  std::vector<RunConfig> point_cfgs(npoints, cfg);
  for (std::size_t i = 0; i < npoints; ++i) {
    char sub[32];
    std::snprintf(sub, sizeof sub, "point_%02zu", i);
    point_cfgs[i].scenario = cfg.sweep_scenario;
    point_cfgs[i].physics.alpha = cfg.sweep_alphas[i];
    point_cfgs[i].directory = (fs::path(cfg.directory) / sub).string();
  }

  // Compute in parallel, write sequentially: the output bytes depend only on
  // the configs, never on scheduling.
  std::vector<ScenarioResult> results(npoints);
  std::vector<std::string> errors(npoints);
  std::vector<int> codes(npoints, exit_ok);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= npoints) return;
      try {
        results[i] = build_scenario(point_cfgs[i]);
        codes[i] = exit_code_of(results[i]);
      } catch (const config_error& e) {
        errors[i] = e.what();
        codes[i] = exit_config_error;
      } catch (const guard_error& e) {
        errors[i] = e.what();
        codes[i] = exit_guard_error;
      } catch (const std::exception& e) {
        errors[i] = e.what();
        codes[i] = 1;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = thread_count(npoints);
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  const fs::path dir(cfg.directory);
  fs::create_directories(dir);
  write_text(dir / "config_echo.ini", render_config(cfg));

  ordered_json points = ordered_json::array();
  std::string csv_rows;
  std::vector<std::string> scalar_keys;
  for (std::size_t i = 0; i < npoints; ++i) {
    ordered_json p;
    p["alpha"] = cfg.sweep_alphas[i];
    p["directory"] = fs::path(point_cfgs[i].directory).filename().string();
    p["exit_code"] = codes[i];
    if (!errors[i].empty()) {
      p["error"] = errors[i];
    } else {
      write_result(point_cfgs[i].directory, point_cfgs[i], results[i]);
      if (scalar_keys.empty())
        for (const auto& [k, v] : results[i].scalars)
          if (k != "alpha") scalar_keys.push_back(k);
      ordered_json s = ordered_json::object();
      for (const auto& [k, v] : results[i].scalars) s[k] = v;
      p["scalars"] = s;
    }
    points.push_back(p);
  }

  std::string header = "alpha,exit_code";
  for (const std::string& k : scalar_keys) header += "," + k;
  csv_rows = header + "\n";
  for (std::size_t i = 0; i < npoints; ++i) {
    csv_rows += fmt_g(cfg.sweep_alphas[i]) + "," + std::to_string(codes[i]);
    for (const std::string& k : scalar_keys) {
      csv_rows += ",";
      if (errors[i].empty()) {
        const auto it = results[i].scalars.find(k);
        if (it != results[i].scalars.end()) csv_rows += fmt_g(it->second);
      }
    }
    csv_rows += "\n";
  }
  write_text(dir / "sweep.csv", csv_rows);

  RunStatus st;
  bool any_ok = false, any_err = false;
  for (std::size_t i = 0; i < npoints; ++i) {
    (errors[i].empty() ? any_ok : any_err) = true;
    if (codes[i] == exit_config_error) st.exit_code = exit_config_error;
  }
  if (st.exit_code == exit_ok)
    for (int c : codes)
      if (c == exit_guard_error) st.exit_code = exit_guard_error;
  if (st.exit_code == exit_ok)
    for (int c : codes)
      if (c == 1) st.exit_code = 1;
  if (st.exit_code == exit_ok)
    for (int c : codes)
      if (c == exit_statistical_failure) st.exit_code = exit_statistical_failure;
  st.partial = any_err && any_ok;

  ordered_json j;
  j["label"] = "sweep";
  j["scenario"] = to_string(cfg.sweep_scenario);
  j["exit_code"] = st.exit_code;
  j["partial"] = st.partial;
  j["points"] = points;
  j["files"] = {"config_echo.ini", "sweep.csv"};
  const fs::path summary = dir / "summary.json";
  write_text(summary, j.dump(2) + "\n");
  st.summary_path = summary.string();
  return st;
}

}  // namespace abv
