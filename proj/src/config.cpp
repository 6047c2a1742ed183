#include "abv/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace abv {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::before_after: return "before_after";
    case Scenario::measured_ab: return "measured_ab";
    case Scenario::relative_velocity: return "relative_velocity";
    case Scenario::flux_insert_remove: return "flux_insert_remove";
    case Scenario::feasibility: return "feasibility";
    case Scenario::sweep: return "sweep";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s) {
  for (Scenario sc : {Scenario::before_after, Scenario::measured_ab, Scenario::relative_velocity,
                      Scenario::flux_insert_remove, Scenario::feasibility, Scenario::sweep})
    if (s == to_string(sc)) return sc;
  throw config_error("unknown scenario '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw config_error("cannot parse '" + s + "' as a number for " + what);
  }
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw config_error("cannot parse '" + s + "' as an integer for " + what);
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  std::string section, key, value;
  int line = 0;
};

std::vector<Entry> tokenize(const std::string& text) {
  static const char* known_sections[] = {"grid",        "physics", "measurement",
                                         "flux",        "feasibility", "sampling",
                                         "output",      "sweep"};
  std::vector<Entry> entries;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      bool ok = false;
      for (const char* k : known_sections) ok = ok || section == k;
      if (!ok) throw config_error("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return entries;
}

void apply_entry(RunConfig& cfg, const Entry& e) {
  const std::string where = e.key + (e.section.empty() ? "" : " in section [" + e.section + "]");
  auto unknown = [&]() -> void {
    throw config_error("unknown key '" + e.key + "' in section [" + e.section + "]");
  };
  if (e.section.empty()) {
    if (e.key == "scenario")
      cfg.scenario = scenario_from_string(e.value);
    else
      unknown();
  } else if (e.section == "grid") {
    if (e.key == "n_y") cfg.grid.n_y = static_cast<int>(parse_int(e.value, where));
    else if (e.key == "y_extent") cfg.grid.y_extent = parse_double(e.value, where);
    else if (e.key == "n_q") cfg.grid.n_q = static_cast<int>(parse_int(e.value, where));
    else if (e.key == "q_extent") cfg.grid.q_extent = parse_double(e.value, where);
    else unknown();
  } else if (e.section == "physics") {
    if (e.key == "m") cfg.physics.m = parse_double(e.value, where);
    else if (e.key == "hbar") cfg.physics.hbar = parse_double(e.value, where);
    else if (e.key == "L") cfg.physics.L = parse_double(e.value, where);
    else if (e.key == "alpha") cfg.physics.alpha = parse_angle(e.value);
    else if (e.key == "sigma") cfg.physics.sigma = parse_double(e.value, where);
    else if (e.key == "v0") cfg.physics.v0 = parse_double(e.value, where);
    else unknown();
  } else if (e.section == "measurement") {
    if (e.key == "G") cfg.G = parse_double(e.value, where);
    else if (e.key == "T") cfg.T = parse_double(e.value, where);
    else if (e.key == "T0") cfg.T0 = parse_double(e.value, where);
    else if (e.key == "a") {
      if (e.value == "auto") cfg.a.reset();
      else cfg.a = parse_double(e.value, where);
    } else if (e.key == "sigma_q") cfg.sigma_q = parse_double(e.value, where);
    else unknown();
  } else if (e.section == "flux") {
    if (e.key == "recombine_v") cfg.flux.recombine_v = parse_double(e.value, where);
    else if (e.key == "t_overlap") cfg.flux.t_overlap = parse_double(e.value, where);
    else if (e.key == "phase_delay") cfg.flux.phase_delay = parse_double(e.value, where);
    else if (e.key == "impulse_time") cfg.flux.impulse_time = parse_double(e.value, where);
    else unknown();
  } else if (e.section == "feasibility") {
    if (e.key == "mass") cfg.feas.mass = parse_double(e.value, where);
    else if (e.key == "charge") cfg.feas.charge = parse_double(e.value, where);
    else if (e.key == "c") cfg.feas.c = parse_double(e.value, where);
    else if (e.key == "L") cfg.feas.L = parse_double(e.value, where);
    else if (e.key == "flux") cfg.feas.flux = parse_double(e.value, where);
    else if (e.key == "alpha") {
      if (e.value == "auto") cfg.feas.alpha.reset();
      else cfg.feas.alpha = parse_angle(e.value);
    } else if (e.key == "delta_pi0") cfg.feas.delta_pi0 = parse_double(e.value, where);
    else if (e.key == "delta_q0") cfg.feas.delta_q0 = parse_double(e.value, where);
    else if (e.key == "G") cfg.feas.G = parse_double(e.value, where);
    else if (e.key == "T") cfg.feas.T = parse_double(e.value, where);
    else if (e.key == "T0") cfg.feas.T0 = parse_double(e.value, where);
    else unknown();
  } else if (e.section == "sampling") {
    if (e.key == "n_samples") {
      const long long v = parse_int(e.value, where);
      if (v < 0) throw config_error("n_samples must be >= 0");
      cfg.n_samples = static_cast<std::size_t>(v);
    } else if (e.key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(e.value, where));
    } else unknown();
  } else if (e.section == "output") {
    if (e.key == "format") {
      if (e.value == "csv") cfg.format = RunConfig::Format::csv;
      else if (e.value == "json") cfg.format = RunConfig::Format::json;
      else throw config_error("format must be csv or json, got '" + e.value + "'");
    } else if (e.key == "directory") cfg.directory = e.value;
    else unknown();
  } else if (e.section == "sweep") {
    if (e.key == "scenario") {
      cfg.sweep_scenario = scenario_from_string(e.value);
      if (cfg.sweep_scenario == Scenario::sweep)
        throw config_error("a sweep cannot nest another sweep");
    } else if (e.key == "alphas") {
      cfg.sweep_alphas.clear();
      for (const std::string& tok : split_list(e.value))
        cfg.sweep_alphas.push_back(parse_angle(tok));
      if (cfg.sweep_alphas.empty()) throw config_error("sweep alphas list is empty");
    } else unknown();
  }
}

}  // namespace

MeasurementConfig RunConfig::measurement_config(double q_hbar) const {
  MeasurementConfig mc;
  mc.G = G;
  mc.T = T;
  mc.T0 = T0;
  mc.a = a;
  mc.pointer.grid_q = build_grid(grid.n_q, grid.q_extent, q_hbar);
  mc.pointer.sigma_q = sigma_q;
  return mc;
}

void apply_scenario_defaults(RunConfig& cfg) {
  cfg.grid = GridSpec{};
  cfg.physics = PhysicalParams{};
  switch (cfg.scenario) {
    case Scenario::before_after:
      cfg.physics.L = 10.0;
      cfg.physics.sigma = 0.5;
      cfg.physics.alpha = pi / 2.0;
      break;
    case Scenario::measured_ab:
      cfg.grid.n_y = 1024;
      cfg.physics.L = 8.0;
      cfg.physics.sigma = 0.5;
      cfg.physics.alpha = pi / 2.0;
      cfg.G = 0.5;
      cfg.T = 2.0;
      cfg.T0 = 0.0;
      cfg.a.reset();
      cfg.sigma_q = 6.4;
      cfg.n_samples = 100000;
      break;
    case Scenario::relative_velocity:
      cfg.physics.L = 10.0;
      cfg.physics.sigma = 0.5;
      cfg.physics.alpha = pi / 2.0;
      cfg.physics.v0 = 8.0;
      break;
    case Scenario::flux_insert_remove:
      cfg.grid.y_extent = 40.0;
      cfg.physics.L = 20.0;
      cfg.physics.sigma = 1.0;
      cfg.physics.alpha = pi;
      cfg.flux = FluxInsertParams{};
      break;
    case Scenario::feasibility:
      cfg.feas = electron_defaults();
      break;
    case Scenario::sweep:
      cfg.physics.L = 10.0;
      cfg.physics.sigma = 0.5;
      cfg.sweep_scenario = Scenario::before_after;
      cfg.sweep_alphas.clear();
      for (int k = -7; k <= 8; ++k) cfg.sweep_alphas.push_back(k * pi / 8.0);
      break;
  }
}

RunConfig parse_config(const std::string& text) {
  const std::vector<Entry> entries = tokenize(text);
  RunConfig cfg;
  for (const Entry& e : entries)
    if (e.section.empty() && e.key == "scenario") cfg.scenario = scenario_from_string(e.value);
  apply_scenario_defaults(cfg);
  for (const Entry& e : entries) apply_entry(cfg, e);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "scenario = " << to_string(cfg.scenario) << "\n\n";
  os << "[grid]\n"
     << "n_y = " << cfg.grid.n_y << "\n"
     << "y_extent = " << fmt_g(cfg.grid.y_extent) << "\n"
     << "n_q = " << cfg.grid.n_q << "\n"
     << "q_extent = " << fmt_g(cfg.grid.q_extent) << "\n\n";
  os << "[physics]\n"
     << "m = " << fmt_g(cfg.physics.m) << "\n"
     << "hbar = " << fmt_g(cfg.physics.hbar) << "\n"
     << "L = " << fmt_g(cfg.physics.L) << "\n"
     << "alpha = " << fmt_g(cfg.physics.alpha) << "\n"
     << "sigma = " << fmt_g(cfg.physics.sigma) << "\n"
     << "v0 = " << fmt_g(cfg.physics.v0) << "\n\n";
  os << "[measurement]\n"
     << "G = " << fmt_g(cfg.G) << "\n"
     << "T = " << fmt_g(cfg.T) << "\n"
     << "T0 = " << fmt_g(cfg.T0) << "\n"
     << "a = " << (cfg.a ? fmt_g(*cfg.a) : std::string("auto")) << "\n"
     << "sigma_q = " << fmt_g(cfg.sigma_q) << "\n\n";
  os << "[flux]\n"
     << "recombine_v = " << fmt_g(cfg.flux.recombine_v) << "\n"
     << "t_overlap = " << fmt_g(cfg.flux.t_overlap) << "\n"
     << "phase_delay = " << fmt_g(cfg.flux.phase_delay) << "\n"
     << "impulse_time = " << fmt_g(cfg.flux.impulse_time) << "\n\n";
  os << "[feasibility]\n"
     << "mass = " << fmt_g(cfg.feas.mass) << "\n"
     << "charge = " << fmt_g(cfg.feas.charge) << "\n"
     << "c = " << fmt_g(cfg.feas.c) << "\n"
     << "L = " << fmt_g(cfg.feas.L) << "\n"
     << "flux = " << fmt_g(cfg.feas.flux) << "\n"
     << "alpha = " << (cfg.feas.alpha ? fmt_g(*cfg.feas.alpha) : std::string("auto")) << "\n"
     << "delta_pi0 = " << fmt_g(cfg.feas.delta_pi0) << "\n"
     << "delta_q0 = " << fmt_g(cfg.feas.delta_q0) << "\n"
     << "G = " << fmt_g(cfg.feas.G) << "\n"
     << "T = " << fmt_g(cfg.feas.T) << "\n"
     << "T0 = " << fmt_g(cfg.feas.T0) << "\n\n";
  os << "[sampling]\n"
     << "n_samples = " << cfg.n_samples << "\n"
     << "seed = " << cfg.seed << "\n\n";
  os << "[output]\n"
     << "format = " << (cfg.format == RunConfig::Format::csv ? "csv" : "json") << "\n"
     << "directory = " << cfg.directory << "\n\n";
  os << "[sweep]\n"
     << "scenario = " << to_string(cfg.sweep_scenario) << "\n"
     << "alphas = ";
  for (std::size_t i = 0; i < cfg.sweep_alphas.size(); ++i)
    os << (i ? ", " : "") << fmt_g(cfg.sweep_alphas[i]);
  os << "\n";
  return os.str();
}

double parse_angle(const std::string& raw) {
  const std::string s = trim(raw);
  const auto p = s.find("pi");
  if (p == std::string::npos) return parse_double(s, "angle");
  const std::string pre = trim(s.substr(0, p));
  const std::string post = trim(s.substr(p + 2));
  double coef = 1.0;
  if (pre == "-") coef = -1.0;
  else if (!pre.empty() && pre != "+") coef = parse_double(pre, "angle");
  double divisor = 1.0;
  if (!post.empty()) {
    if (post.front() != '/') throw config_error("cannot parse angle '" + raw + "'");
    divisor = parse_double(trim(post.substr(1)), "angle");
    if (divisor == 0.0) throw config_error("angle '" + raw + "' divides by zero");
  }
  return coef * pi / divisor;
}

}  // namespace abv
