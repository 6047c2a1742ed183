#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "abv/runner.hpp"
#include "json.hpp"

namespace {

using abv::RunConfig;
using abv::Scenario;

struct CliOverrides {
  std::string config_path;
  std::string out;
  std::string format;
  std::string alpha;
  std::string a;
  std::string sweep_alphas;
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
  std::optional<double> L, sigma, v0, G, T, T0, sigma_q;
  std::optional<double> recombine_v, t_overlap, phase_delay, impulse_time;
  std::string sweep_target;
  bool print_config = false;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
  if (!o.out.empty()) cfg.directory = o.out;
  if (!o.format.empty()) {
    if (o.format == "csv")
      cfg.format = RunConfig::Format::csv;
    else if (o.format == "json")
      cfg.format = RunConfig::Format::json;
    else
      throw abv::config_error("format must be csv or json, got '" + o.format + "'");
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples) {
    if (*o.samples < 0) throw abv::config_error("samples must be >= 0");
    cfg.n_samples = static_cast<std::size_t>(*o.samples);
  }
  if (!o.alpha.empty()) cfg.physics.alpha = abv::parse_angle(o.alpha);
  if (o.L) cfg.physics.L = *o.L;
  if (o.sigma) cfg.physics.sigma = *o.sigma;
  if (o.v0) cfg.physics.v0 = *o.v0;
  if (o.G) cfg.G = *o.G;
  if (o.T) cfg.T = *o.T;
  if (o.T0) cfg.T0 = *o.T0;
  if (o.sigma_q) cfg.sigma_q = *o.sigma_q;
  if (!o.a.empty()) {
    if (o.a == "auto")
      cfg.a.reset();
    else
      cfg.a = abv::parse_angle(o.a);  // plain-number path of the angle parser
  }
  if (o.recombine_v) cfg.flux.recombine_v = *o.recombine_v;
  if (o.t_overlap) cfg.flux.t_overlap = *o.t_overlap;
  if (o.phase_delay) cfg.flux.phase_delay = *o.phase_delay;
  if (o.impulse_time) cfg.flux.impulse_time = *o.impulse_time;
  if (!o.sweep_target.empty()) {
    cfg.sweep_scenario = abv::scenario_from_string(o.sweep_target);
    if (cfg.sweep_scenario == Scenario::sweep)
      throw abv::config_error("sweep cannot target itself");
  }
  if (!o.sweep_alphas.empty()) {
    cfg.sweep_alphas.clear();
    std::string tail = o.sweep_alphas;
    while (!tail.empty()) {
      const auto pos = tail.find(',');
      cfg.sweep_alphas.push_back(abv::parse_angle(tail.substr(0, pos)));
      tail = pos == std::string::npos ? std::string() : tail.substr(pos + 1);
    }
  }
}

// Echo the summary's check table so a terminal run is readable without
// opening the JSON.
void print_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  nlohmann::json j;
  in >> j;
  if (j.contains("points")) {
    for (const auto& p : j["points"]) {
      std::printf("  alpha = %-12g exit %d %s\n", p["alpha"].get<double>(),
                  p["exit_code"].get<int>(),
                  p.contains("error") ? p["error"].get<std::string>().c_str() : "");
    }
    return;
  }
  for (const auto& c : j["checks"]) {
    std::printf("  [%s] %-32s %s\n", c["passed"].get<bool>() ? "PASS" : "FAIL",
                c["name"].get<std::string>().c_str(), c["detail"].get<std::string>().c_str());
  }
  for (const auto& w : j["warnings"])
    std::printf("  [warn] %s\n", w.get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aharonov-Bohm velocity-shift simulator"};
  app.require_subcommand(0, 1);

  CliOverrides o;
  app.add_option("-c,--config", o.config_path, "Config file (sections + key = value)");
  app.add_option("-o,--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "Sampling seed");
  app.add_option("--format", o.format, "Output format: csv or json");
  app.add_flag("--print-config", o.print_config, "Echo the effective config and exit");

  const auto add_physics = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "Flux phase (e.g. pi/2, -3pi/4, 1.2)");
    sub->add_option("--L", o.L, "Branch separation");
    sub->add_option("--sigma", o.sigma, "Packet width");
  };
  const auto add_measurement = [&](CLI::App* sub) {
    sub->add_option("--G", o.G, "Total coupling impulse");
    sub->add_option("--T", o.T, "Drift time between kicks");
    sub->add_option("--T0", o.T0, "Gate duration (0 = impulsive)");
    sub->add_option("--a", o.a, "Compensation coefficient or 'auto'");
    sub->add_option("--sigma-q", o.sigma_q, "Pointer-coordinate width");
  };

  CLI::App* s_before = app.add_subcommand("before_after", "Free AB shift of P(v_y)");
  s_before->fallthrough();
  add_physics(s_before);
  CLI::App* s_meas = app.add_subcommand("measured_ab", "Velocity measurement on the AB state");
  s_meas->fallthrough();
  add_physics(s_meas);
  add_measurement(s_meas);
  s_meas->add_option("--samples", o.samples, "Pointer sample count (0 = analytic readout)");
  CLI::App* s_rel = app.add_subcommand("relative_velocity", "Converging branches, impulse view");
  s_rel->fallthrough();
  add_physics(s_rel);
  s_rel->add_option("--v0", o.v0, "Branch approach speed");
  CLI::App* s_flux = app.add_subcommand("flux_insert_remove", "Flux inserted mid-flight");
  s_flux->fallthrough();
  add_physics(s_flux);
  s_flux->add_option("--recombine-v", o.recombine_v, "Recombination impulse speed");
  s_flux->add_option("--t-overlap", o.t_overlap, "Drift after impulse (0 = auto)");
  s_flux->add_option("--phase-delay", o.phase_delay, "Time before the flux appears");
  s_flux->add_option("--impulse-time", o.impulse_time, "Time of the impulse (<0 = phase delay)");
  CLI::App* s_feas = app.add_subcommand("feasibility", "Laboratory-scale magnitude checks");
  s_feas->fallthrough();
  CLI::App* s_sweep = app.add_subcommand("sweep", "Run a scenario over a list of alphas");
  s_sweep->fallthrough();
  s_sweep->add_option("--scenario", o.sweep_target, "Scenario to sweep");
  s_sweep->add_option("--alphas", o.sweep_alphas, "Comma-separated alpha list");
  (void)s_feas;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? abv::exit_ok : abv::exit_config_error;
  }

  try {
    RunConfig cfg;
    if (!o.config_path.empty()) {
      cfg = abv::parse_config_file(o.config_path);
      if (app.get_subcommands().size() == 1)
        throw abv::config_error("give either --config or a scenario subcommand, not both");
    } else if (app.get_subcommands().size() == 1) {
      cfg.scenario = abv::scenario_from_string(app.get_subcommands()[0]->get_name());
      abv::apply_scenario_defaults(cfg);
    } else {
      std::cerr << app.help();
      return abv::exit_config_error;
    }
    apply_overrides(cfg, o);

    if (o.print_config) {
      std::cout << abv::render_config(cfg);
      return abv::exit_ok;
    }

    const abv::RunStatus st = abv::run(cfg);
    std::printf("%s -> %s%s\n", abv::to_string(cfg.scenario), st.summary_path.c_str(),
                st.partial ? " (partial)" : "");
    print_summary(st.summary_path);
    std::printf("exit %d\n", st.exit_code);
    return st.exit_code;
  } catch (const abv::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return abv::exit_config_error;
  } catch (const abv::guard_error& e) {
    std::cerr << "guard failure: " << e.what() << "\n";
    return abv::exit_guard_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
