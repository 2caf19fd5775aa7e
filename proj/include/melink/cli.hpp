#pragma once

// Command-line front end. Each subcommand loads the configuration (defaults,
// then --config file, then --set and dedicated flags), validates it before any
// simulation starts, and writes its output only once the run has succeeded.
//
// Exit codes: 0 success, 1 simulation or diagnostic failure, 2 usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "melink/config.hpp"
#include "melink/harness.hpp"
#include "melink/interconnect.hpp"
#include "melink/io.hpp"
#include "melink/link_sim.hpp"
#include "melink/magnetodynamics.hpp"

namespace melink {

namespace cli_detail {

inline constexpr std::uint64_t kTrajectoryStream = 0x5452414aULL;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  std::vector<std::string> overrides;
};

inline void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master random seed (sim.seed)");
  cmd->add_option("--out", c.out, "output path; '-' or omitted writes to stdout");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = auto (sim.threads)");
  cmd->add_option("--set", c.overrides, "override a configuration key, e.g. --set wire.length_mm=10");
}

inline RunConfig load(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) load_config_file(cfg, c.config);
  for (const auto& o : c.overrides) apply_override(cfg, o);
  if (c.seed) cfg.link.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

inline double mv(double v) { return v * 1e3; }
inline double ps(double t) { return t * 1e12; }

inline std::vector<int> parse_pattern(const std::string& text) {
  require(!text.empty(), "bit pattern must not be empty");
  std::vector<int> bits;
  for (char ch : text) {
    require(ch == '0' || ch == '1', "bit pattern may only contain 0 and 1");
    bits.push_back(ch - '0');
  }
  return bits;
}

// ---------------------------------------------------------------------------

struct TrajectoryArgs {
  double v_me = 0.2;
  double duration_ns = 1.0;
  std::optional<double> temperature;
  int start = -1;
  int stride = 1;
};

inline int cmd_trajectory(const Common& common, const TrajectoryArgs& a, std::ostream& log) {
  RunConfig cfg = load(common);
  if (a.temperature) set_config_value(cfg, "device.temperature_k", *a.temperature);
  require(a.duration_ns > 0 && std::isfinite(a.duration_ns), "--duration-ns must be positive");
  require(a.start == 1 || a.start == -1, "--start must be +1 or -1");
  require(a.stride >= 1, "--stride must be at least 1");
  require(std::isfinite(a.v_me), "--v-me must be finite");
  cfg.validate();
  const double duration = a.duration_ns * 1e-9;
  require(duration >= cfg.link.llg_dt, "--duration-ns must cover at least one time step");

  const MagnetModel model(cfg.link.magnet);
  RandomStream rng(cfg.link.seed, kTrajectoryStream);
  TrajectoryOptions topt;
  topt.target_direction = -a.start;
  const double v = a.v_me;
  const Trajectory tr = simulate_trajectory(initial_state(a.start, cfg.link.magnet.temperature), model,
                                            [v](double) { return v; }, duration, cfg.link.llg_dt, rng, topt);

  AtomicOutput out(common.out);
  CsvWriter csv(out.stream());
  csv.header({"time_ps", "mx", "my", "mz", "v_me_mv"});
  for (std::size_t k = 0; k < tr.samples.size(); k += static_cast<std::size_t>(a.stride)) {
    const auto& s = tr.samples[k];
    csv.row(ps(s.t), s.m.x, s.m.y, s.m.z, mv(s.v_me));
  }
  out.commit();
  if (tr.switching_time) {
    log << "switched at " << format_number(ps(*tr.switching_time)) << " ps\n";
  } else {
    log << "no switching within " << format_number(a.duration_ns) << " ns\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  double v_min = 0.05;
  double v_max = 0.25;
  double step = 0.025;
  long long trials = 1000;
};

inline int cmd_sweep(const Common& common, const SweepArgs& a, std::ostream& log) {
  const RunConfig cfg = load(common);
  require(a.trials >= 100, "--trials must be at least 100");
  cfg.validate();
  const auto grid = voltage_grid(a.v_min, a.v_max, a.step);
  SweepOptions opt;
  opt.n_trials = static_cast<std::size_t>(a.trials);
  opt.window = cfg.window;
  opt.dt = cfg.link.llg_dt;
  opt.seed = cfg.link.seed;
  opt.threads = cfg.threads;
  const SweepResult res = switching_probability_sweep(cfg.link.magnet, grid, opt);

  AtomicOutput out(common.out);
  CsvWriter csv(out.stream());
  csv.header({"v_me_mv", "n_trials", "n_switched", "probability", "ci_low", "ci_high"});
  for (const auto& p : res.points) csv.row(mv(p.v_me), p.n_trials, p.n_switched, p.probability, p.ci.low, p.ci.high);
  out.commit();
  log << "swept " << res.points.size() << " voltages x " << a.trials << " trials\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct LinkArgs {
  std::string pattern;
  std::optional<long long> cycles;
  std::optional<double> length_mm;
  std::string summary;
  int stride = 10;
  std::string waveform;
  bool nodes = false;
};

inline nlohmann::json link_summary(const LinkTrace& tr) {
  const EnergyBreakdown e = energy_per_bit(tr);
  nlohmann::json j;
  j["method"] = "capacitive_me";
  j["length_mm"] = tr.length_mm;
  j["energy_fj_per_bit_per_mm"] = e.total;
  j["energy_breakdown"] = {{"line", e.line}, {"read", e.read}, {"reset", e.reset}};
  try {
    const DelayBreakdown d = propagation_delay(tr);
    j["delay_ns"] = d.total * 1e9;
    j["delay_breakdown"] = {{"wire_ns", d.wire * 1e9}, {"switching_ns", d.switching * 1e9}, {"sense_ns", d.sense * 1e9}};
  } catch (const MeasurementError&) {
    j["delay_ns"] = nullptr;
  }
  j["cycles"] = tr.cycles.size();
  j["bit_errors"] = tr.bit_errors();
  j["input_bits"] = tr.input_bits();
  j["output_bits"] = tr.output_bits();
  return j;
}

inline int cmd_link(const Common& common, const LinkArgs& a, std::ostream& log) {
  RunConfig cfg = load(common);
  if (a.length_mm) set_config_value(cfg, "wire.length_mm", *a.length_mm);
  require(a.stride >= 1, "--stride must be at least 1");
  std::vector<int> bits;
  if (!a.pattern.empty()) {
    bits = parse_pattern(a.pattern);
    if (a.cycles) {
      require(*a.cycles >= 1, "--cycles must be positive");
      std::vector<int> rep;
      for (long long k = 0; k < *a.cycles; ++k) rep.push_back(bits[static_cast<std::size_t>(k) % bits.size()]);
      bits = rep;
    }
  } else {
    const long long n = a.cycles.value_or(16);
    require(n >= 2, "--cycles must be at least 2 for a random pattern");
    bits = random_pattern(static_cast<std::size_t>(n), cfg.link.seed);
  }
  validate_link_timing(cfg.link);

  const LinkTrace tr = simulate_link(cfg.link, bits, {a.stride, true});

  AtomicOutput out(common.out);
  CsvWriter csv(out.stream());
  csv.header({"time_ps", "v_in_mv", "v_me_mv", "mx", "v_node_m_mv", "v_out_bit"});
  for (const auto& s : tr.samples) csv.row(ps(s.t), mv(s.v_in), mv(s.v_me), s.m.x, mv(s.v_node_m), s.v_out_bit);

  std::optional<AtomicOutput> wave;
  if (!a.waveform.empty()) {
    wave.emplace(a.waveform);
    const LinkElectrical elec = cfg.link.electrical();
    const RcNetwork net = build_network(cfg.link.wire, elec);
    const double dt = cfg.link.circuit_dt;
    const InputWaveform input = ramp_step(0.0, elec.vdd, 2.0 * dt + 0.5 * cfg.link.rise_time, cfg.link.rise_time);
    TransientOptions topt;
    topt.store_nodes = a.nodes;
    const TransientResult w = transient_solve(net, input, dt, cfg.link.clock.write_time(), topt);
    auto& os = wave->stream();
    os << "time_ps,v_in_mv,v_me_mv";
    if (a.nodes)
      for (std::size_t i = 0; i < w.n_nodes; ++i) os << ",v_node" << i << "_mv";
    os << '\n';
    for (std::size_t k = 0; k < w.steps(); ++k) {
      os << format_number(ps(w.time[k])) << ',' << format_number(mv(w.v_source[k])) << ','
         << format_number(mv(w.v_receive[k]));
      if (a.nodes)
        for (std::size_t i = 0; i < w.n_nodes; ++i) os << ',' << format_number(mv(w.node(k, i)));
      os << '\n';
    }
  }

  const std::string summary = link_summary(tr).dump(2) + "\n";
  out.commit();
  if (wave) wave->commit();
  if (!a.summary.empty()) {
    AtomicOutput s(a.summary);
    s.stream() << summary;
    s.commit();
  } else {
    log << summary;
  }
  return tr.bit_errors() == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::vector<double> lengths{5.0, 10.0};
  std::string json;
};

inline int cmd_compare(const Common& common, const CompareArgs& a, std::ostream& log) {
  const RunConfig base = load(common);
  require(!a.lengths.empty(), "--lengths must list at least one length");
  std::vector<RunConfig> configs;
  for (double len : a.lengths) {
    RunConfig c = base;
    set_config_value(c, "wire.length_mm", len);
    c.validate();
    validate_link_timing(c.link);
    configs.push_back(c);
  }

  nlohmann::json report;
  report["rows"] = nlohmann::json::array();
  report["ratios"] = nlohmann::json::array();
  std::vector<std::vector<ComparisonRow>> tables;
  for (const auto& c : configs) tables.push_back(compare_methods(c.link, c.compare_options()));

  AtomicOutput out(common.out);
  CsvWriter csv(out.stream());
  csv.header({"method", "length_mm", "energy_fj_per_bit_per_mm", "delay_ns", "energy_ratio_to_me"});
  for (const auto& rows : tables) {
    const double me = rows.back().energy_fj_per_bit_per_mm;
    for (const auto& r : rows) {
      const double ratio = r.energy_fj_per_bit_per_mm / me;
      out.stream() << r.method << ',';
      csv.row(r.length_mm, r.energy_fj_per_bit_per_mm, r.delay_ns, ratio);
      nlohmann::json row = {{"method", r.method},
                            {"length_mm", r.length_mm},
                            {"energy_fj_per_bit_per_mm", r.energy_fj_per_bit_per_mm},
                            {"delay_ns", r.delay_ns}};
      row["breakdown"] = nlohmann::json::object();
      for (const auto& [k, v] : r.breakdown) row["breakdown"][k] = v;
      report["rows"].push_back(row);
    }
    report["ratios"].push_back({{"length_mm", rows.back().length_mm},
                                {"full_swing_over_me", rows[0].energy_fj_per_bit_per_mm / me},
                                {"low_swing_over_me", rows[1].energy_fj_per_bit_per_mm / me}});
  }
  out.commit();
  if (!a.json.empty()) {
    AtomicOutput j(a.json);
    j.stream() << report.dump(2) << '\n';
    j.commit();
  }
  for (const auto& r : report["ratios"]) {
    log << r["length_mm"].get<double>() << " mm: full-swing/ME = " << r["full_swing_over_me"].get<double>()
        << ", low-swing/ME = " << r["low_swing_over_me"].get<double>() << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct VariationArgs {
  double spread = 0.2;
  long long trials = 1000;
};

inline int cmd_variation(const Common& common, const VariationArgs& a, std::ostream& log) {
  const RunConfig cfg = load(common);
  require(a.spread >= 0.0 && a.spread <= 0.5, "--spread must lie in [0, 0.5]");
  require(a.trials >= 100, "--trials must be at least 100");
  cfg.validate();
  VariationOptions opt;
  opt.spread = a.spread;
  opt.n_trials = static_cast<std::size_t>(a.trials);
  opt.seed = cfg.link.seed;
  opt.threads = cfg.threads;
  const VariationReport rep = variation_analysis(cfg.link, opt);

  AtomicOutput out(common.out);
  CsvWriter csv(out.stream());
  csv.header({"trial", "peak_v_me_mv", "pass"});
  for (const auto& t : rep.trials) csv.row(t.trial, mv(t.peak_v_me), t.pass ? 1 : 0);
  out.commit();
  log << "min peak " << format_number(mv(rep.min_peak)) << " mV, pass rate " << format_number(rep.pass_rate) << '\n';
  return rep.pass_rate == 1.0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct ConvergenceArgs {
  std::vector<double> dt_ps{0.4, 0.2, 0.1};
  double v_me = 0.25;
  double duration_ns = 1.0;
};

inline int cmd_convergence(const Common& common, const ConvergenceArgs& a, std::ostream& log) {
  RunConfig cfg = load(common);
  // The study is deterministic by definition.
  set_config_value(cfg, "device.temperature_k", 0.0);
  require(a.duration_ns > 0, "--duration-ns must be positive");
  cfg.validate();
  std::vector<double> dts;
  for (double d : a.dt_ps) dts.push_back(d * 1e-12);
  ConvergenceOptions opt;
  opt.v_me = a.v_me;
  opt.duration = a.duration_ns * 1e-9;
  const ConvergenceReport rep = convergence_study(cfg.link.magnet, dts, opt);

  AtomicOutput out(common.out);
  CsvWriter csv(out.stream());
  csv.header({"dt_ps", "error_deg"});
  for (const auto& r : rep.rows) csv.row(ps(r.dt), r.error_deg);
  out.commit();
  log << "observed order " << format_number(rep.observed_order) << '\n';
  return 0;
}

}  // namespace cli_detail

/// Entry point shared by the executable and the tests. `log` receives
/// diagnostics and summaries; data goes to --out (or stdout).
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Capacitive magnetoelectric interconnect simulator"};
  app.require_subcommand(1);

  Common common;
  TrajectoryArgs ta;
  auto* traj = app.add_subcommand("trajectory", "single free-layer trajectory under a constant ME voltage");
  add_common(traj, common);
  traj->add_option("--v-me", ta.v_me, "ME voltage, V");
  traj->add_option("--duration-ns", ta.duration_ns, "simulated time, ns");
  traj->add_option("--temperature", ta.temperature, "temperature, K (device.temperature_k)");
  traj->add_option("--start", ta.start, "initial easy-axis direction, +1 or -1");
  traj->add_option("--stride", ta.stride, "write every Nth step");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo switching probability versus ME voltage");
  add_common(sweep, common);
  sweep->add_option("--v-min", sa.v_min, "first voltage, V");
  sweep->add_option("--v-max", sa.v_max, "last voltage, V");
  sweep->add_option("--step", sa.step, "voltage step, V");
  sweep->add_option("--trials", sa.trials, "trials per voltage (>= 100)");

  LinkArgs la;
  auto* link = app.add_subcommand("link", "end-to-end link co-simulation");
  add_common(link, common);
  link->add_option("--pattern", la.pattern, "input bits, e.g. 10110");
  link->add_option("--cycles", la.cycles, "number of cycles (repeats --pattern, or random bits)");
  link->add_option("--length-mm", la.length_mm, "wire length, mm (wire.length_mm)");
  link->add_option("--summary", la.summary, "summary JSON path (default: printed to stderr)");
  link->add_option("--stride", la.stride, "LLG steps per CSV row");
  link->add_option("--waveform", la.waveform, "also write a single-edge wire waveform CSV");
  link->add_flag("--nodes", la.nodes, "add every circuit node to the waveform CSV");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "energy and delay of full-swing, low-swing and ME links");
  add_common(cmp, common);
  cmp->add_option("--lengths", ca.lengths, "wire lengths, mm")->delimiter(',');
  cmp->add_option("--json", ca.json, "also write the report as JSON");

  VariationArgs va;
  auto* var = app.add_subcommand("variation", "peak V_ME under uniform parameter variation");
  add_common(var, common);
  var->add_option("--spread", va.spread, "relative spread, 0 to 0.5");
  var->add_option("--trials", va.trials, "number of trials (>= 100)");

  ConvergenceArgs cva;
  auto* conv = app.add_subcommand("convergence", "integrator error versus time step (T = 0)");
  add_common(conv, common);
  conv->add_option("--dt-ps", cva.dt_ps, "time steps, ps")->delimiter(',');
  conv->add_option("--v-me", cva.v_me, "ME voltage, V");
  conv->add_option("--duration-ns", cva.duration_ns, "simulated time, ns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, log, log);  // --help
    log << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*traj) return cmd_trajectory(common, ta, log);
    if (*sweep) return cmd_sweep(common, sa, log);
    if (*link) return cmd_link(common, la, log);
    if (*cmp) return cmd_compare(common, ca, log);
    if (*var) return cmd_variation(common, va, log);
    if (*conv) return cmd_convergence(common, cva, log);
  } catch (const ParameterError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const LinkFailure& e) {
    log << "link failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& log = std::cerr) {
  std::vector<const char*> argv{"melink"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), log);
}

}  // namespace melink
