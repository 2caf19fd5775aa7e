// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "melink/harness.hpp"
#include "melink/link_sim.hpp"
#include "oracles.hpp"

using namespace melink;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. Threshold behaviour of the switching probability.
Outcome threshold() {
  SweepOptions opt;
  opt.n_trials = 1000;
  opt.window = 2e-9;
  opt.seed = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult r = switching_probability_sweep(MagnetParams{}, {0.05, 0.25}, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double lo = r.points[0].probability, hi = r.points[1].probability;
  return {hi >= 0.99 && lo <= 0.05 && secs < 60.0, fmt("P(0.05 V) = %.3f, P(0.25 V) = %.3f, %.1f s", lo, hi, secs)};
}

// 2. Deterministic write at 0.2 V and reset at -1 V, each within 500 ps.
Outcome speed() {
  MagnetParams p;
  p.temperature = 0.0;
  const MagnetModel model(p);
  RandomStream rng(1);
  TrajectoryOptions opt;
  opt.record = false;
  opt.stop_at_switch = true;
  opt.target_direction = +1;
  const Trajectory w = simulate_trajectory(initial_state(-1, 0.0), model, [](double) { return 0.2; }, 5e-9, 1e-13,
                                           rng, opt);
  opt.target_direction = -1;
  const Trajectory r = simulate_trajectory(initial_state(+1, 0.0), model, [](double) { return -1.0; }, 5e-9, 1e-13,
                                           rng, opt);
  const double tw = w.switching_time.value_or(INFINITY), tr = r.switching_time.value_or(INFINITY);
  return {tw <= 500e-12 && tr <= 500e-12, fmt("write at 0.2 V: %.1f ps, reset at -1 V: %.1f ps", tw * 1e12, tr * 1e12)};
}

// 3. Settled divider voltage.
Outcome divider() {
  LinkConfig cfg;
  LinkElectrical e = cfg.electrical();
  e.c_l = 0.0;
  const CapacitiveEdge edge = capacitive_edge(cfg.wire, e, cfg.rise_time, cfg.circuit_dt, 4e-9);
  return {rel(edge.settled, 0.333) <= 0.01, fmt("settled V_ME = %.5f V", edge.settled)};
}

// 4. Link function over 100 seeds.
Outcome link_function() {
  const LinkSeedStudy st = link_seed_study(LinkConfig{}, 100, 32, 1);
  return {st.failed_runs == 0 && st.bit_errors == 0,
          fmt("%zu runs, %zu failed, %zu bit errors, %zu faults", st.runs, st.failed_runs, st.bit_errors, st.faults)};
}

// 5/6 share the comparison tables.
struct Tables {
  std::vector<ComparisonRow> at5, at10;
};

const Tables& tables() {
  static const Tables t = [] {
    Tables out;
    LinkConfig cfg;
    out.at5 = compare_methods(cfg);
    cfg.wire.length_mm = 10.0;
    out.at10 = compare_methods(cfg);
    return out;
  }();
  return t;
}

double settled_v_me(const LinkConfig& cfg) { return link_edge(cfg).settled; }

Outcome delay_decomposition() {
  bool ok = true;
  std::string detail;
  for (double len : {5.0, 10.0}) {
    const auto& rows = len == 5.0 ? tables().at5 : tables().at10;
    const double gap = rows[2].delay_ns - rows[1].delay_ns;
    LinkConfig cfg;
    cfg.wire.length_mm = len;
    SweepOptions opt;
    opt.n_trials = 200;
    opt.window = 2e-9;
    opt.seed = 1;
    const SwitchingStatistics st = switching_time_statistics(cfg.magnet, settled_v_me(cfg), opt);
    const double t_sw = st.mean * 1e9;
    const double err = rel(gap, t_sw);
    ok = ok && st.n_switched == st.n_trials && err <= 0.15;
    detail += fmt("%g mm: ME - low-swing = %.4f ns, switching = %.4f ns (%.1f%%); ", len, gap, t_sw, 100 * err);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome energy_ratios() {
  const auto& r = tables().at10;
  const double full = r[0].energy_fj_per_bit_per_mm, low = r[1].energy_fj_per_bit_per_mm,
               me = r[2].energy_fj_per_bit_per_mm;
  const double rf = full / me, rl = low / me;
  const auto& r5 = tables().at5;
  const bool order5 = r5[2].energy_fj_per_bit_per_mm < r5[1].energy_fj_per_bit_per_mm &&
                      r5[1].energy_fj_per_bit_per_mm < r5[0].energy_fj_per_bit_per_mm;
  return {order5 && me < low && low < full && rf >= 2.3 && rf <= 4.2 && rl >= 1.4 && rl <= 2.6,
          fmt("10 mm: full %.2f, low %.2f, ME %.2f fJ/bit/mm; full/ME = %.2f, low/ME = %.2f", full, low, me, rf, rl)};
}

// 7. Variation robustness.
Outcome variation() {
  VariationOptions opt;
  opt.spread = 0.2;
  opt.n_trials = 1000;
  const VariationReport rep = variation_analysis(LinkConfig{}, opt);
  return {rep.min_peak > 0.2, fmt("min peak V_ME = %.4f V, pass rate %.3f", rep.min_peak, rep.pass_rate)};
}

// 8. Property suites.
Outcome properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };

  MagnetParams p;
  const MagnetModel model(p);
  {
    RandomStream rng(3);
    SpinState s = initial_state(-1, p.temperature);
    double worst = 0.0;
    for (int k = 0; k < 20000; ++k) {
      s = heun_step(s, model, 0.2, 1e-13, rng);
      worst = std::max(worst, std::abs(norm(s.m) - 1.0));
    }
    check(worst < 1e-9, "norm preservation");
  }
  {
    const DemagFactors d = demag_factors(p.length, p.width, p.thickness);
    const DemagFactors cube = demag_factors(1e-9, 1e-9, 1e-9);
    const auto q = oracle::demag(p.length, p.width, p.thickness);
    check(std::abs(d.nxx + d.nyy + d.nzz - 1.0) < 1e-9 && std::abs(cube.nxx - 1.0 / 3) < 1e-12 &&
              std::abs(cube.nzz - 1.0 / 3) < 1e-12 && rel(d.nxx, q.nxx) < 1e-9 && rel(d.nzz, q.nzz) < 1e-9,
          "demag closure");
  }
  {
    RandomStream rng(5);
    double worst_orth = 0.0, worst_res = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto a = rng.normal3();
      const auto b = rng.normal3();
      const Vec3 m = normalized(Vec3{a[0], a[1], a[2]});
      const Vec3 h{1e5 * b[0], 1e5 * b[1], 1e5 * b[2]};
      const Vec3 dm = llg_rhs(m, h, p.alpha, p.gamma);
      worst_orth = std::max(worst_orth, std::abs(dot(dm, m)) / norm(dm));
      const double g = p.gamma * constants::mu0;
      const Vec3 res = dm + g * cross(m, h) - p.alpha * cross(m, dm);
      worst_res = std::max(worst_res, norm(res) / (g * norm(h)));
    }
    check(worst_orth < 1e-12 && worst_res < 1e-12, "llg_rhs orthogonality and residual");
  }
  {
    RandomStream rng(7);
    const double dt = 1e-13;
    const double sigma = thermal_sigma(p, dt);
    double ss = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Vec3 h = thermal_field_sample(p, dt, rng.normal3());
      ss += dot(h, h);
    }
    check(rel(ss / (3.0 * n), sigma * sigma) < 0.05, "thermal variance");
  }
  {
    MagnetParams cold = p;
    cold.temperature = 0.0;
    check(convergence_study(cold, {0.4e-12, 0.2e-12, 0.1e-12}).observed_order >= 1.8, "Heun order");
  }
  {
    const WireParams w;
    LinkElectrical e;
    e.c_s = 0.5 * w.total_c();
    e.c_l = 0.45e-15;
    const RcNetwork net = build_network(w, e);
    TransientOptions topt;
    topt.store_nodes = true;
    const TransientResult r = transient_solve(net, ramp_step(0.0, 1.0, 12e-12, 20e-12), 1e-12, 4e-9, topt);
    double diss = 0.0;
    auto power = [&](std::size_t s) {
      double acc = std::pow(r.v_source[s] - r.node(s, 0), 2) * net.source_conductance;
      for (std::size_t i = 1; i + 1 < r.n_nodes; ++i) acc += std::pow(r.node(s, i) - r.node(s, i + 1), 2) * net.series_g[i];
      return acc;
    };
    for (std::size_t k = 1; k < r.steps(); ++k) diss += 0.5 * (power(k) + power(k - 1)) * r.dt;
    const std::size_t last = r.steps() - 1;
    double stored = 0.5 * e.c_s * std::pow(r.node(last, 0) - r.node(last, 1), 2);
    for (std::size_t i = 0; i < r.n_nodes; ++i) stored += 0.5 * net.shunt_c[i] * std::pow(r.node(last, i), 2);
    check(rel(source_energy(r), stored + diss) < 0.01, "circuit energy balance");

    const TransientResult base = transient_solve(net, ramp_step(0.0, 1.0, 12e-12, 20e-12), 1e-12, 4e-9);
    const TransientResult grid =
        transient_solve(build_network(w, e, 100), ramp_step(0.0, 1.0, 12e-12, 20e-12), 1e-12, 4e-9);
    const TransientResult fine = transient_solve(net, ramp_step(0.0, 1.0, 11e-12, 20e-12), 0.5e-12, 4e-9);
    const double d0 = delay_50pct(base, 12e-12);
    check(rel(delay_50pct(grid, 12e-12), d0) < 0.02 && rel(delay_50pct(fine, 11e-12), d0) < 0.01,
          "grid and step convergence");
  }
  {
    SweepOptions opt;
    opt.n_trials = 200;
    opt.window = 1e-9;
    opt.threads = 1;
    const SweepResult seq = switching_probability_sweep(p, {0.175, 0.2}, opt);
    opt.threads = 4;
    const SweepResult par = switching_probability_sweep(p, {0.175, 0.2}, opt);
    bool same = true;
    for (std::size_t i = 0; i < seq.points.size(); ++i) same = same && seq.points[i].n_switched == par.points[i].n_switched;
    check(same, "parallel determinism");
  }

  std::string detail = "8 property groups";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f + ";";
  }
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 switching threshold", threshold},
      {"2 switching speed", speed},
      {"3 capacitive divider", divider},
      {"4 link function", link_function},
      {"5 delay decomposition", delay_decomposition},
      {"6 energy ordering and ratios", energy_ratios},
      {"7 variation robustness", variation},
      {"8 property suites", properties},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
