#pragma once

// Monte Carlo and sweep engine. Every trial owns a random stream derived from
// (master seed, study, trial), so results do not depend on scheduling and a
// parallel run is bit-identical to a sequential one.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "melink/core.hpp"
#include "melink/interconnect.hpp"
#include "melink/link_sim.hpp"
#include "melink/magnetodynamics.hpp"
#include "melink/memtj.hpp"

namespace melink {

namespace stream_domain {
inline constexpr std::uint64_t sweep = 0x53574545ULL;
inline constexpr std::uint64_t variation = 0x56415249ULL;
}  // namespace stream_domain

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on a small pool. Work is claimed through an
/// atomic counter; the first exception thrown by any task is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for k successes in n trials (95% by default).
inline Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  require(n > 0, "interval needs at least one trial");
  require(k <= n, "successes cannot exceed trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // The bounds at k = 0 and k = n are exactly 0 and 1; rounding would leave ~1e-17.
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

// ---------------------------------------------------------------------------
// Switching probability
// ---------------------------------------------------------------------------

struct SweepPoint {
  double v_me = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_switched = 0;
  double probability = 0.0;
  Interval ci;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  std::size_t n_trials = 1000;
  double window = 2e-9;
  double dt = 1e-13;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Probability that a free layer starting at -x reaches m_x >= 0.9 within the
/// window under a constant ME voltage. Trial i draws the same noise at every
/// voltage (common random numbers).
inline SweepResult switching_probability_sweep(const MagnetParams& params, const std::vector<double>& v_values,
                                               const SweepOptions& opt = {}) {
  require(!v_values.empty(), "sweep needs at least one voltage");
  require(opt.n_trials >= 100, "sweep needs at least 100 trials per point");
  require(opt.window > 0 && opt.dt > 0 && opt.window >= opt.dt, "window and time step must be positive");
  for (double v : v_values) require(std::isfinite(v), "sweep voltages must be finite");
  const MagnetModel model(params);

  const std::size_t n = opt.n_trials;
  std::vector<unsigned char> switched(v_values.size() * n, 0);
  TrajectoryOptions topt;
  topt.record = false;
  topt.stop_at_switch = true;
  parallel_for(switched.size(), opt.threads, [&](std::size_t idx) {
    const std::size_t point = idx / n;
    const std::size_t trial = idx % n;
    RandomStream rng(opt.seed, stream_domain::sweep, trial);
    const double v = v_values[point];
    const Trajectory tr = simulate_trajectory(initial_state(-1, params.temperature), model,
                                              [v](double) { return v; }, opt.window, opt.dt, rng, topt);
    switched[idx] = tr.switching_time.has_value();
  });

  SweepResult out;
  for (std::size_t p = 0; p < v_values.size(); ++p) {
    SweepPoint pt;
    pt.v_me = v_values[p];
    pt.n_trials = n;
    for (std::size_t i = 0; i < n; ++i) pt.n_switched += switched[p * n + i];
    pt.probability = static_cast<double>(pt.n_switched) / static_cast<double>(n);
    pt.ci = wilson_interval(pt.n_switched, n);
    out.points.push_back(pt);
  }
  return out;
}

/// Inclusive voltage grid from v_min to v_max; the last point is snapped to
/// v_max when it falls within a millionth of a step.
inline std::vector<double> voltage_grid(double v_min, double v_max, double step) {
  require(step > 0 && std::isfinite(step), "voltage step must be positive");
  require(v_max >= v_min, "v_max must not be below v_min");
  const auto n = static_cast<std::size_t>(std::floor((v_max - v_min) / step + 1e-6)) + 1;
  require(n <= 100000, "voltage grid is too large");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v_min + static_cast<double>(i) * step;
  return out;
}

/// Mean time for a free layer at -x to reach m_x >= 0.9 under a constant ME
/// voltage, over trials that switched within the window.
struct SwitchingStatistics {
  std::size_t n_trials = 0;
  std::size_t n_switched = 0;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
};

inline SwitchingStatistics switching_time_statistics(const MagnetParams& params, double v_me, const SweepOptions& opt) {
  require(opt.n_trials >= 1 && opt.window > 0 && opt.dt > 0, "invalid switching-time study");
  const MagnetModel model(params);
  std::vector<double> times(opt.n_trials, -1.0);
  TrajectoryOptions topt;
  topt.record = false;
  topt.stop_at_switch = true;
  parallel_for(opt.n_trials, opt.threads, [&](std::size_t i) {
    RandomStream rng(opt.seed, stream_domain::sweep, i);
    const Trajectory tr = simulate_trajectory(initial_state(-1, params.temperature), model,
                                              [v_me](double) { return v_me; }, opt.window, opt.dt, rng, topt);
    if (tr.switching_time) times[i] = *tr.switching_time;
  });
  SwitchingStatistics st;
  st.n_trials = opt.n_trials;
  std::vector<double> ok;
  for (double t : times)
    if (t >= 0.0) ok.push_back(t);
  st.n_switched = ok.size();
  if (ok.empty()) return st;
  double sum = 0.0;
  for (double t : ok) sum += t;
  st.mean = sum / static_cast<double>(ok.size());
  std::sort(ok.begin(), ok.end());
  st.median = ok.size() % 2 ? ok[ok.size() / 2] : 0.5 * (ok[ok.size() / 2 - 1] + ok[ok.size() / 2]);
  st.max = ok.back();
  return st;
}

// ---------------------------------------------------------------------------
// Device variation
// ---------------------------------------------------------------------------

inline constexpr double kVariationThreshold = 0.2;  // V

struct VariationTrial {
  std::size_t trial = 0;
  double c_s = 0.0;        // F
  double r_per_mm = 0.0;   // ohm/mm
  double c_per_mm = 0.0;   // F/mm
  double me_length = 0.0;  // m
  double me_width = 0.0;   // m
  double t_me = 0.0;       // m
  double eps_r_me = 0.0;
  double c_l = 0.0;        // F
  double alpha_me = 0.0;   // s/m
  double peak_v_me = 0.0;  // V
  bool pass = false;
};

struct VariationReport {
  std::vector<VariationTrial> trials;
  double threshold = kVariationThreshold;
  double min_peak = 0.0;
  double pass_rate = 0.0;
};

struct VariationOptions {
  double spread = 0.2;
  std::size_t n_trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Peak receiving-end voltage for a 0 -> VDD input edge.
inline double peak_receive_voltage(const WireParams& wire, const LinkElectrical& elec, double rise_time, double dt,
                                   double window) {
  const RcNetwork net = build_network(wire, elec);
  const TransientResult tr = transient_solve(net, ramp_step(0.0, elec.vdd, 2.0 * dt + 0.5 * rise_time, rise_time), dt, window);
  return *std::max_element(tr.v_receive.begin(), tr.v_receive.end());
}

/// Draws every device and electrical parameter independently and uniformly
/// within +-spread of nominal and records the peak V_ME of a high input.
inline VariationReport variation_analysis(const LinkConfig& cfg, const VariationOptions& opt = {}) {
  require(opt.spread >= 0.0 && opt.spread <= 0.5, "spread must lie in [0, 0.5]");
  require(opt.n_trials >= 100, "variation analysis needs at least 100 trials");
  cfg.validate();
  const LinkElectrical nominal = cfg.electrical();

  VariationReport rep;
  rep.trials.resize(opt.n_trials);
  parallel_for(opt.n_trials, opt.threads, [&](std::size_t i) {
    RandomStream rng(opt.seed, stream_domain::variation, i);
    auto draw = [&](double x) { return x * rng.uniform(1.0 - opt.spread, 1.0 + opt.spread); };
    VariationTrial t;
    t.trial = i;
    t.c_s = draw(nominal.c_s);
    t.r_per_mm = draw(cfg.wire.r_per_mm);
    t.c_per_mm = draw(cfg.wire.c_per_mm);
    t.me_length = draw(cfg.magnet.length);
    t.me_width = draw(cfg.magnet.width);
    t.t_me = draw(cfg.magnet.t_me);
    t.eps_r_me = draw(cfg.magnet.eps_r_me);
    t.alpha_me = draw(cfg.magnet.alpha_me);
    t.c_l = me_capacitance(t.me_length * t.me_width, t.t_me, t.eps_r_me) + draw(cfg.c_l_extra);

    WireParams wire = cfg.wire;
    wire.r_per_mm = t.r_per_mm;
    wire.c_per_mm = t.c_per_mm;
    LinkElectrical elec = nominal;
    elec.c_s = t.c_s;
    elec.c_l = t.c_l;
    t.peak_v_me = peak_receive_voltage(wire, elec, cfg.rise_time, cfg.circuit_dt, cfg.clock.write_time());
    t.pass = t.peak_v_me > kVariationThreshold;
    rep.trials[i] = t;
  });

  std::size_t passed = 0;
  rep.min_peak = rep.trials.front().peak_v_me;
  for (const auto& t : rep.trials) {
    rep.min_peak = std::min(rep.min_peak, t.peak_v_me);
    passed += t.pass;
  }
  rep.pass_rate = static_cast<double>(passed) / static_cast<double>(rep.trials.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Integrator convergence
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  double dt = 0.0;
  double error_deg = 0.0;  // max angle to the reference trajectory
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // coarsest first
  double reference_dt = 0.0;
  double observed_order = 0.0;       // smallest order between neighbouring rows
};

struct ConvergenceOptions {
  double v_me = 0.25;
  double duration = 1e-9;
};

inline double angle_deg(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  return std::atan2(norm(cross(a, b)), dot(a, b)) * 180.0 / constants::pi;
}

/// Deterministic trajectories at each dt against a reference at 1/8 of the
/// finest step. All dt values must be integer multiples of the finest one.
inline ConvergenceReport convergence_study(const MagnetParams& params, std::vector<double> dt_values,
                                           const ConvergenceOptions& opt = {}) {
  require(params.temperature == 0.0, "convergence study requires T = 0");
  require(dt_values.size() >= 3, "convergence study needs at least three time steps");
  require(opt.duration > 0, "duration must be positive");
  std::sort(dt_values.begin(), dt_values.end(), std::greater<>());
  for (double dt : dt_values) require(dt > 0 && std::isfinite(dt), "time steps must be positive");
  for (std::size_t i = 1; i < dt_values.size(); ++i) require(dt_values[i] < dt_values[i - 1], "time steps must be distinct");
  const double coarse = dt_values.front();
  const double fine = dt_values.back();
  auto ratio = [](double a, double b) {
    const double r = a / b;
    require(std::abs(r - std::round(r)) < 1e-6, "time steps must be integer multiples of the finest step");
    return static_cast<std::size_t>(std::llround(r));
  };
  const auto checkpoints = static_cast<std::size_t>(std::floor(opt.duration / coarse + 1e-9));
  require(checkpoints >= 1, "duration must cover the coarsest step");

  const MagnetModel model(params);
  const SpinState start = initial_state(-1, 0.0);
  const double v = opt.v_me;
  auto run = [&](double dt) {
    RandomStream unused(0);
    return simulate_trajectory(start, model, [v](double) { return v; }, static_cast<double>(checkpoints) * coarse, dt,
                               unused);
  };

  ConvergenceReport rep;
  rep.reference_dt = fine / 8.0;
  const Trajectory ref = run(rep.reference_dt);
  const std::size_t ref_stride = ratio(coarse, rep.reference_dt);
  for (double dt : dt_values) {
    const Trajectory tr = run(dt);
    const std::size_t stride = ratio(coarse, dt);
    double err = 0.0;
    for (std::size_t c = 1; c <= checkpoints; ++c) {
      err = std::max(err, angle_deg(tr.samples[c * stride].m, ref.samples[c * ref_stride].m));
    }
    rep.rows.push_back({dt, err});
  }
  rep.observed_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i - 1];
    const auto& b = rep.rows[i];
    if (!(b.error_deg < a.error_deg)) {
      throw ValidationError("trajectory error does not decrease with the time step");
    }
    rep.observed_order = std::min(rep.observed_order, std::log(a.error_deg / b.error_deg) / std::log(a.dt / b.dt));
  }
  return rep;
}

/// Largest relative change of the magnetic energy density over `steps`
/// deterministic steps from `start`.
inline double energy_drift(const MagnetParams& params, const SpinState& start, double v_me, double dt, std::size_t steps) {
  require(params.temperature == 0.0, "energy drift requires T = 0");
  const MagnetModel model(params);
  const double e0 = model.energy_density(start.m, v_me);
  require(e0 != 0.0, "reference energy is zero");
  SpinState s = start;
  double drift = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    s = heun_step(s, model, v_me, v_me, dt, Vec3{});
    drift = std::max(drift, std::abs(model.energy_density(s.m, v_me) - e0) / std::abs(e0));
  }
  return drift;
}

// ---------------------------------------------------------------------------
// Link reliability
// ---------------------------------------------------------------------------

struct LinkSeedStudy {
  std::size_t runs = 0;
  std::size_t failed_runs = 0;  // link-failure diagnostics or bit errors
  std::size_t bit_errors = 0;
  std::size_t faults = 0;
};

/// Runs the link on an independent random pattern for each seed in
/// [first_seed, first_seed + n_seeds) and checks output = input delayed one cycle.
inline LinkSeedStudy link_seed_study(LinkConfig cfg, std::size_t n_seeds, std::size_t n_bits, std::uint64_t first_seed,
                                     unsigned threads = 0) {
  require(n_seeds >= 1 && n_bits >= 2, "seed study needs at least one seed and two bits");
  std::vector<LinkSeedStudy> per(n_seeds);
  parallel_for(n_seeds, threads, [&](std::size_t i) {
    LinkConfig c = cfg;
    c.seed = first_seed + i;
    const std::vector<int> bits = random_pattern(n_bits, c.seed);
    const LinkTrace tr = simulate_link(c, bits, {0, false});
    const std::size_t errors = tr.bit_errors();
    per[i] = {1, (errors > 0 || !tr.faults.empty()) ? 1u : 0u, errors, tr.faults.size()};
  });
  LinkSeedStudy total;
  for (const auto& p : per) {
    total.runs += p.runs;
    total.failed_runs += p.failed_runs;
    total.bit_errors += p.bit_errors;
    total.faults += p.faults;
  }
  return total;
}

}  // namespace melink
