#pragma once

// End-to-end co-simulation of the capacitive ME link.
//
// Each clock cycle has three phases. Write: the free-layer terminal is at 0,
// so the receiving-end wire voltage sits across the ME capacitor. Read: the
// divider node is sampled once at the end of the phase. Reset: the free-layer
// terminal is raised to VDD, which puts (V_wire - VDD) across the ME capacitor
// and returns the magnet to -x.
//
// The driver launches the next bit at the start of each reset phase (and in
// a preamble reset before the first cycle), so the wire settles while the
// free layer is held at VDD. Launching at the write edge instead leaves the
// previous bit's +V/3 on the wire after a 1 -> 0 transition long enough to
// switch the freshly reset magnet.
//
// The wire is solved on its own grid per cycle and its receiving-end voltage
// is linearly interpolated onto the LLG grid. Coupling is one way: the ME
// capacitor loads the wire only through its fixed capacitance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melink/baselines.hpp"
#include "melink/core.hpp"
#include "melink/interconnect.hpp"
#include "melink/magnetodynamics.hpp"
#include "melink/memtj.hpp"

namespace melink {

struct ClockParams {
  double period = 5e-9;
  double write_fraction = 0.5;
  double read_fraction = 0.25;
  double reset_fraction = 0.25;

  double write_time() const { return write_fraction * period; }
  double read_time() const { return read_fraction * period; }
  double reset_time() const { return reset_fraction * period; }
};

struct LinkConfig {
  MagnetParams magnet;
  MtjParams mtj;
  bool read_window_from_clock = true;  // t_read follows the read phase
  WireParams wire;
  double cs_ratio = 0.5;       // C_S / C_W
  double r_driver = 600.0;     // ohm
  double vdd = 1.0;            // V
  double rise_time = 20e-12;   // s, input edge
  double c_l_extra = 0.0;      // F, receiver load beyond the ME capacitor
  ClockParams clock;
  double llg_dt = 1e-13;       // s
  double circuit_dt = 1e-12;   // s
  double sense_latency = 20e-12;  // s, clocked inverter
  double activity = 0.5;       // transitions per bit used for table figures
  std::uint64_t seed = 1;

  LinkElectrical electrical() const {
    LinkElectrical e;
    e.c_s = cs_ratio * wire.total_c();
    e.c_l = me_capacitor(magnet).capacitance + c_l_extra;
    e.r_driver = r_driver;
    e.vdd = vdd;
    return e;
  }

  MtjParams effective_mtj() const {
    MtjParams m = mtj;
    if (read_window_from_clock) m.t_read = clock.read_time();
    return m;
  }

  void validate() const {
    magnet.validate();
    mtj.validate();
    wire.validate();
    require(cs_ratio > 0 && std::isfinite(cs_ratio), "series capacitance ratio must be positive");
    require(r_driver >= 0, "driver resistance must be non-negative");
    require(vdd > 0, "supply must be positive");
    require(rise_time >= 0 && c_l_extra >= 0, "edge and load parameters must be non-negative");
    require(clock.period > 0, "clock period must be positive");
    require(clock.write_fraction > 0 && clock.read_fraction > 0 && clock.reset_fraction > 0,
            "clock phase fractions must be positive");
    require(std::abs(clock.write_fraction + clock.read_fraction + clock.reset_fraction - 1.0) < 1e-9,
            "clock phase fractions must sum to 1");
    require(llg_dt > 0 && circuit_dt > 0, "time steps must be positive");
    require(circuit_dt >= llg_dt, "circuit step must not be finer than the LLG step");
    require(sense_latency >= 0, "sense latency must be non-negative");
    require(activity >= 0 && activity <= 1, "activity must lie in [0, 1]");
    electrical().validate();
  }
};

/// Wire-only 50% delay and transition energy of the configured link.
inline CapacitiveEdge link_edge(const LinkConfig& cfg) {
  return capacitive_edge(cfg.wire, cfg.electrical(), cfg.rise_time, cfg.circuit_dt, cfg.clock.write_time());
}

/// Checks that the write phase holds the wire delay plus the 500 ps the
/// magnet needs to reverse, and that the reset phase, during which the next
/// bit propagates, does as well. Requires one wire transient.
inline void validate_link_timing(const LinkConfig& cfg) {
  cfg.validate();
  double wire_delay = 0.0;
  try {
    wire_delay = link_edge(cfg).delay;
  } catch (const MeasurementError&) {
    throw ParameterError("write phase is too short for the wire to settle");
  }
  require(cfg.clock.write_time() >= wire_delay + 500e-12,
          "write phase must cover the wire delay plus 500 ps of switching");
  require(cfg.clock.reset_time() >= wire_delay + 500e-12,
          "reset phase must cover the wire delay plus 500 ps of reversal");
}

struct LinkSample {
  double t = 0.0;
  double v_in = 0.0;
  double v_me = 0.0;
  Vec3 m;
  double v_node_m = 0.0;
  int v_out_bit = 0;
};

struct CycleRecord {
  int bit_in = 0;
  int bit_sensed = 0;
  bool rising_edge = false;
  bool transition = false;
  double v_node_m = 0.0;
  double e_line = 0.0;    // J
  double e_read = 0.0;    // J
  double e_reset = 0.0;   // J
  std::optional<double> wire_delay;       // s, rising edges only
  std::optional<double> switching_time;   // s, from the start of the write phase to m_x >= 0.9
  std::optional<double> reset_time;       // s, from reset start to m_x <= -0.9
  double mx_end_of_reset = -1.0;
};

struct LinkTrace {
  double length_mm = 0.0;
  double period = 0.0;
  double sense_latency = 0.0;
  std::vector<LinkSample> samples;
  std::vector<CycleRecord> cycles;
  std::vector<std::string> faults;

  std::vector<int> input_bits() const {
    std::vector<int> out;
    for (const auto& c : cycles) out.push_back(c.bit_in);
    return out;
  }
  std::vector<int> sensed_bits() const {
    std::vector<int> out;
    for (const auto& c : cycles) out.push_back(c.bit_sensed);
    return out;
  }
  // Output register at each cycle boundary: the value sensed one cycle earlier.
  std::vector<int> output_bits() const {
    std::vector<int> out{0};
    for (std::size_t k = 0; k + 1 < cycles.size(); ++k) out.push_back(cycles[k].bit_sensed);
    return out;
  }
  std::size_t bit_errors() const {
    std::size_t e = 0;
    for (const auto& c : cycles) e += (c.bit_in != c.bit_sensed);
    return e;
  }
};

struct LinkOptions {
  int record_stride = 10;      // LLG steps per recorded sample; 0 disables recording
  bool throw_on_failure = true;
};

inline LinkTrace simulate_link(const LinkConfig& cfg, const std::vector<int>& bits, const LinkOptions& opt = {}) {
  require(!bits.empty(), "bit pattern must not be empty");
  for (int b : bits) require(b == 0 || b == 1, "bit pattern may only contain 0 and 1");
  cfg.validate();

  const MagnetModel magnet(cfg.magnet);
  const MtjParams mtj = cfg.effective_mtj();
  const LinkElectrical elec = cfg.electrical();
  const RcNetwork net = build_network(cfg.wire, elec);
  const MeCapacitor me_cap = me_capacitor(cfg.magnet);
  const double period = cfg.clock.period;
  const double dt = cfg.llg_dt;
  const auto steps = static_cast<std::size_t>(std::llround(period / dt));
  const auto write_end = static_cast<std::size_t>(std::llround(cfg.clock.write_time() / dt));
  const auto read_end = static_cast<std::size_t>(std::llround((cfg.clock.write_time() + cfg.clock.read_time()) / dt));
  require(write_end > 0 && read_end > write_end && steps > read_end, "clock phases are shorter than the LLG step");
  const double sigma = magnet.thermal_sigma(dt);

  RandomStream rng(cfg.seed, 0x4c494e4bULL);
  SpinState s = initial_state(-1, cfg.magnet.temperature);

  LinkTrace trace;
  trace.length_mm = cfg.wire.length_mm;
  trace.period = period;
  trace.sense_latency = cfg.sense_latency;
  trace.cycles.reserve(bits.size());
  if (opt.record_stride > 0) trace.samples.reserve(bits.size() * (steps / opt.record_stride + 1));

  const auto reset_steps = steps - read_end;
  const double t_reset = static_cast<double>(reset_steps) * dt;
  auto level_of = [&](std::size_t k) { return k < bits.size() && bits[k] ? cfg.vdd : 0.0; };

  // Wire windows: window k spans [kT, (k+1)T) and launches bit k at its start;
  // window n only holds the last level through the final reset.
  std::vector<TransientResult> windows(bits.size() + 1);
  std::vector<InputWaveform> inputs(bits.size() + 1);
  std::vector<double> wire_state(net.node_count(), 0.0);
  auto solve_window = [&](std::size_t k) {
    const double t0 = static_cast<double>(k) * period;
    const double from = k == 0 ? 0.0 : level_of(k - 1);
    const double to = k < bits.size() ? level_of(k) : from;
    inputs[k] = ramp_step(from, to, t0 + 0.5 * cfg.rise_time, cfg.rise_time);
    TransientOptions topt;
    topt.t0 = t0;
    topt.initial = wire_state;
    windows[k] = transient_solve(net, inputs[k], cfg.circuit_dt, period, topt);
    wire_state = windows[k].final_state;
    if (k >= 2) windows[k - 2] = {};
  };
  solve_window(0);
  solve_window(1);

  // Global step j covers [j dt, (j+1) dt). Step index -> wire window.
  auto window_of = [&](std::size_t j) { return std::min(j / steps, bits.size()); };
  int v_out = 0;
  auto record = [&](std::size_t j, double t, double v_me) {
    if (opt.record_stride <= 0 || j % static_cast<std::size_t>(opt.record_stride) != 0) return;
    const double r_dev = mtj_resistance(std::clamp(s.m.x, -1.0, 1.0), mtj);
    trace.samples.push_back({t, inputs[window_of(j)](t), v_me, s.m, read_voltage(r_dev, mtj), v_out});
  };
  auto step = [&](std::size_t j, double v_fl) {
    const double ta = static_cast<double>(j) * dt;
    const double tb = static_cast<double>(j + 1) * dt;
    const double va = windows[window_of(j)].receive_at(ta) - v_fl;
    const double vb = windows[window_of(j + 1)].receive_at(tb) - v_fl;
    record(j, ta, va);
    Vec3 thermal;
    if (sigma > 0.0) thermal = {sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
    s = heun_step(s, magnet, va, vb, dt, thermal);
    s.t = tb;
  };

  auto fail = [&](const std::string& what, std::size_t cycle) {
    if (opt.throw_on_failure) throw LinkFailure(what, cycle);
    trace.faults.push_back(what);
  };

  // Preamble: free layer held at VDD while bit 0 is launched.
  for (std::size_t j = 0; j < reset_steps; ++j) step(j, cfg.vdd);

  for (std::size_t k = 0; k < bits.size(); ++k) {
    const TransientResult& wire = windows[k];
    const double t_launch = static_cast<double>(k) * period;
    const double t_write = t_launch + t_reset;
    const double prev_level = k == 0 ? 0.0 : level_of(k - 1);

    CycleRecord rec;
    rec.bit_in = bits[k];
    rec.transition = level_of(k) != prev_level;
    rec.rising_edge = level_of(k) > prev_level;
    rec.e_line = source_energy(wire, prev_level);
    rec.e_reset = reset_energy(me_cap, cfg.vdd);
    if (rec.rising_edge) rec.wire_delay = delay_50pct(wire, t_launch + 0.5 * cfg.rise_time);

    const std::size_t base = reset_steps + k * steps;
    for (std::size_t i = 0; i < steps; ++i) {
      const std::size_t j = base + i;
      if (i + 1 == read_end && k >= 1) solve_window(k + 1);
      step(j, i >= read_end ? cfg.vdd : 0.0);
      const std::size_t done = i + 1;
      const double tb = static_cast<double>(j + 1) * dt;

      if (done <= write_end && rec.bit_in == 1 && !rec.switching_time && s.m.x >= kSwitchThreshold) {
        rec.switching_time = tb - t_write;
      }
      if (done == write_end && rec.bit_in == 1 && !rec.switching_time) {
        fail("cycle " + std::to_string(k) + ": magnet did not switch to +x within the write phase", k);
      }
      if (done == read_end) {
        const double r_dev = mtj_resistance(std::clamp(s.m.x, -1.0, 1.0), mtj);
        rec.v_node_m = read_voltage(r_dev, mtj);
        rec.bit_sensed = sense(rec.v_node_m, cfg.vdd);
        rec.e_read = read_energy(r_dev, mtj);
        v_out = rec.bit_sensed;
      }
      if (done > read_end && !rec.reset_time && s.m.x <= -kSwitchThreshold) {
        rec.reset_time = tb - (t_write + static_cast<double>(read_end) * dt);
      }
    }
    rec.mx_end_of_reset = s.m.x;
    if (s.m.x > -kSwitchThreshold) {
      fail("cycle " + std::to_string(k) + ": reset incomplete, m_x = " + std::to_string(s.m.x), k);
    }
    trace.cycles.push_back(rec);
  }
  return trace;
}

struct EnergyBreakdown {
  double line = 0.0;   // fJ/bit/mm
  double read = 0.0;
  double reset = 0.0;
  double total = 0.0;
};

inline EnergyBreakdown energy_per_bit(const LinkTrace& trace) {
  require(!trace.cycles.empty(), "trace has no complete cycle");
  double line = 0.0, read = 0.0, reset = 0.0;
  for (const auto& c : trace.cycles) {
    line += c.e_line;
    read += c.e_read;
    reset += c.e_reset;
  }
  const double scale = 1e15 / (static_cast<double>(trace.cycles.size()) * trace.length_mm);
  EnergyBreakdown e{line * scale, read * scale, reset * scale, 0.0};
  e.total = e.line + e.read + e.reset;
  return e;
}

struct DelayBreakdown {
  double wire = 0.0;       // s
  double switching = 0.0;  // s
  double sense = 0.0;      // s
  double total = 0.0;      // s
  std::size_t edges = 0;
};

/// Mean input-edge-to-valid-output delay over the rising edges of a trace:
/// wire 50% delay + magnet switching + sense latency.
inline DelayBreakdown propagation_delay(const LinkTrace& trace) {
  DelayBreakdown d;
  for (const auto& c : trace.cycles) {
    if (!c.rising_edge || !c.wire_delay || !c.switching_time) continue;
    d.wire += *c.wire_delay;
    d.switching += *c.switching_time;
    ++d.edges;
  }
  if (d.edges == 0) throw MeasurementError("trace contains no completed 0->1 transition");
  d.wire /= static_cast<double>(d.edges);
  d.switching /= static_cast<double>(d.edges);
  d.sense = trace.sense_latency;
  d.total = d.wire + d.switching + d.sense;
  return d;
}

// ---------------------------------------------------------------------------
// Method comparison
// ---------------------------------------------------------------------------

struct ComparisonRow {
  std::string method;
  double length_mm = 0.0;
  double energy_fj_per_bit_per_mm = 0.0;
  double delay_ns = 0.0;
  // Method-specific components, fJ/bit/mm or ns.
  std::vector<std::pair<std::string, double>> breakdown;
};

struct CompareOptions {
  RepeaterParams repeaters;
  LowSwingParams lowswing;
  std::size_t pattern_bits = 64;
};

/// Deterministic pseudo-random pattern that starts from 0 and contains at
/// least one rising edge.
inline std::vector<int> random_pattern(std::size_t n, std::uint64_t seed) {
  require(n >= 2, "pattern needs at least two bits");
  RandomStream rng(seed, 0x50415454ULL);
  std::vector<int> bits(n);
  for (auto& b : bits) b = static_cast<int>(rng.engine()() >> 63);
  bits[0] = 0;
  bits[1] = 1;
  return bits;
}

/// Table of energy and delay for the full-swing, low-swing capacitive and
/// capacitive ME links at the configured wire length.
///
/// All three methods book line energy as activity x (energy of one full
/// transition); the ME transition energy, switching time and read/reset
/// costs come from a link co-simulation on a pseudo-random pattern.
inline std::vector<ComparisonRow> compare_methods(const LinkConfig& cfg, CompareOptions opt = {}) {
  cfg.validate();
  opt.lowswing.cs_ratio = cfg.cs_ratio;
  opt.lowswing.r_driver = cfg.r_driver;
  opt.lowswing.rise_time = cfg.rise_time;
  opt.lowswing.vdd = cfg.vdd;
  opt.lowswing.circuit_dt = cfg.circuit_dt;
  opt.lowswing.window = cfg.clock.write_time();
  opt.lowswing.activity = cfg.activity;
  opt.repeaters.activity = cfg.activity;
  opt.repeaters.vdd = cfg.vdd;

  const double len = cfg.wire.length_mm;
  std::vector<ComparisonRow> rows;

  const RepeatedLine rep = repeated_line(cfg.wire, opt.repeaters);
  const MethodFigure fs = fullswing_baseline(cfg.wire, opt.repeaters);
  rows.push_back({"full_swing_cmos", len, fs.energy_fj_per_bit_per_mm, fs.delay_ns,
                  {{"stages", static_cast<double>(rep.stages)}, {"repeater_size", rep.size}}});

  const MethodFigure ls = lowswing_capacitive_baseline(cfg.wire, opt.lowswing);
  const double amp = opt.lowswing.i_bias * opt.lowswing.vdd * opt.lowswing.bit_period * 1e15 / len;
  rows.push_back({"low_swing_capacitive_cmos", len, ls.energy_fj_per_bit_per_mm, ls.delay_ns,
                  {{"line", ls.energy_fj_per_bit_per_mm - amp}, {"amplifier", amp}}});

  const LinkTrace trace = simulate_link(cfg, random_pattern(opt.pattern_bits, cfg.seed), {0, true});
  const EnergyBreakdown measured = energy_per_bit(trace);
  double e_transition = 0.0;
  std::size_t transitions = 0;
  for (const auto& c : trace.cycles) {
    if (!c.transition) continue;
    e_transition += c.e_line;
    ++transitions;
  }
  e_transition /= static_cast<double>(transitions);
  const double line = cfg.activity * e_transition * 1e15 / len;
  const DelayBreakdown d = propagation_delay(trace);
  ComparisonRow me{"capacitive_me", len, line + measured.read + measured.reset, d.total * 1e9, {}};
  me.breakdown = {{"line", line},
                  {"read", measured.read},
                  {"reset", measured.reset},
                  {"wire_delay_ns", d.wire * 1e9},
                  {"switching_ns", d.switching * 1e9},
                  {"sense_ns", d.sense * 1e9},
                  {"pattern_energy", measured.total}};
  rows.push_back(std::move(me));
  return rows;
}

}  // namespace melink
