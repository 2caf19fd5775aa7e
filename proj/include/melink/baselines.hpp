#pragma once

// Behavioral CMOS reference links for the energy/delay comparison: a
// repeated full-swing line and a differential capacitively driven low-swing
// line with a biased amplifier receiver.
//
// Device constants below are stand-ins for a 45 nm library. They were fixed
// once so that the 5 mm row lands on the published CMOS figures; every
// other length is a prediction.

#include <algorithm>
#include <cmath>

#include "melink/core.hpp"
#include "melink/interconnect.hpp"

namespace melink {

struct MethodFigure {
  double energy_fj_per_bit_per_mm = 0.0;
  double delay_ns = 0.0;
};

struct RepeaterParams {
  double r0 = 30e3;            // ohm, minimum inverter output resistance
  double c0 = 0.2e-15;         // F, minimum inverter input capacitance
  double cp = 0.4e-15;         // F, minimum inverter output parasitic
  double spacing_factor = 0.8; // segment length relative to delay-optimal
  double size_factor = 0.16;   // repeater size relative to delay-optimal
  double activity = 0.5;       // transitions per bit
  double vdd = 1.0;

  void validate() const {
    require(r0 > 0 && c0 > 0 && cp >= 0, "repeater device constants must be positive");
    require(spacing_factor > 0 && size_factor > 0, "repeater scaling factors must be positive");
    require(activity >= 0 && activity <= 1, "activity must lie in [0, 1]");
    require(vdd > 0, "supply must be positive");
  }
};

struct RepeatedLine {
  int stages = 1;          // driver plus repeaters
  double size = 1.0;       // multiple of minimum inverter
  double segment_m = 0.0;
  double stage_delay = 0.0;
  double delay = 0.0;      // s
  double energy = 0.0;     // J per bit
};

/// Bakoglu stage delay of a size-h inverter driving a distributed segment of
/// length l into the next size-h stage.
inline double repeater_stage_delay(const RepeaterParams& p, double h, double r_seg, double c_seg) {
  return 0.69 * (p.r0 / h) * (h * (p.c0 + p.cp) + c_seg) + r_seg * (0.38 * c_seg + 0.69 * h * p.c0);
}

inline RepeatedLine repeated_line(const WireParams& wire, const RepeaterParams& p) {
  wire.validate();
  p.validate();
  const double length = wire.length_mm * 1e-3;
  const double r = wire.r_per_mm * 1e3;  // ohm/m
  const double c = wire.c_per_mm * 1e3;  // F/m
  require(r > 0, "repeated line needs a resistive wire");

  const double h_opt = std::sqrt(p.r0 * c / (r * p.c0));
  const double l_opt = std::sqrt(2.0 * p.r0 * (p.c0 + p.cp) / (r * c));

  RepeatedLine out;
  out.size = std::max(1.0, p.size_factor * h_opt);
  out.stages = std::max(1, static_cast<int>(std::lround(length / (p.spacing_factor * l_opt))));
  out.segment_m = length / out.stages;
  out.stage_delay = repeater_stage_delay(p, out.size, r * out.segment_m, c * out.segment_m);
  out.delay = out.stages * out.stage_delay;
  out.energy = p.activity * (c * length + out.stages * out.size * (p.c0 + p.cp)) * p.vdd * p.vdd;
  return out;
}

inline MethodFigure fullswing_baseline(const WireParams& wire, const RepeaterParams& p) {
  const RepeatedLine line = repeated_line(wire, p);
  return {line.energy * 1e15 / wire.length_mm, line.delay * 1e9};
}

struct LowSwingParams {
  double i_bias = 44e-6;        // A, differential amplifier bias
  double bit_period = 1e-9;     // s, converts static amplifier power to energy/bit
  double amp_input_c = 1e-15;   // F per wire
  double amp_latency = 20e-12;  // s
  double cs_ratio = 0.5;        // C_S / C_W
  double r_driver = 600.0;      // ohm
  double rise_time = 20e-12;    // s
  double activity = 0.5;
  double vdd = 1.0;
  double circuit_dt = 1e-12;    // s
  double window = 4e-9;         // s, transient length for the delay measurement

  void validate() const {
    require(i_bias >= 0, "bias current must be non-negative");
    require(bit_period > 0, "bit period must be positive");
    require(amp_input_c >= 0 && amp_latency >= 0, "amplifier parameters must be non-negative");
    require(cs_ratio > 0 && r_driver >= 0 && rise_time >= 0, "driver parameters out of range");
    require(activity >= 0 && activity <= 1, "activity must lie in [0, 1]");
    require(vdd > 0 && circuit_dt > 0 && window > circuit_dt, "timing parameters out of range");
  }
};

struct CapacitiveEdge {
  double delay = 0.0;        // s, 50% at the receiving node
  double edge_energy = 0.0;  // J delivered by one full transition
  double settled = 0.0;      // V
};

/// One 0 -> vdd transition on a capacitively driven wire, solved as a
/// transient.
inline CapacitiveEdge capacitive_edge(const WireParams& wire, const LinkElectrical& elec, double rise_time,
                                      double dt, double window) {
  const RcNetwork net = build_network(wire, elec);
  const double edge = 2.0 * dt + 0.5 * rise_time;
  const TransientResult tr = transient_solve(net, ramp_step(0.0, elec.vdd, edge, rise_time), dt, window);
  return {delay_50pct(tr, edge), source_energy(tr), tr.v_receive.back()};
}

inline MethodFigure lowswing_capacitive_baseline(const WireParams& wire, const LowSwingParams& p) {
  wire.validate();
  p.validate();
  LinkElectrical elec;
  elec.c_s = p.cs_ratio * wire.total_c();
  elec.c_l = p.amp_input_c;
  elec.r_driver = p.r_driver;
  elec.vdd = p.vdd;
  const CapacitiveEdge e = capacitive_edge(wire, elec, p.rise_time, p.circuit_dt, p.window);
  const double line = 2.0 * p.activity * e.edge_energy;
  const double amplifier = p.i_bias * p.vdd * p.bit_period;
  return {(line + amplifier) * 1e15 / wire.length_mm, (e.delay + p.amp_latency) * 1e9};
}

}  // namespace melink
