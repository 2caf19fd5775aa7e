#pragma once

// Behavioral ME-MTJ receiver: capacitive write port, conductance-interpolated
// tunnel resistance, resistive-divider read against a reference MTJ.
//
// Divider orientation: reference MTJ between V_Read and node M, device
// between node M and ground. The clocked inverter after the comparator makes
// the output bit 1 for the parallel (low resistance, m_x = +1) state.

#include <cmath>
#include <optional>

#include "melink/core.hpp"
#include "melink/magnetodynamics.hpp"

namespace melink {

struct MtjParams {
  double r_p = 10e3;                 // ohm
  double tmr = 1.0;                  // R_AP = r_p * (1 + tmr)
  std::optional<double> r_ref;       // ohm; unset -> geometric mean of R_P and R_AP
  double v_read = 1.0;               // V
  double t_read = 1.25e-9;           // s

  double r_ap() const { return r_p * (1.0 + tmr); }
  double reference() const { return r_ref ? *r_ref : std::sqrt(r_p * r_ap()); }

  void validate() const {
    require(r_p > 0, "R_P must be positive");
    require(tmr > 0, "TMR must be positive");
    const double ref = reference();
    require(ref > r_p && ref < r_ap(), "reference resistance must lie strictly between R_P and R_AP");
    require(v_read >= 0, "read voltage must be non-negative");
    require(t_read >= 0, "read time must be non-negative");
  }
};

struct MeCapacitor {
  double area = 0.0;       // m^2
  double t_me = 0.0;       // m
  double eps_r = 0.0;
  double capacitance = 0.0;  // F
};

inline double me_capacitance(double area, double t_me, double eps_r) {
  require(area > 0 && t_me > 0 && eps_r > 0, "ME capacitor inputs must be positive");
  return constants::eps0 * eps_r * area / t_me;
}

inline MeCapacitor me_capacitor(const MagnetParams& p) {
  const double area = p.length * p.width;
  return {area, p.t_me, p.eps_r_me, me_capacitance(area, p.t_me, p.eps_r_me)};
}

inline double mtj_resistance(double m_x, const MtjParams& p) {
  if (!(std::abs(m_x) <= 1.0)) throw ParameterError("m_x must lie in [-1, 1]");
  const double g_p = 1.0 / p.r_p;
  const double g_ap = 1.0 / p.r_ap();
  return 1.0 / (g_p * 0.5 * (1.0 + m_x) + g_ap * 0.5 * (1.0 - m_x));
}

inline double read_voltage(double r_device, const MtjParams& p) {
  require(r_device > 0, "device resistance must be positive");
  return p.v_read * r_device / (r_device + p.reference());
}

/// Ideal clocked comparator at vdd/2 followed by the inverter. A tie resolves
/// to 0.
inline int sense(double v_node, double vdd) {
  require(vdd > 0, "supply must be positive");
  require(v_node >= 0 && v_node <= vdd, "node voltage must lie within the supply rails");
  return v_node < 0.5 * vdd ? 1 : 0;
}

inline double read_energy(double r_device, const MtjParams& p) {
  require(r_device > 0, "device resistance must be positive");
  return p.v_read * p.v_read / (r_device + p.reference()) * p.t_read;
}

inline double reset_energy(const MeCapacitor& cap, double vdd) {
  require(cap.capacitance > 0, "ME capacitance must be positive");
  return cap.capacitance * vdd * vdd;
}

}  // namespace melink
