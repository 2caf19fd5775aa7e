#pragma once

// Capacitively driven global wire: driver resistance, series coupling
// capacitor, distributed RC ladder and receiver load.
//
// Every element of the link connects two neighbouring nodes of a chain or one
// node to ground, so the nodal matrices are tridiagonal and each trapezoidal
// step costs O(nodes).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "melink/core.hpp"

namespace melink {

struct WireParams {
  double length_mm = 5.0;
  double r_per_mm = 50.0;        // ohm/mm
  double c_per_mm = 0.25e-12;    // F/mm (0.25 fF/um)
  int n_segments = 50;

  double total_r() const { return r_per_mm * length_mm; }
  double total_c() const { return c_per_mm * length_mm; }

  void validate() const {
    require(length_mm > 0 && std::isfinite(length_mm), "wire length must be positive");
    require(r_per_mm >= 0 && std::isfinite(r_per_mm), "wire resistance must be non-negative");
    require(c_per_mm > 0 && std::isfinite(c_per_mm), "wire capacitance must be positive");
    require(n_segments >= 10, "wire needs at least 10 segments");
  }
};

struct LinkElectrical {
  double c_s = 0.625e-12;     // F, series coupling capacitor
  double c_l = 0.0;           // F, receiver load
  double r_driver = 600.0;    // ohm
  double vdd = 1.0;           // V

  void validate() const {
    require(c_s > 0 && std::isfinite(c_s), "series capacitance must be positive");
    require(c_l >= 0 && std::isfinite(c_l), "load capacitance must be non-negative");
    require(r_driver >= 0 && std::isfinite(r_driver), "driver resistance must be non-negative");
    require(vdd > 0, "supply must be positive");
  }
};

/// Receiving-end voltage of the capacitive divider formed by the coupling
/// capacitor against the wire and load capacitance.
inline double divider_estimate(double c_s, double c_w, double c_l, double v_in) {
  require(c_s > 0, "series capacitance must be positive");
  require(c_w >= 0 && c_l >= 0, "capacitances must be non-negative");
  if (std::isinf(c_s)) return v_in;
  return v_in * c_s / (c_s + c_w + c_l);
}

// Chain network. Node 0 is the driver output; the source attaches to it
// through `source_conductance`, or drives it directly when the conductance
// is infinite. Link i joins node i and node i+1.
struct RcNetwork {
  double source_conductance = std::numeric_limits<double>::infinity();
  std::vector<double> series_g;   // per link, S
  std::vector<double> series_c;   // per link, F
  std::vector<double> shunt_c;    // per node, F

  std::size_t node_count() const { return shunt_c.size(); }
  std::size_t receiving_node() const { return shunt_c.size() - 1; }
  bool ideal_source() const { return std::isinf(source_conductance); }

  double total_shunt() const {
    double s = 0.0;
    for (double c : shunt_c) s += c;
    return s;
  }
};

/// Builds the link chain: source -- r_driver -- [0] --c_s-- [1] -- ladder --
/// [n+1], with the load on the last node. A pi-segment puts half its shunt
/// capacitance at each end. A resistanceless wire collapses to one node.
inline RcNetwork build_network(const WireParams& wire, const LinkElectrical& elec, int n_segments = -1) {
  elec.validate();
  const int n = n_segments > 0 ? n_segments : wire.n_segments;
  require(n >= 1, "wire needs at least one segment");
  require(wire.length_mm > 0 && wire.r_per_mm >= 0 && wire.c_per_mm > 0, "invalid wire parameters");

  RcNetwork net;
  net.source_conductance =
      elec.r_driver > 0 ? 1.0 / elec.r_driver : std::numeric_limits<double>::infinity();

  const double c_w = wire.total_c();
  const double r_w = wire.total_r();
  if (r_w == 0.0) {
    net.shunt_c = {0.0, c_w + elec.c_l};
    net.series_g = {0.0};
    net.series_c = {elec.c_s};
    return net;
  }

  const std::size_t nodes = static_cast<std::size_t>(n) + 2;
  net.shunt_c.assign(nodes, 0.0);
  net.series_g.assign(nodes - 1, 0.0);
  net.series_c.assign(nodes - 1, 0.0);
  net.series_c[0] = elec.c_s;
  const double c_seg = c_w / n;
  const double g_seg = n / r_w;
  for (int k = 0; k < n; ++k) {
    net.series_g[k + 1] = g_seg;
    net.shunt_c[k + 1] += 0.5 * c_seg;
    net.shunt_c[k + 2] += 0.5 * c_seg;
  }
  net.shunt_c.back() += elec.c_l;
  return net;
}

// ---------------------------------------------------------------------------
// Transient solve
// ---------------------------------------------------------------------------

struct TransientResult {
  double dt = 0.0;
  std::size_t n_nodes = 0;
  std::vector<double> time;       // s, uniform grid starting at t0
  std::vector<double> v_source;   // V
  std::vector<double> i_source;   // A, into the network
  std::vector<double> v_receive;  // V at the receiving node
  std::vector<double> nodes;      // steps x n_nodes, empty unless requested
  std::vector<double> final_state;

  std::size_t steps() const { return time.size(); }
  double node(std::size_t step, std::size_t i) const { return nodes.at(step * n_nodes + i); }

  // Linear interpolation of the receiving-node voltage.
  double receive_at(double t) const {
    if (t <= time.front()) return v_receive.front();
    if (t >= time.back()) return v_receive.back();
    const double u = (t - time.front()) / dt;
    const auto k = std::min(static_cast<std::size_t>(u), time.size() - 2);
    const double f = u - static_cast<double>(k);
    return v_receive[k] + f * (v_receive[k + 1] - v_receive[k]);
  }
};

struct TransientOptions {
  double t0 = 0.0;
  std::vector<double> initial;  // node voltages at t0; empty means all zero
  bool store_nodes = false;
};

using InputWaveform = std::function<double(double)>;

/// A 0/1 step through a linear ramp of `rise_time` centred on `edge_time`.
inline InputWaveform ramp_step(double from, double to, double edge_time, double rise_time) {
  return [=](double t) {
    if (rise_time <= 0.0) return t < edge_time ? from : to;
    const double start = edge_time - 0.5 * rise_time;
    if (t <= start) return from;
    if (t >= start + rise_time) return to;
    return from + (to - from) * (t - start) / rise_time;
  };
}

namespace detail {

// Factored tridiagonal system (Thomas algorithm without pivoting). The
// matrices here are symmetric positive definite, so no pivoting is needed.
class Tridiagonal {
 public:
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)), inv_pivot_(diag.size()),
        cprime_(diag.size(), 0.0) {
    const std::size_t n = diag.size();
    const double scale = *std::max_element(diag.begin(), diag.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (std::size_t i = 0; i < n; ++i) {
      double pivot = diag[i];
      if (i > 0) pivot -= lower_[i - 1] * cprime_[i - 1];
      if (!(std::abs(pivot) > 1e-14 * std::abs(scale)) || !std::isfinite(pivot)) {
        throw NumericalError("singular circuit matrix: node " + std::to_string(i) +
                             " has no capacitive or conductive path");
      }
      inv_pivot_[i] = 1.0 / pivot;
      if (i + 1 < n) cprime_[i] = upper_[i] * inv_pivot_[i];
    }
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i - 1] * rhs[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime_[i] * rhs[i + 1];
  }

 private:
  std::vector<double> lower_, upper_, inv_pivot_, cprime_;
};

}  // namespace detail

/// Trapezoidal (Crank-Nicolson) integration of C dv/dt + G v = s(t).
inline TransientResult transient_solve(const RcNetwork& net, const InputWaveform& input, double dt,
                                       double duration, const TransientOptions& opt = {}) {
  if (!(dt > 0.0)) throw ParameterError("circuit time step must be positive");
  if (!(duration >= dt)) throw ParameterError("duration must cover at least one step");
  const std::size_t n = net.node_count();
  require(n >= 2 && net.series_g.size() == n - 1 && net.series_c.size() == n - 1,
          "malformed network");
  const bool ideal = net.ideal_source();
  const double gs = ideal ? 0.0 : net.source_conductance;
  const double k = 2.0 / dt;

  // Nodal C and G as tridiagonal bands.
  std::vector<double> c_diag(n), c_off(n - 1), g_diag(n), g_off(n - 1);
  for (std::size_t i = 0; i < n; ++i) c_diag[i] = net.shunt_c[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c_diag[i] += net.series_c[i];
    c_diag[i + 1] += net.series_c[i];
    c_off[i] = -net.series_c[i];
    g_diag[i] += net.series_g[i];
    g_diag[i + 1] += net.series_g[i];
    g_off[i] = -net.series_g[i];
  }
  g_diag[0] += gs;

  // A = kC + G; B = kC - G. Row 0 becomes an identity row for an ideal source.
  std::vector<double> a_diag(n), a_lo(n - 1), a_up(n - 1), b_diag(n), b_off(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    a_diag[i] = k * c_diag[i] + g_diag[i];
    b_diag[i] = k * c_diag[i] - g_diag[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a_lo[i] = a_up[i] = k * c_off[i] + g_off[i];
    b_off[i] = k * c_off[i] - g_off[i];
  }
  if (ideal) {
    a_diag[0] = 1.0;
    a_up[0] = 0.0;
  }
  const detail::Tridiagonal solver(a_lo, a_diag, a_up);

  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  TransientResult r;
  r.dt = dt;
  r.n_nodes = n;
  r.time.reserve(steps + 1);
  r.v_source.reserve(steps + 1);
  r.i_source.reserve(steps + 1);
  r.v_receive.reserve(steps + 1);
  if (opt.store_nodes) r.nodes.reserve((steps + 1) * n);

  std::vector<double> v = opt.initial.empty() ? std::vector<double>(n, 0.0) : opt.initial;
  require(v.size() == n, "initial state size does not match the network");
  // The initial state is taken as given even when the input jumps at t0; an
  // ideal source then drags node 0 along during the first step.
  double vs = input(opt.t0);

  // Current through link 0 (ideal source case), tracked as a trapezoidal
  // companion of the series capacitor plus its resistive part.
  double i_cap0 = 0.0;
  auto source_current = [&](const std::vector<double>& x, double vsrc) {
    if (!ideal) return gs * (vsrc - x[0]);
    return i_cap0 + net.series_g[0] * (x[0] - x[1]);
  };

  auto record = [&](double t) {
    r.time.push_back(t);
    r.v_source.push_back(vs);
    r.i_source.push_back(source_current(v, vs));
    r.v_receive.push_back(v[n - 1]);
    if (opt.store_nodes) r.nodes.insert(r.nodes.end(), v.begin(), v.end());
  };
  record(opt.t0);

  std::vector<double> rhs(n);
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t1 = opt.t0 + static_cast<double>(step) * dt;
    const double vs1 = input(t1);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = b_diag[i] * v[i];
      if (i > 0) acc += b_off[i - 1] * v[i - 1];
      if (i + 1 < n) acc += b_off[i] * v[i + 1];
      rhs[i] = acc;
    }
    rhs[0] += gs * (vs + vs1);
    // Identity row; forward elimination carries the known voltage into row 1.
    if (ideal) rhs[0] = vs1;
    const double dv_prev = v[0] - v[1];
    solver.solve(rhs);
    v.swap(rhs);
    if (ideal) i_cap0 = k * net.series_c[0] * ((v[0] - v[1]) - dv_prev) - i_cap0;
    vs = vs1;
    record(t1);
    for (double x : v) {
      if (!std::isfinite(x)) throw NumericalError("transient diverged at t = " + std::to_string(t1));
    }
  }
  r.final_state = v;
  return r;
}

/// Time from `input_edge_time` until the receiving node first crosses 50% of
/// its settled swing. The record must start at rest, before the edge.
inline double delay_50pct(const TransientResult& r, double input_edge_time, double settle_tol = 0.01) {
  if (r.steps() < 3) throw MeasurementError("transient too short to measure a delay");
  if (input_edge_time < r.time.front()) throw MeasurementError("input edge precedes the transient record");
  const double v_before = r.v_receive.front();
  const double v_final = r.v_receive.back();
  const double swing = v_final - v_before;
  double vmax = 0.0;
  for (double x : r.v_receive) vmax = std::max(vmax, std::abs(x));
  if (!(std::abs(swing) > 1e-9 * std::max(vmax, 1e-30))) throw MeasurementError("receiving node shows no swing");

  // Settled: the last 5% of the record stays within settle_tol of the final value.
  const std::size_t tail = std::max<std::size_t>(2, r.steps() / 20);
  for (std::size_t k = r.steps() - tail; k < r.steps(); ++k) {
    if (std::abs(r.v_receive[k] - v_final) > settle_tol * std::abs(swing)) {
      throw MeasurementError("receiving node has not settled within the simulated window");
    }
  }
  const double target = v_before + 0.5 * swing;
  const double sgn = swing > 0 ? 1.0 : -1.0;
  for (std::size_t k = 1; k < r.steps(); ++k) {
    if (r.time[k] < input_edge_time) continue;
    if (sgn * (r.v_receive[k] - target) >= 0.0) {
      const double ta = std::max(r.time[k - 1], input_edge_time);
      const double va = r.time[k - 1] < input_edge_time ? v_before : r.v_receive[k - 1];
      const double vb = r.v_receive[k];
      const double f = (vb == va) ? 1.0 : (target - va) / (vb - va);
      return ta + f * (r.time[k] - ta) - input_edge_time;
    }
  }
  throw MeasurementError("receiving node never crossed 50% of its swing");
}

/// Energy delivered by the source, integral of (v_src - v_ref) * i_src dt by
/// trapezoidal quadrature. With v_ref = 0 this is the plain source energy;
/// with v_ref equal to the pre-edge level it is the energy moved by that
/// transition, which is the same for rising and falling edges.
inline double source_energy(const TransientResult& r, double v_ref = 0.0) {
  double e = 0.0;
  for (std::size_t k = 1; k < r.steps(); ++k) {
    const double p0 = (r.v_source[k - 1] - v_ref) * r.i_source[k - 1];
    const double p1 = (r.v_source[k] - v_ref) * r.i_source[k];
    e += 0.5 * (p0 + p1) * (r.time[k] - r.time[k - 1]);
  }
  return e;
}

/// Series combination seen by a step source: c_s in series with all the
/// capacitance to ground.
inline double effective_switched_capacitance(const WireParams& wire, const LinkElectrical& elec) {
  const double c_gnd = wire.total_c() + elec.c_l;
  return elec.c_s * c_gnd / (elec.c_s + c_gnd);
}

}  // namespace melink
