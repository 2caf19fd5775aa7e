#pragma once

// Mono-domain stochastic LLG solver for the ME-switched free layer.
//
// Fields are carried in A/m throughout. The precession constant is
// gamma * mu0 (m/(A*s)); the thermal field and the ME field are scaled so
// that every term of the effective field shares that unit.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "melink/core.hpp"

namespace melink {

struct MagnetParams {
  double length = 112.5e-9;         // m, easy axis (x)
  double width = 45e-9;             // m (y)
  double thickness = 2.5e-9;        // m, free-layer thickness t_FL (z)
  double ms = 1.257e6;              // A/m
  double alpha = 0.03;              // Gilbert damping
  double gamma = constants::gamma_electron;  // rad/(s*T)
  double ki = 1.0e-3;               // J/m^2, interfacial anisotropy
  double t_me = 5e-9;               // m, ME oxide thickness
  double alpha_me = 0.5 / 3.0e8;    // s/m, ME coefficient
  double eps_r_me = 50.0;           // ME oxide relative permittivity
  double temperature = 300.0;       // K

  double volume() const { return length * width * thickness; }

  void validate() const {
    require(length > 0 && width > 0 && thickness > 0, "magnet dimensions must be positive");
    require(t_me > 0, "ME oxide thickness must be positive");
    require(ms > 0, "saturation magnetization must be positive");
    require(alpha >= 0 && alpha < 1, "Gilbert damping must lie in [0, 1)");
    require(gamma > 0, "gyromagnetic ratio must be positive");
    require(eps_r_me > 0, "ME oxide permittivity must be positive");
    require(temperature >= 0, "temperature must be non-negative");
    require(std::isfinite(ki) && std::isfinite(alpha_me), "anisotropy and ME coefficient must be finite");
  }
};

struct SpinState {
  Vec3 m{-1.0, 0.0, 0.0};
  double t = 0.0;  // s
};

struct DemagFactors {
  double nxx = 1.0 / 3.0;
  double nyy = 1.0 / 3.0;
  double nzz = 1.0 / 3.0;

  double sum() const { return nxx + nyy + nzz; }
};

struct FieldSample {
  Vec3 h_demag;
  Vec3 h_interface;
  Vec3 h_thermal;
  Vec3 h_me;

  Vec3 total() const { return h_demag + h_interface + h_thermal + h_me; }
};

namespace detail {

// Aharoni's closed form for the factor along the c half-edge of a prism with
// half-edges (a, b, c). Evaluated in long double: the polynomial terms cancel
// heavily for thin films.
inline long double aharoni_axis(long double a, long double b, long double c) {
  using std::atan;
  using std::log;
  using std::sqrt;
  const long double a2 = a * a, b2 = b * b, c2 = c * c;
  const long double abc = a * b * c;
  const long double r = sqrt(a2 + b2 + c2);
  const long double rab = sqrt(a2 + b2);
  const long double rbc = sqrt(b2 + c2);
  const long double rac = sqrt(a2 + c2);

  long double s = 0.0L;
  s += (b2 - c2) / (2.0L * b * c) * log((r - a) / (r + a));
  s += (a2 - c2) / (2.0L * a * c) * log((r - b) / (r + b));
  s += b / (2.0L * c) * log((rab + a) / (rab - a));
  s += a / (2.0L * c) * log((rab + b) / (rab - b));
  s += c / (2.0L * a) * log((rbc - b) / (rbc + b));
  s += c / (2.0L * b) * log((rac - a) / (rac + a));
  s += 2.0L * atan(a * b / (c * r));
  s += (a2 * a + b2 * b - 2.0L * c2 * c) / (3.0L * abc);
  s += (a2 + b2 - 2.0L * c2) / (3.0L * abc) * r;
  s += c / (a * b) * (rac + rbc);
  s -= (rab * rab * rab + rbc * rbc * rbc + rac * rac * rac) / (3.0L * abc);
  return s / static_cast<long double>(constants::pi);
}

}  // namespace detail

/// Demagnetizing factors of a uniformly magnetized rectangular prism with
/// full edge lengths (lx, ly, lz), from Aharoni's analytical expressions.
inline DemagFactors demag_factors(double lx, double ly, double lz) {
  require(lx > 0 && ly > 0 && lz > 0 && std::isfinite(lx) && std::isfinite(ly) && std::isfinite(lz),
          "prism edges must be positive and finite");
  const long double a = lx / 2.0L, b = ly / 2.0L, c = lz / 2.0L;
  const long double nzz = detail::aharoni_axis(a, b, c);
  const long double nxx = detail::aharoni_axis(b, c, a);
  const long double nyy = detail::aharoni_axis(c, a, b);
  return {static_cast<double>(nxx), static_cast<double>(nyy), static_cast<double>(nzz)};
}

inline DemagFactors demag_factors(const MagnetParams& p) {
  return demag_factors(p.length, p.width, p.thickness);
}

/// Standard deviation (A/m) of each thermal-field component for step dt.
inline double thermal_sigma(const MagnetParams& p, double dt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  require(p.temperature >= 0, "temperature must be non-negative");
  if (p.temperature == 0.0) return 0.0;
  const double gamma_field = p.gamma * constants::mu0;
  return std::sqrt(2.0 * p.alpha * constants::k_boltzmann * p.temperature /
                   (gamma_field * constants::mu0 * p.ms * p.volume() * dt));
}

inline Vec3 thermal_field_sample(const MagnetParams& p, double dt, const std::array<double, 3>& draw) {
  const double s = thermal_sigma(p, dt);
  return {draw[0] * s, draw[1] * s, draw[2] * s};
}

/// Landau-Lifshitz right-hand side, algebraically equivalent to the implicit
/// Gilbert form. `gamma` is in rad/(s*T); fields in A/m.
inline Vec3 llg_rhs(const Vec3& m, const Vec3& h_eff, double alpha, double gamma) {
  const double pref = -gamma * constants::mu0 / (1.0 + alpha * alpha);
  const Vec3 mxh = cross(m, h_eff);
  return pref * (mxh + alpha * cross(m, mxh));
}

/// Precomputed field model for one magnet. Holds the demagnetizing factors
/// and the scalar coefficients so a step costs two field evaluations.
class MagnetModel {
 public:
  explicit MagnetModel(const MagnetParams& p) : MagnetModel(p, demag_factors(p)) {}

  MagnetModel(const MagnetParams& p, const DemagFactors& n) : p_(p), n_(n) {
    p_.validate();
    h_interface_coeff_ = 2.0 * p_.ki / (constants::mu0 * p_.ms * p_.thickness);
    h_me_per_volt_ = p_.alpha_me / (p_.t_me * constants::mu0);
  }

  const MagnetParams& params() const { return p_; }
  const DemagFactors& demag() const { return n_; }

  // Interface field per unit m_z, A/m.
  double interface_coefficient() const { return h_interface_coeff_; }
  // ME field along x per volt across the ME capacitor, A/m/V.
  double me_field_per_volt() const { return h_me_per_volt_; }

  FieldSample field(const Vec3& m, double v_me, const Vec3& thermal = {}) const {
    FieldSample f;
    f.h_demag = {-p_.ms * n_.nxx * m.x, -p_.ms * n_.nyy * m.y, -p_.ms * n_.nzz * m.z};
    f.h_interface = {0.0, 0.0, h_interface_coeff_ * m.z};
    f.h_thermal = thermal;
    f.h_me = {h_me_per_volt_ * v_me, 0.0, 0.0};
    return f;
  }

  Vec3 total_field(const Vec3& m, double v_me, const Vec3& thermal = {}) const {
    return {-p_.ms * n_.nxx * m.x + h_me_per_volt_ * v_me + thermal.x,
            -p_.ms * n_.nyy * m.y + thermal.y,
            (h_interface_coeff_ - p_.ms * n_.nzz) * m.z + thermal.z};
  }

  Vec3 rhs(const Vec3& m, double v_me, const Vec3& thermal = {}) const {
    return llg_rhs(m, total_field(m, v_me, thermal), p_.alpha, p_.gamma);
  }

  // Free energy density (J/m^3) of the deterministic terms: shape + interface
  // anisotropy and ME Zeeman energy.
  double energy_density(const Vec3& m, double v_me) const {
    const double mu0 = constants::mu0;
    const double shape = 0.5 * mu0 * p_.ms * p_.ms *
                         (n_.nxx * m.x * m.x + n_.nyy * m.y * m.y + n_.nzz * m.z * m.z);
    const double interface = -(p_.ki / p_.thickness) * m.z * m.z;
    const double zeeman = -mu0 * p_.ms * h_me_per_volt_ * v_me * m.x;
    return shape + interface + zeeman;
  }

  double thermal_sigma(double dt) const { return melink::thermal_sigma(p_, dt); }

 private:
  MagnetParams p_;
  DemagFactors n_;
  double h_interface_coeff_ = 0.0;
  double h_me_per_volt_ = 0.0;
};

inline FieldSample effective_field(const SpinState& s, const MagnetModel& model, double v_me,
                                   const Vec3& thermal) {
  return model.field(s.m, v_me, thermal);
}

/// One Heun predictor-corrector step with a fixed thermal field shared by
/// both stages. The ME voltage may change across the step (v_start at t,
/// v_end at t + dt).
inline SpinState heun_step(const SpinState& s, const MagnetModel& model, double v_start,
                           double v_end, double dt, const Vec3& thermal) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const Vec3 k1 = model.rhs(s.m, v_start, thermal);
  const Vec3 predictor = normalized(s.m + dt * k1);
  const Vec3 k2 = model.rhs(predictor, v_end, thermal);
  return {normalized(s.m + (0.5 * dt) * (k1 + k2)), s.t + dt};
}

inline SpinState heun_step(const SpinState& s, const MagnetModel& model, double v_me, double dt,
                           RandomStream& rng) {
  const double sigma = model.thermal_sigma(dt);
  Vec3 thermal;
  if (sigma > 0.0) thermal = {sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
  return heun_step(s, model, v_me, v_me, dt, thermal);
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

inline constexpr double kSwitchThreshold = 0.9;
inline constexpr double kDeterministicTiltDeg = 1.0;

/// Free layer along `direction` (+1 or -1 on x). At T = 0 the state is tilted
/// by `tilt_deg` toward +z, since the exact easy-axis state is a fixed point.
inline SpinState initial_state(int direction, double temperature, double tilt_deg = kDeterministicTiltDeg) {
  require(direction == 1 || direction == -1, "direction must be +1 or -1");
  if (temperature > 0.0) return {{static_cast<double>(direction), 0.0, 0.0}, 0.0};
  const double th = tilt_deg * constants::pi / 180.0;
  return {{direction * std::cos(th), 0.0, std::sin(th)}, 0.0};
}

struct TrajectorySample {
  double t = 0.0;
  Vec3 m;
  double v_me = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::optional<double> switching_time;  // first threshold crossing, s
};

struct TrajectoryOptions {
  int target_direction = +1;          // which easy-axis state counts as switched
  double threshold = kSwitchThreshold;
  bool record = true;                 // keep every sample
  bool stop_at_switch = false;
};

using Waveform = std::function<double(double)>;

inline bool reached(const Vec3& m, int direction, double threshold) {
  return direction > 0 ? m.x >= threshold : m.x <= -threshold;
}

inline Trajectory simulate_trajectory(const SpinState& initial, const MagnetModel& model,
                                      const Waveform& v_me, double duration, double dt,
                                      RandomStream& rng, const TrajectoryOptions& opt = {}) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (!(duration >= dt)) throw ParameterError("duration must be at least one time step");
  const double sigma = model.thermal_sigma(dt);
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));

  Trajectory out;
  if (opt.record) out.samples.reserve(steps + 1);
  SpinState s = initial;
  double v0 = v_me(s.t);
  if (opt.record) out.samples.push_back({s.t, s.m, v0});
  if (reached(s.m, opt.target_direction, opt.threshold)) out.switching_time = s.t;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = initial.t + static_cast<double>(k + 1) * dt;
    const double v1 = v_me(t1);
    Vec3 thermal;
    if (sigma > 0.0) thermal = {sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
    s = heun_step(s, model, v0, v1, dt, thermal);
    s.t = t1;
    v0 = v1;
    if (opt.record) out.samples.push_back({s.t, s.m, v1});
    if (!out.switching_time && reached(s.m, opt.target_direction, opt.threshold)) {
      out.switching_time = s.t;
      if (opt.stop_at_switch) break;
    }
  }
  return out;
}

}  // namespace melink
