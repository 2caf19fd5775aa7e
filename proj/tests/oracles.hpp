#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's physics; only plain value types are shared.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double mu0 = 4.0e-7 * pi;

// --- demagnetizing factor by direct quadrature ------------------------------
//
// N_zz of an a x b x c prism (c along z) from the face-charge interaction
// energy: N_zz = (2 I(a,b,0) - 2 I(a,b,c)) / (4 pi a b c) with
// I(A,B,h) = 4 int_0^A (A-u) [B asinh(B / sqrt(u^2+h^2)) - (sqrt(u^2+B^2+h^2) - sqrt(u^2+h^2))] du.

inline long double face_integral(long double A, long double B, long double h) {
  boost::math::quadrature::tanh_sinh<long double> integrator;
  auto f = [=](long double u) -> long double {
    const long double r = std::sqrt(u * u + h * h);
    if (r == 0.0L) return 0.0L;
    return (A - u) * (B * std::asinh(B / r) - (std::sqrt(u * u + B * B + h * h) - r));
  };
  return 4.0L * integrator.integrate(f, 0.0L, A);
}

inline double demag_normal(double a, double b, double c) {
  const long double v = static_cast<long double>(a) * b * c;
  return static_cast<double>((2.0L * face_integral(a, b, 0.0L) - 2.0L * face_integral(a, b, c)) / (4.0L * pi * v));
}

struct Demag {
  double nxx, nyy, nzz;
};

inline Demag demag(double lx, double ly, double lz) {
  return {demag_normal(ly, lz, lx), demag_normal(lz, lx, ly), demag_normal(lx, ly, lz)};
}

// --- macrospin dynamics with classical RK4 ---------------------------------

struct Magnet {
  double ms, alpha, gamma, ki, thickness, t_me, alpha_me;
  Demag n;
};

using V3 = std::array<double, 3>;

inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline V3 field(const Magnet& p, const V3& m, double v) {
  return {-p.ms * p.n.nxx * m[0] + p.alpha_me * v / (p.t_me * mu0), -p.ms * p.n.nyy * m[1],
          -p.ms * p.n.nzz * m[2] + 2.0 * p.ki / (mu0 * p.ms * p.thickness) * m[2]};
}

inline V3 rhs(const Magnet& p, const V3& m, double v) {
  const V3 h = field(p, m, v);
  const V3 mxh = cross(m, h);
  const V3 mmh = cross(m, mxh);
  const double pre = -p.gamma * mu0 / (1.0 + p.alpha * p.alpha);
  return {pre * (mxh[0] + p.alpha * mmh[0]), pre * (mxh[1] + p.alpha * mmh[1]), pre * (mxh[2] + p.alpha * mmh[2])};
}

/// Deterministic trajectory at constant voltage, sampled every `every` steps.
inline std::vector<V3> rk4_trajectory(const Magnet& p, V3 m, double v, double dt, std::size_t steps, std::size_t every) {
  std::vector<V3> out{m};
  auto axpy = [](const V3& a, double s, const V3& b) { return V3{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]}; };
  for (std::size_t k = 1; k <= steps; ++k) {
    const V3 k1 = rhs(p, m, v);
    const V3 k2 = rhs(p, axpy(m, 0.5 * dt, k1), v);
    const V3 k3 = rhs(p, axpy(m, 0.5 * dt, k2), v);
    const V3 k4 = rhs(p, axpy(m, dt, k3), v);
    for (int i = 0; i < 3; ++i) m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (k % every == 0) out.push_back(m);
  }
  return out;
}

// --- RC line moments from chained ABCD matrices ---------------------------
//
// Series element Z, shunt element Y. The transfer function to an open far
// end is 1/A of the total chain. Evaluated at small real s in long double;
// the first moment comes from a two-point Richardson fit of
// H(s) = H0 (1 - m1 s + O(s^2)).

struct Abcd {
  long double a, b, c, d;
};

inline Abcd operator*(const Abcd& x, const Abcd& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline long double ladder_transfer(long double s, double r_driver, double c_s, double r_w, double c_w, double c_l, int n) {
  auto series = [](long double z) { return Abcd{1, z, 0, 1}; };
  auto shunt = [](long double y) { return Abcd{1, 0, y, 1}; };
  Abcd t = series(r_driver) * series(1.0L / (s * c_s));
  const long double rs = static_cast<long double>(r_w) / n;
  const long double cs = static_cast<long double>(c_w) / n;
  for (int k = 0; k < n; ++k) t = t * shunt(0.5L * s * cs) * series(rs) * shunt(0.5L * s * cs);
  t = t * shunt(s * c_l);
  return 1.0L / t.a;
}

struct Moments {
  double dc_gain;
  double elmore;  // s
};

inline Moments ladder_moments(double r_driver, double c_s, double r_w, double c_w, double c_l, int n) {
  const long double tau = (r_driver + r_w) * (c_s + c_w + c_l);
  const long double e = 1e-7L / tau;
  const long double h1 = ladder_transfer(e, r_driver, c_s, r_w, c_w, c_l, n);
  const long double h2 = ladder_transfer(2 * e, r_driver, c_s, r_w, c_w, c_l, n);
  // h(s) = h0 - h0 m1 s + O(s^2)
  const long double h0 = 2 * h1 - h2;
  const long double slope = (h2 - h1) / e;
  return {static_cast<double>(h0), static_cast<double>(-slope / h0)};
}

// --- closed forms ------------------------------------------------------------

/// Capacitance seen by a step source: c_s in series with everything to ground.
inline double series_capacitance(double c_s, double c_ground) { return c_s * c_ground / (c_s + c_ground); }

/// Wilson interval as the roots of (p_hat - p)^2 = z^2 p (1 - p) / n.
inline std::array<double, 2> wilson_roots(double k, double n, double z) {
  const double ph = k / n;
  const double a = 1.0 + z * z / n;
  const double b = -(2.0 * ph + z * z / n);
  const double c = ph * ph;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  return {(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)};
}

}  // namespace oracle
