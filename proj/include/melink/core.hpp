#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace melink {

// Physical constants (SI).
namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double mu0 = 4.0e-7 * pi;             // T*m/A
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double gamma_electron = 1.76e11;      // rad/(s*T)
}  // namespace constants

// ---------------------------------------------------------------------------
// Errors. Every failure mode that a caller may want to branch on has its own
// type; all derive from std::runtime_error so a single catch still works.
// ---------------------------------------------------------------------------

// A value outside the physical/parameter domain of an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular or otherwise unsolvable numerical system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A waveform measurement (crossing, settle) could not be taken.
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The link did not complete a write or reset inside its clock phase.
class LinkFailure : public std::runtime_error {
 public:
  LinkFailure(const std::string& what, std::size_t cycle)
      : std::runtime_error(what), cycle_(cycle) {}
  std::size_t cycle() const noexcept { return cycle_; }

 private:
  std::size_t cycle_;
};

// Post-hoc validation of a numerical study failed (e.g. non-monotone error).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw NumericalError("cannot normalize a zero vector");
  return a * (1.0 / n);
}

// ---------------------------------------------------------------------------
// Random streams
//
// Each stream is keyed by (master seed, a, b) and seeded through SplitMix64
// mixing, so the numbers a trial sees depend only on its key and never on
// which worker ran it or in what order.
// ---------------------------------------------------------------------------
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_key(std::uint64_t master, std::uint64_t a,
                                          std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) + 0x632be59bd9b4e019ULL * (b + 1));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0)
      : engine_(stream_key(master, a, b)) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(engine_);
  }
  std::array<double, 3> normal3() { return {normal(), normal(), normal()}; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace melink
