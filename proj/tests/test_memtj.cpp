#include "catch_amalgamated.hpp"

#include "melink/memtj.hpp"

using namespace melink;
using Catch::Approx;

TEST_CASE("tunnel resistance at the poles and the midpoint", "[mtj]") {
  const MtjParams p;
  CHECK(mtj_resistance(1.0, p) == Approx(10e3));
  CHECK(mtj_resistance(-1.0, p) == Approx(20e3));
  // 2 / (G_P + G_AP)
  CHECK(mtj_resistance(0.0, p) == Approx(2.0 / (1.0 / 10e3 + 1.0 / 20e3)));
  CHECK(mtj_resistance(0.0, p) == Approx(13333.333333).epsilon(1e-9));
  CHECK_THROWS_AS(mtj_resistance(1.01, p), ParameterError);
}

TEST_CASE("resistance is monotone in m_x", "[mtj][property]") {
  const MtjParams p;
  double prev = mtj_resistance(-1.0, p);
  for (int i = 1; i <= 200; ++i) {
    const double r = mtj_resistance(-1.0 + i * 0.01, p);
    REQUIRE(r < prev);
    prev = r;
  }
}

TEST_CASE("divider read voltages and sensing", "[mtj][read]") {
  const MtjParams p;
  const double ref = std::sqrt(10e3 * 20e3);
  CHECK(p.reference() == Approx(ref));
  const double v_p = read_voltage(mtj_resistance(1.0, p), p);
  const double v_ap = read_voltage(mtj_resistance(-1.0, p), p);
  CHECK(v_p == Approx(10e3 / (10e3 + ref)));
  CHECK(v_ap == Approx(20e3 / (20e3 + ref)));
  CHECK(v_p == Approx(0.4142135624).epsilon(1e-9));
  CHECK(v_ap == Approx(0.5857864376).epsilon(1e-9));
  CHECK(sense(v_p, 1.0) == 1);
  CHECK(sense(v_ap, 1.0) == 0);
  CHECK(sense(0.5, 1.0) == 0);  // a tie resolves to 0
  CHECK_THROWS_AS(sense(1.2, 1.0), ParameterError);
  CHECK_THROWS_AS(sense(-0.1, 1.0), ParameterError);
}

TEST_CASE("reference must separate the two states", "[mtj][params]") {
  MtjParams p;
  p.r_ref = 9e3;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.r_ref = 20e3;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.r_ref = 15e3;
  CHECK_NOTHROW(p.validate());
  p = MtjParams{};
  p.tmr = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = MtjParams{};
  p.r_p = -1;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("ME capacitor of the default device", "[mtj][capacitor]") {
  const MeCapacitor c = me_capacitor(MagnetParams{});
  CHECK(c.area == Approx(112.5e-9 * 45e-9));
  CHECK(c.capacitance == Approx(8.8541878128e-12 * 50 * 112.5e-9 * 45e-9 / 5e-9));
  CHECK(c.capacitance == Approx(4.48243258023e-16).epsilon(1e-9));
  CHECK_THROWS_AS(me_capacitance(0, 5e-9, 50), ParameterError);
}

TEST_CASE("read and reset energies", "[mtj][energy]") {
  MtjParams p;
  p.t_read = 1e-9;
  const double r = mtj_resistance(1.0, p);
  CHECK(read_energy(r, p) == Approx(1.0 / (r + p.reference()) * 1e-9));
  p.v_read = 0;
  CHECK(read_energy(r, p) == 0.0);
  const MeCapacitor c = me_capacitor(MagnetParams{});
  CHECK(reset_energy(c, 1.0) == Approx(c.capacitance));
  CHECK(reset_energy(c, 0.5) == Approx(0.25 * c.capacitance));
}
