#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "melink/config.hpp"

using namespace melink;
using Catch::Approx;

namespace {

const std::string kDefaults = std::string(MELINK_SOURCE_DIR) + "/config/defaults.json";

bool same_values(const RunConfig& a, const RunConfig& b) {
  for (const auto& key : config_keys()) {
    const auto x = get_config_value(a, key);
    const auto y = get_config_value(b, key);
    if (x.has_value() != y.has_value()) return false;
    if (x && std::abs(*x - *y) > 1e-12 * std::max(std::abs(*x), std::abs(*y))) {
      UNSCOPED_INFO("key " << key << ": " << *x << " vs " << *y);
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("shipped defaults match the built-in defaults", "[config]") {
  RunConfig from_file;
  from_file.link.magnet.alpha = 0.5;  // must be overwritten by the file
  load_config_file(from_file, kDefaults);
  CHECK(same_values(from_file, RunConfig{}));
  CHECK_NOTHROW(from_file.validate());
}

TEST_CASE("every key appears in the shipped file", "[config]") {
  std::ifstream in(kDefaults);
  const auto j = nlohmann::json::parse(in);
  for (const auto& key : config_keys()) {
    const auto dot = key.find('.');
    INFO(key);
    REQUIRE(j.contains(key.substr(0, dot)));
    CHECK(j[key.substr(0, dot)].contains(key.substr(dot + 1)));
  }
}

TEST_CASE("json round trip", "[config]") {
  RunConfig c;
  apply_override(c, "wire.length_mm=10");
  apply_override(c, "mtj.r_ref_ohm=15000");
  apply_override(c, "sim.seed=42");
  RunConfig back;
  apply_json(back, config_to_json(c));
  CHECK(same_values(back, c));
  CHECK(back.link.wire.length_mm == 10.0);
  CHECK(back.link.mtj.r_ref == 15000.0);
  CHECK(back.link.seed == 42);
}

TEST_CASE("values are converted to SI", "[config]") {
  RunConfig c;
  apply_override(c, "device.length_nm=100");
  apply_override(c, "wire.c_per_mm_ff_per_um=0.2");
  apply_override(c, "clock.period_ns=4");
  apply_override(c, "baseline.i_bias_ua=10");
  CHECK(c.link.magnet.length == Approx(100e-9));
  CHECK(c.link.wire.c_per_mm == Approx(0.2e-12));
  CHECK(c.link.clock.period == Approx(4e-9));
  CHECK(c.lowswing.i_bias == Approx(10e-6));
  CHECK(*get_config_value(c, "device.length_nm") == Approx(100));
}

TEST_CASE("optional keys accept null", "[config]") {
  RunConfig c;
  apply_override(c, "mtj.t_read_ns=2");
  CHECK_FALSE(c.link.read_window_from_clock);
  CHECK(c.link.effective_mtj().t_read == Approx(2e-9));
  apply_override(c, "mtj.t_read_ns=null");
  CHECK(c.link.read_window_from_clock);
  CHECK(c.link.effective_mtj().t_read == Approx(c.link.clock.read_time()));
  apply_override(c, "mtj.r_ref_ohm=null");
  CHECK_FALSE(c.link.mtj.r_ref.has_value());
  CHECK_THROWS_AS(apply_override(c, "wire.length_mm=null"), ParameterError);
}

TEST_CASE("malformed configuration is rejected", "[config]") {
  RunConfig c;
  CHECK_THROWS_AS(apply_override(c, "wire.lenght_mm=5"), ParameterError);
  CHECK_THROWS_AS(apply_override(c, "wire.length_mm"), ParameterError);
  CHECK_THROWS_AS(apply_override(c, "wire.length_mm=five"), ParameterError);
  CHECK_THROWS_AS(apply_override(c, "wire.length_mm=5mm"), ParameterError);
  CHECK_THROWS_AS(apply_override(c, "wire.n_segments=2.5"), ParameterError);
  CHECK_THROWS_AS(apply_override(c, "sim.seed=-1"), ParameterError);
  CHECK_THROWS_AS(apply_override(c, "device.alpha=inf"), ParameterError);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"wire": {"colour": 3}})")), ParameterError);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"wire": {"length_mm": "5"}})")), ParameterError);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse("[1, 2]")), ParameterError);
  CHECK_THROWS_AS(load_config_file(c, "/nonexistent/melink.json"), ParameterError);
}

TEST_CASE("later sources override earlier ones", "[config]") {
  const std::string path = "test_config_override.json";
  {
    std::ofstream out(path);
    out << R"({"wire": {"length_mm": 7}, "sim": {"seed": 9}})";
  }
  RunConfig c;
  load_config_file(c, path);
  CHECK(c.link.wire.length_mm == 7.0);
  CHECK(c.link.seed == 9);
  CHECK(c.link.wire.r_per_mm == 50.0);
  apply_override(c, "wire.length_mm=3");
  CHECK(c.link.wire.length_mm == 3.0);
  std::remove(path.c_str());
}

TEST_CASE("configuration validation catches bad physics", "[config]") {
  RunConfig c;
  apply_override(c, "clock.write_fraction=0.7");
  CHECK_THROWS_AS(c.validate(), ParameterError);
  RunConfig d;
  apply_override(d, "sim.window_ns=0");
  CHECK_THROWS_AS(d.validate(), ParameterError);
  RunConfig e;
  apply_override(e, "device.alpha=1.5");
  CHECK_THROWS_AS(e.validate(), ParameterError);
}
