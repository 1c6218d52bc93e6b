#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "bichro/config.hpp"
#include "bichro/errors.hpp"

using namespace bichro;
constexpr double pi = std::numbers::pi;

TEST_CASE("defaults are materialised") {
  const RunConfig c;
  CHECK(c.real("v1") == 5.0);
  CHECK(c.integer("cutoff") == 16);
  CHECK(c.flag("frames"));
  CHECK(c.echo().size() == RunConfig::keys().size());
  CHECK(c.echo().front() == "v1 = 5");
  const auto phi = c.list("phi");
  REQUIRE(phi.size() == 3);
  CHECK(phi[1] == doctest::Approx(0.8 * pi));
  CHECK(phi[2] == doctest::Approx(pi));
}

TEST_CASE("phases") {
  CHECK(parse_phase("pi") == doctest::Approx(pi));
  CHECK(parse_phase("-pi") == doctest::Approx(-pi));
  CHECK(parse_phase("0.25pi") == doctest::Approx(0.25 * pi));
  CHECK(parse_phase("1.5") == 1.5);
  CHECK_THROWS_AS(parse_phase("tau"), ConfigError);
  CHECK(phase_tag(0.8 * pi) == "0.8000pi");
}

TEST_CASE("strict keys and values") {
  RunConfig c;
  c.set("grid-per-period", "64");
  CHECK(c.integer("grid_per_period") == 64);
  CHECK_THROWS_AS(c.set("colour", "blue"), ConfigError);
  CHECK_THROWS_AS(c.set("cutoff", "16.5"), ConfigError);
  CHECK_THROWS_AS(c.set("v1", "5x"), ConfigError);
  CHECK_THROWS_AS(c.set("frames", "yes"), ConfigError);
  CHECK_THROWS_AS(c.set("sigmas", "8,,17"), ConfigError);
  CHECK(c.integer("cutoff") == 16);
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "bichro_test.cfg";
  {
    std::ofstream os(path);
    os << "# comment\n\nv1 = 6   # trailing\nphi = 0, pi\n";
  }
  RunConfig c;
  c.load_file(path);
  CHECK(c.real("v1") == 6.0);
  CHECK(c.list("phi").size() == 2);
  {
    std::ofstream os(path);
    os << "v1 6\n";
  }
  CHECK_THROWS_AS(c.load_file(path), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(c.load_file(path), IoError);
}
