#include <doctest.h>

#include <numbers>
#include <sstream>

#include "bichro/wannier.hpp"

using namespace bichro;
constexpr double pi = std::numbers::pi;

namespace {

const BandStructure& reference_bands() {
  static const BandStructure b = compute_band_structure({5.0, 1.56, 0.0}, 129, 5);
  return b;
}

const std::vector<GaugeFixedBand>& reference_gauges() {
  static const std::vector<GaugeFixedBand> g = {fix_gauge(reference_bands(), 0), fix_gauge(reference_bands(), 1),
                                                fix_gauge(reference_bands(), 2)};
  return g;
}

}  // namespace

TEST_CASE("orthonormality over three bands and seven sites") {
  const auto& g = reference_gauges();
  const SpatialGrid grid = supercell_grid(g[0], 0, 32);
  std::vector<WannierFunction> home;
  for (const auto& band : g) home.push_back(build_wannier(band, 0, grid));
  double worst = 0.0;
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a)
      for (int n = -3; n <= 3; ++n) {
        const auto wn = build_wannier(g[static_cast<std::size_t>(b)], n, grid);
        const double expect = (a == b && n == 0) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(overlap(wn, home[static_cast<std::size_t>(a)]) - expect));
      }
  CHECK(worst < 1e-6);
}

TEST_CASE("translating the home function gives the site function") {
  for (const auto& band : reference_gauges())
    for (int n : {1, -2, 3}) CHECK(shift_residual(band, n, 32) < 1e-6);
}

TEST_CASE("ground and first excited Wannier functions decay three decades within three periods") {
  for (int a : {0, 1}) {
    const auto w = build_wannier(reference_gauges()[static_cast<std::size_t>(a)], 0, 64);
    INFO("band " << a);
    CHECK(decay_decades(w, 3.0 * kPeriod) >= 3.0);
    CHECK(decay_slope(w) < 0.0);
  }
  const auto w2 = build_wannier(reference_gauges()[2], 0, 64);
  CHECK(decay_slope(w2) < 0.0);
}

TEST_CASE("inversion-symmetric lattice gives real Wannier functions centred on a symmetry point") {
  for (const auto& band : reference_gauges()) {
    const auto w = build_wannier(band, 0, 64);
    CHECK(imaginary_residual(w) < 1e-6);
    const double cells = w.center / (0.5 * pi);
    CHECK(std::abs(cells - std::round(cells)) < 1e-6);
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("global phase does not change the density") {
  const auto& band = reference_gauges()[1];
  const auto a = build_wannier(band, 0, 32);
  const auto b = build_wannier(with_global_phase(band, 1.1), 0, 32);
  CHECK((a.samples.cwiseAbs() - b.samples.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("the crossing bands at phi = pi are refused") {
  const BandStructure b = compute_band_structure({5.0, 1.56, pi}, 129, 4);
  CHECK_NOTHROW(fix_gauge(b, 0));
  CHECK_THROWS_AS(fix_gauge(b, 1), DegenerateBandError);
  CHECK_THROWS_AS(fix_gauge(b, 2), DegenerateBandError);
}

TEST_CASE("input validation") {
  const BandStructure small = compute_band_structure({5.0, 1.56, 0.0}, 65, 4);
  CHECK_THROWS_AS(fix_gauge(small, 0), ConfigError);
  CHECK_THROWS_AS(fix_gauge(reference_bands(), 4), ConfigError);
  CHECK_THROWS_AS(build_wannier(reference_gauges()[0], 0, SpatialGrid::lattice(10, 32)), ConfigError);
  const auto w = build_wannier(reference_gauges()[0], 0, 32);
  const auto other = build_wannier(reference_gauges()[0], 0, 16);
  CHECK_THROWS_AS(overlap(w, other), ConfigError);
}

TEST_CASE("linear-potential matrix elements") {
  std::vector<PotentialMatrixTable> tables;
  for (double v1 : {4.0, 6.0, 8.0, 10.0}) tables.push_back(linear_potential_table({v1, v1 * 1.56 / 5.0, 0.0}, 2));
  for (const auto& t : tables) {
    INFO("V1=" << t.v1);
    CHECK(std::abs(t.entry(1, 1, 0)) < 1e-8);
    CHECK(std::abs(t.entry(2, 2, 0)) < 1e-8);
    CHECK(t.hermiticity_residual() < 1e-8);
    CHECK(std::abs(t.entry(2, 1, 2)) < std::abs(t.entry(2, 1, 1)));
    CHECK(std::abs(t.entry(2, 1, -2)) < std::abs(t.entry(2, 1, -1)));
  }
  for (std::size_t i = 1; i < tables.size(); ++i)
    for (int s : {-2, -1, 1, 2}) CHECK(std::abs(tables[i].entry(2, 1, s)) < std::abs(tables[i - 1].entry(2, 1, s)));

  std::ostringstream os;
  write_matrix_table_csv(os, tables[0]);
  CHECK(os.str().rfind("alpha,beta,offset,re,im,V1,phi\n", 0) == 0);
}
