#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "bichro/dirac.hpp"

using namespace bichro;
constexpr double pi = std::numbers::pi;

namespace {

// Independent least-squares fit (trust-region solver) of finite-difference band energies on
// the same kappa grid, V1 = 5, V2 = 1.56, window 0.3.
struct FitRow {
  double phi_over_pi, offset, mc2, c, residual;
};
const FitRow kFits[] = {
    {0.0, 4.20119725, 0.68169173, 3.77380333, 0.033132},
    {0.2, 4.20982983, 0.64680487, 3.76645773, 0.033285},
    {0.4, 4.23200293, 0.54694562, 3.74801287, 0.033663},
    {0.6, 4.25861359, 0.39470228, 3.72672743, 0.034091},
    {0.8, 4.27954892, 0.20673092, 3.71091357, 0.034412},
    {1.0, 4.28741426, 0.00056668, 3.70608909, 0.034531},
};

}  // namespace

TEST_CASE("fit agrees with the independent least-squares oracle") {
  for (const auto& row : kFits) {
    INFO("phi/pi=" << row.phi_over_pi);
    const BandStructure b = compute_band_structure({5.0, 1.56, row.phi_over_pi * pi}, 129, 3);
    const DiracParams d = fit_dirac(b);
    CHECK(std::abs(d.offset - row.offset) < 1e-5);
    CHECK(std::abs(d.mass_energy - row.mc2) < 1e-5);
    CHECK(std::abs(d.speed - row.c) < 1e-4);
    CHECK(std::abs(d.fit_residual - row.residual) < 1e-5);
    CHECK(gap_consistency(d, b) < 0.02);
  }
}

TEST_CASE("fit recovers synthetic relativistic data") {
  Eigen::VectorXd k = Eigen::VectorXd::LinSpaced(129, -1.0, 1.0), lo(129), up(129);
  DiracParams truth;
  truth.mass_energy = 0.5;
  truth.speed = 3.5;
  truth.offset = 4.0;
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    lo[i] = truth.offset - truth.dispersion(k[i]);
    up[i] = truth.offset + truth.dispersion(k[i]);
  }
  const DiracParams d = fit_dirac(k, lo, up, 0.3);
  CHECK(d.mass_energy == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.speed == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(d.offset == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(d.fit_residual < 1e-10);
  CHECK_FALSE(d.flagged());

  for (Eigen::Index i = 0; i < k.size(); ++i) {
    lo[i] = 4.0 - 3.5 * std::abs(k[i]);
    up[i] = 4.0 + 3.5 * std::abs(k[i]);
  }
  const DiracParams m = fit_dirac(k, lo, up, 0.3);
  CHECK(m.mass_energy == 0.0);
  CHECK(m.speed == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("fit input validation") {
  const Eigen::VectorXd k = Eigen::VectorXd::LinSpaced(129, -1.0, 1.0);
  CHECK_THROWS_AS(fit_dirac(k, k, k, 0.0), ConfigError);
  CHECK_THROWS_AS(fit_dirac(k, k, k, 0.6), ConfigError);
  CHECK_THROWS_AS(fit_dirac(k, k, k, 0.02), ConfigError);
  const Eigen::VectorXd shifted = Eigen::VectorXd::LinSpaced(128, -1.0, 1.0);
  CHECK_THROWS_AS(fit_dirac(shifted, shifted, shifted, 0.3), ConfigError);
}

TEST_CASE("h0 eigenvalues and eigenvectors follow the dispersion and mixing angle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int draw = 0; draw < 1000; ++draw) {
    DiracParams p;
    p.mass_energy = 2.0 * std::abs(u(rng)) + 1e-3;
    p.speed = 5.0 * std::abs(u(rng)) + 1e-2;
    p.offset = 10.0 * u(rng);
    const double kappa = u(rng);
    const Eigen::Matrix2d h = h0_matrix(p, kappa);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    const double e = p.dispersion(kappa);
    CHECK(std::abs(es.eigenvalues()[0] - (p.offset - e)) < 1e-12 * (1.0 + std::abs(p.offset)));
    CHECK(std::abs(es.eigenvalues()[1] - (p.offset + e)) < 1e-12 * (1.0 + std::abs(p.offset)));
    const double t = mixing_angle(p, kappa);
    const Eigen::Vector2d upper(std::cos(t), std::sin(t)), lower(-std::sin(t), std::cos(t));
    CHECK((h * upper - (p.offset + e) * upper).norm() < 1e-11 * (1.0 + std::abs(p.offset)));
    CHECK((h * lower - (p.offset - e) * lower).norm() < 1e-11 * (1.0 + std::abs(p.offset)));
  }
}

TEST_CASE("3-4-5 triangle") {
  DiracParams p;
  p.mass_energy = 3.0;
  p.speed = 4.0;
  CHECK(p.dispersion(1.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(std::tan(mixing_angle(p, 1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::tan(mixing_angle(p, -1.0)) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(p.group_velocity(1.0) == doctest::Approx(16.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("massless mixing angle") {
  DiracParams p;
  p.mass_energy = 0.0;
  p.speed = 2.0;
  CHECK(mixing_angle(p, -0.1) == doctest::Approx(pi / 2));
  CHECK(mixing_angle(p, 0.1) == 0.0);
  CHECK_THROWS_AS(mixing_angle(p, 0.0), ConfigError);
}

TEST_CASE("spinor rotation maps onto the Dirac form") {
  DiracParams p;
  p.mass_energy = 1.0;
  p.speed = 2.0;
  const Eigen::Matrix2d d = to_dirac_form(h0_matrix(p, 1.0));
  Eigen::Matrix2d expect;
  expect << -1.0, 2.0, 2.0, 1.0;
  CHECK((d - expect).norm() < 1e-14);
  const Eigen::Matrix2cd uc = spinor_rotation_matrix<std::complex<double>>();
  CHECK((uc * uc.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
  const Eigen::Vector2cd v = spinor_rotation(Eigen::Vector2cd(1.0, 0.0));
  CHECK(std::abs(v[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("rotated band pair stays orthonormal") {
  const auto s = solve_bloch({5.0, 1.56, 0.0}, 0.2, PlaneWaveBasis{}, 3);
  const auto [a, b] = rotate_band_pair(s[1], s[2], 0.3);
  CHECK(std::abs(a.coeffs.norm() - 1.0) < 1e-14);
  CHECK(std::abs(b.coeffs.dot(a.coeffs)) < 1e-14);
  CHECK(a.energy + b.energy == doctest::Approx(s[1].energy + s[2].energy).epsilon(1e-14));
  const auto other = solve_bloch({5.0, 1.56, 0.0}, 0.3, PlaneWaveBasis{}, 3);
  CHECK_THROWS_AS(rotate_band_pair(s[1], other[2], 0.3), ConfigError);
}

TEST_CASE("fit report keys") {
  DiracParams p;
  std::ostringstream os;
  write_fit_report(os, 0.5, p);
  for (const char* key : {"phi ", "mc2 ", "c ", "E_D ", "residual ", "window "})
    CHECK((("\n" + os.str()).find(std::string("\n") + key) != std::string::npos));
}

TEST_CASE("local parameters agree with finite-difference curvatures") {
  // midpoint, half gap and sqrt(half gap (E_2'' - E_1'')/2) from the finite-difference bands
  const DiracParams a = local_dirac_params({5.0, 1.56, 0.0});
  CHECK(std::abs(a.offset - 4.1642033773) < 2e-6);
  CHECK(std::abs(a.mass_energy - 0.6812434908) < 2e-6);
  CHECK(std::abs(a.speed - 3.7853864447) < 1e-4);
  const DiracParams b = local_dirac_params({5.0, 1.56, 0.8 * pi});
  CHECK(std::abs(b.mass_energy - 0.2060028169) < 2e-6);
  CHECK(std::abs(b.speed - 3.7221932739) < 1e-4);
  const DiracParams c = local_dirac_params({5.0, 1.25 * 1.25, pi});
  CHECK(c.mass_energy == 0.0);
  CHECK(c.speed == doctest::Approx(fit_dirac(compute_band_structure({5.0, 1.5625, pi}, 129, 3)).speed).epsilon(0.02));
}
