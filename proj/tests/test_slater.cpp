#include <doctest.h>

#include <numbers>

#include "bichro/slater.hpp"
#include "bichro/spectral.hpp"
#include "bichro/wannier.hpp"

using namespace bichro;
constexpr double pi = std::numbers::pi;

namespace {

const BandStructure& bands0() {
  static const BandStructure b = compute_band_structure({5.0, 1.56, 0.0}, 129, 4);
  return b;
}

}  // namespace

TEST_CASE("identity operator is reproduced exactly") {
  for (double sigma : {8.0, 17.0})
    CHECK(slater_oracle(identity_operator(), {gaussian_envelope(sigma, 0.1)}) < 1e-12);
  CHECK(slater_oracle(identity_operator(2), {gaussian_envelope(17.0), gaussian_envelope(9.0, -0.2)}) < 1e-12);
}

TEST_CASE("band-energy Taylor coefficients match the finite-difference oracle") {
  const BandOperator op = band_energy_operator(bands0(), 0, 4);
  CHECK(std::abs(op.taylor[0](0, 0).real() - (-0.6245221524)) < 2e-6);
  CHECK(std::abs(op.taylor[1](0, 0)) < 1e-10);
  CHECK(std::abs(op.taylor[2](0, 0).real() - 1.1556686044 / 2.0) < 1e-4);
  CHECK(std::abs(op.exact(0.0)(0, 0).real() - (-0.6245221524)) < 2e-6);
}

TEST_CASE("effective band-0 Hamiltonian on a sigma = 17 envelope") {
  const BandOperator op = band_energy_operator(bands0(), 0);
  std::vector<double> d;
  for (double sigma : {8.0, 17.0, 34.0}) d.push_back(slater_oracle(op, {gaussian_envelope(sigma)}));
  CHECK(d[1] < 1e-4);
  CHECK(d[0] > d[1]);
  CHECK(d[1] > d[2]);
}

TEST_CASE("hopping from Wannier functions equals the band Fourier coefficient") {
  // <w_{0,1}|H|w_{0,0}> evaluated spectrally on the supercell
  const auto band = fix_gauge(bands0(), 0);
  const SpatialGrid g = supercell_grid(band, 0, 32);
  const auto w0 = build_wannier(band, 0, g);
  const auto w1 = build_wannier(band, 1, g);
  Fft fft(g.size());
  Eigen::VectorXcd spec = fft.forward(w0.samples);
  spec.array() *= g.wavenumbers().array().square();
  Eigen::VectorXcd hw = fft.inverse(spec);
  const LatticeParams p = bands0().params;
  for (Eigen::Index i = 0; i < hw.size(); ++i) hw[i] += p.potential(g.x(i)) * w0.samples[i];
  const std::complex<double> t1 = w1.samples.dot(hw) * g.dx();

  const Eigen::Index nk = bands0().n_kappas() - 1;
  std::complex<double> fourier = 0.0;
  for (Eigen::Index j = 0; j < nk; ++j)
    fourier += bands0().energy(0, j) * std::polar(1.0, bands0().kappas[j] * kPeriod);
  fourier /= static_cast<double>(nk);
  CHECK(std::abs(t1 - fourier) < 1e-8);
}

TEST_CASE("rotated two-band operator against the effective Dirac matrix") {
  const LatticeParams p(5.0, 1.56, 0.0);
  const DiracParams d = local_dirac_params(p);
  const BandOperator op = rotated_two_band_operator(p, PlaneWaveBasis{}, d);
  const Eigen::MatrixXcd at0 = op.exact(0.0);
  CHECK(std::abs(at0(0, 1).real() - 0.5 * (4.8454468681 - 3.4829598865)) < 2e-6);
  const double disc = slater_oracle(op, {gaussian_envelope(17.0), gaussian_envelope(17.0)});
  CHECK(disc < 1e-3);
}

TEST_CASE("envelopes outside the first zone are rejected") {
  CHECK_THROWS_AS(slater_oracle(identity_operator(), {gaussian_envelope(0.7)}), ConfigError);
  CHECK_THROWS_AS(slater_oracle(identity_operator(), {gaussian_envelope(17.0, 1.2)}), ConfigError);
  CHECK_THROWS_AS(slater_oracle(identity_operator(2), {gaussian_envelope(17.0)}), ConfigError);
}
