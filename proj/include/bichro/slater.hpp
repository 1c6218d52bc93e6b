#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "bichro/dirac.hpp"
#include "bichro/lattice.hpp"

namespace bichro {

/// Operator diagonal in kappa acting on a set of bands (or rotated band pairs).
struct BandOperator {
  std::string name;
  int components = 1;
  /// O(kappa) as a components x components matrix, exact for any |kappa| <= 1.
  std::function<Eigen::MatrixXcd(double)> exact;
  /// O(kappa) ~ sum_k taylor[k] kappa^k; the effective operator is sum_k taylor[k] p^k.
  std::vector<Eigen::MatrixXcd> taylor;
};

BandOperator identity_operator(int components = 1);

/// E_alpha(kappa) of the lattice Hamiltonian. Taylor coefficients at kappa = 0 up to `order`
/// come from the Fourier series of the band sampled on `bands.kappas`.
BandOperator band_energy_operator(const BandStructure& bands, int alpha, int order = 2);

/// Bands 1 and 2 in the basis rotated by the fitted mixing angle theta(kappa):
/// R(theta) diag(E_2, E_1) R(theta)^T, against the effective matrix
/// [[E_D + c p, mc^2], [mc^2, E_D - c p]].
BandOperator rotated_two_band_operator(const LatticeParams& params, const PlaneWaveBasis& basis,
                                       const DiracParams& dirac);

using Envelope = std::function<std::complex<double>(double)>;

/// exp(-(x - x0)^2 / (4 sigma^2)) exp(i kappa x)
Envelope gaussian_envelope(double sigma, double kappa = 0.0, double x0 = 0.0);

struct SlaterOptions {
  int n_sites = 512;           ///< sites x_n = n d, n in [-n_sites/2, n_sites/2)
  int oversampling = 8;        ///< continuum points per site for the effective operator
  double alias_tolerance = 1e-12;  ///< allowed envelope amplitude beyond the first zone
};

/// Relative sup-norm discrepancy between the exact Bloch-space action of `op` on
/// Psi = sum_{alpha,n} psi_alpha(x_n) w_{alpha,n} and the effective operator sum_k T_k p^k
/// applied to the continuous envelopes, compared on the sites.
/// Throws ConfigError when an envelope is not band-limited to the first zone.
double slater_oracle(const BandOperator& op, const std::vector<Envelope>& envelopes,
                     const SlaterOptions& options = {});

}  // namespace bichro
