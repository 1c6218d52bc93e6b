#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <iosfwd>
#include <numbers>
#include <utility>

#include "bichro/lattice.hpp"

namespace bichro {

/// Relativistic dispersion E_D +- sqrt(m^2c^4 + c^2 kappa^2) fitted to bands 1 and 2.
struct DiracParams {
  double mass_energy = 0.0;  ///< mc^2 [E_R]
  double speed = 1.0;        ///< c [E_R / k0]
  double offset = 0.0;       ///< E_D [E_R]
  double fit_window = 0.3;
  double fit_residual = 0.0;  ///< RMS misfit over both bands [E_R]

  static constexpr double kResidualFlag = 0.05;
  bool flagged() const { return fit_residual > kResidualFlag; }

  double dispersion(double kappa) const {
    return std::sqrt(mass_energy * mass_energy + speed * speed * kappa * kappa);
  }
  /// Group velocity of the upper branch.
  double group_velocity(double kappa) const {
    const double e = dispersion(kappa);
    return e > 0.0 ? speed * speed * kappa / e : speed * (kappa >= 0 ? 1.0 : -1.0);
  }
};

inline constexpr double kDefaultFitWindow = 0.3;

/// Least-squares fit of (E_D, mc^2, c) over |kappa| <= window using bands 1 and 2 together.
DiracParams fit_dirac(const BandStructure& bands, double window = kDefaultFitWindow);

/// Same fit on raw data: `lower`/`upper` are band energies at `kappas` (must include kappa = 0).
DiracParams fit_dirac(const Eigen::VectorXd& kappas, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper, double window = kDefaultFitWindow);

/// Parameters from the bands at kappa = 0 alone: E_D the midpoint, mc^2 the half gap, and
/// c^2 = mc^2 (E_2'' - E_1'')/2 with the curvatures from second-order perturbation theory.
/// Below a half gap of 1e-6, c is half the splitting of dH/dkappa within the degenerate pair.
DiracParams local_dirac_params(const LatticeParams& lattice, const PlaneWaveBasis& basis = PlaneWaveBasis{});

/// |(E_2(0) - E_1(0)) - 2 mc^2|
double gap_consistency(const DiracParams& params, const BandStructure& bands);

/// Mixing angle with tan(theta) = mc^2 / (c kappa + sqrt(m^2c^4 + c^2 kappa^2)).
/// At m = 0 the angle jumps from pi/2 (kappa < 0) to 0 (kappa > 0); kappa = 0 is undefined there.
double mixing_angle(const DiracParams& params, double kappa);

/// (cos t u1 + sin t u2, -sin t u1 + cos t u2). Energies of the outputs are expectation values.
std::pair<BlochState, BlochState> rotate_band_pair(const BlochState& u1, const BlochState& u2,
                                                   double theta);

/// [[E_D + c kappa, mc^2], [mc^2, E_D - c kappa]]
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> h0_matrix(const DiracParams& p, Scalar kappa) {
  Eigen::Matrix<Scalar, 2, 2> h;
  const Scalar ck = Scalar(p.speed) * kappa;
  h << Scalar(p.offset) + ck, Scalar(p.mass_energy), Scalar(p.mass_energy), Scalar(p.offset) - ck;
  return h;
}

/// U = (1/sqrt 2) [[1, -1], [1, 1]]
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> spinor_rotation_matrix() {
  Eigen::Matrix<Scalar, 2, 2> u;
  u << Scalar(1), Scalar(-1), Scalar(1), Scalar(1);
  return u / std::sqrt(Scalar(2));
}

inline Eigen::Vector2cd spinor_rotation(const Eigen::Vector2cd& spinor) {
  return spinor_rotation_matrix<std::complex<double>>() * spinor;
}

/// U H U^dagger: maps the rotated-band Hamiltonian onto the standard Dirac form.
template <typename Derived>
auto to_dirac_form(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  const auto u = spinor_rotation_matrix<Scalar>();
  return (u * h * u.adjoint()).eval();
}

/// Key-value block: phi, mc2, c, E_D, residual, window.
void write_fit_report(std::ostream& os, double phi, const DiracParams& p);

}  // namespace bichro
