#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "bichro/dirac.hpp"
#include "bichro/grid.hpp"
#include "bichro/lattice.hpp"
#include "bichro/spectral.hpp"
#include "bichro/wannier.hpp"

namespace bichro {

/// Scalar Schrödinger wavefunction (one component) or Dirac spinor (psi_1, psi_2).
struct WaveState {
  SpatialGrid grid;
  std::vector<Eigen::VectorXcd> components;
  double time = 0.0;

  static WaveState scalar(SpatialGrid g, Eigen::VectorXcd psi) {
    return {std::move(g), {std::move(psi)}, 0.0};
  }
  static WaveState spinor(SpatialGrid g, Eigen::VectorXcd psi1, Eigen::VectorXcd psi2) {
    return {std::move(g), {std::move(psi1), std::move(psi2)}, 0.0};
  }

  bool is_spinor() const { return components.size() == 2; }
  /// Total |psi|^2 summed over components.
  Eigen::VectorXd density() const;
  /// Squared norm: integral of density().
  double norm_squared() const { return density().sum() * grid.dx(); }
  double norm() const { return std::sqrt(norm_squared()); }
  /// Largest pointwise difference over all components.
  double sup_distance(const WaveState& other) const;
};

/// Slowly varying external potential.
struct SlowPotential {
  enum class Kind { DipolePlusTilt, Linear, Custom };
  Kind kind = Kind::DipolePlusTilt;
  double v0 = 0.0;  ///< trap depth [E_R]
  double w0 = 1.0;  ///< trap waist [1/k0]
  double f = 0.0;   ///< tilt [E_R k0]
  Eigen::VectorXd samples;  ///< Custom only, on the propagation grid

  static SlowPotential none() { return linear(0.0); }
  static SlowPotential dipole_plus_tilt(double v0, double w0, double f) {
    return {Kind::DipolePlusTilt, v0, w0, f, {}};
  }
  /// V(x) = -f x
  static SlowPotential linear(double f) { return {Kind::Linear, 0.0, 1.0, f, {}}; }
  static SlowPotential custom(Eigen::VectorXd s) { return {Kind::Custom, 0.0, 1.0, 0.0, std::move(s)}; }

  /// -v0 exp(-2x^2/w0^2) - f x
  double operator()(double x) const;
  Eigen::VectorXd sample(const SpatialGrid& grid) const;
  /// Outer local maximum of the trap-plus-tilt potential on the x > 0 side.
  double barrier_position() const;
};

struct WavePacketSpec {
  int band = 2;
  double kappa0 = 0.95;
  double sigma = 17.0;  ///< Gaussian envelope width [1/k0]
  double x0 = 0.0;
};

/// N exp(-(x-x0)^2/(4 sigma^2)) u_{band,kappa0}(x), normalised. Uses `bands.params` and
/// `bands.basis` to solve the Bloch problem at kappa0. Rejects packets touching the box edge
/// and packets whose population in `band` is below 0.95.
WaveState prepare_bloch_packet(const WavePacketSpec& spec, const BandStructure& bands,
                               const SpatialGrid& grid);

/// Fraction of |psi|^2 in each of the lowest `n_bands` bands (scalar states, box length a
/// whole number of periods).
Eigen::VectorXd band_populations(const WaveState& state, const LatticeParams& params,
                                 const PlaneWaveBasis& basis, int n_bands);

/// Expectation of the full lattice Hamiltonian plus `slow` for a scalar state.
double energy_expectation(const WaveState& state, const LatticeParams& params,
                          const SlowPotential& slow);

/// Norm drift tolerated per 1000 steps before a propagator aborts.
inline constexpr double kMaxNormDrift = 1e-6;

using Observer = std::function<void(const WaveState&)>;

/// Strang-split spectral propagator for -d^2/dx^2 + lattice + slow potential on a periodic box.
class SchrodingerPropagator {
 public:
  SchrodingerPropagator(const SpatialGrid& grid, const LatticeParams& lattice,
                        const SlowPotential& slow, double dt);

  double dt() const { return dt_; }
  void step(WaveState& state);
  /// Advances `n_steps`; calls `observer` on the initial state and every `stride` steps.
  void run(WaveState& state, long n_steps, long stride = 0, const Observer& observer = {});

 private:
  SpatialGrid grid_;
  double dt_;
  Eigen::VectorXcd half_potential_;
  Eigen::VectorXcd kinetic_;
  Fft fft_;
  Eigen::VectorXcd work_;
};

/// Split-step propagator for i d/dt (psi1, psi2) = [[V + c p, mc^2], [mc^2, V - c p]] (psi1, psi2).
class DiracPropagator {
 public:
  DiracPropagator(const SpatialGrid& grid, const DiracParams& dirac, const SlowPotential& slow,
                  double dt);

  double dt() const { return dt_; }
  void step(WaveState& state);
  void run(WaveState& state, long n_steps, long stride = 0, const Observer& observer = {});

 private:
  void half_potential(WaveState& state) const;

  SpatialGrid grid_;
  double dt_;
  Eigen::VectorXcd phase_;  ///< exp(-i dt V / 2)
  double mass_cos_;
  double mass_sin_;
  Eigen::VectorXcd kinetic_plus_;
  Eigen::VectorXcd kinetic_minus_;
  Fft fft_;
  Eigen::VectorXcd work_;
};

/// Site amplitudes psi_{alpha,n} = <w_{alpha,n} | Psi>, one row per band, for sites whose
/// home-cell window lies inside the state grid. `home` are site-0 Wannier functions sampled
/// with the state's grid spacing and aligned to its points.
struct CoarseGrained {
  std::vector<int> bands;
  int first_site = 0;
  Eigen::MatrixXcd amplitudes;  ///< (bands x sites)

  double total_weight() const { return amplitudes.squaredNorm(); }
  Eigen::VectorXd site_positions() const;
};
CoarseGrained coarse_grain(const WaveState& state, const std::vector<WannierFunction>& home);

/// Continuum envelopes of a scalar state projected on bands 1 and 2 (lower, upper), obtained
/// in the Bloch representation. Each band's eigenvectors are phased to overlap positively with
/// the eigenvector at `kappa_ref`. Modes are unfolded to kappa in [kappa_ref - 1, kappa_ref + 1),
/// i.e. band-limited interpolation of the site amplitudes around the reference momentum.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> band_envelopes(const WaveState& state,
                                                             const LatticeParams& params,
                                                             const PlaneWaveBasis& basis,
                                                             double kappa_ref);

/// Dirac spinor for a scalar packet: band envelopes rotated with the mixing angle at kappa0,
/// psi = A_upper (cos t, sin t) + A_lower (-sin t, cos t).
WaveState dirac_initial_state(const WaveState& schrodinger, const LatticeParams& params,
                              const PlaneWaveBasis& basis, const DiracParams& dirac,
                              double kappa0);

struct Observables {
  double time = 0.0;
  double norm = 0.0;  ///< squared norm
  double center = 0.0;
  double width = 0.0;
  double transmitted = 0.0;  ///< fraction of norm beyond x_cut
  Eigen::VectorXd populations;  ///< empty unless bands were supplied
};

Observables observables(const WaveState& state, double x_cut);
Observables observables(const WaveState& state, double x_cut, const LatticeParams& params,
                        const PlaneWaveBasis& basis, int n_bands);

/// Density within `margin` of either box edge relative to the peak density.
double edge_density_ratio(const WaveState& state, double margin);

}  // namespace bichro
