#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include "bichro/errors.hpp"
#include "bichro/grid.hpp"

namespace bichro {

// Scaled units throughout: x in 1/k0, energies in recoil energies E_R, time in hbar/E_R.
// hbar = 1, M = 1/2, lattice period d = pi, Brillouin zone kappa in [-1, 1].

/// Bichromatic potential (v1/2) cos(2x) + (v2/2) cos(4x + phi).
struct LatticeParams {
  double v1 = 0.0;
  double v2 = 0.0;
  double phi = 0.0;  ///< reduced to [0, 2pi)

  LatticeParams() = default;
  LatticeParams(double v1_, double v2_, double phi_) : v1(v1_), v2(v2_), phi(reduce_phase(phi_)) {
    if (!std::isfinite(v1_) || !std::isfinite(v2_) || !std::isfinite(phi_))
      throw ConfigError("LatticeParams: non-finite parameter");
    if (v1_ < 0.0 || v2_ < 0.0) throw ConfigError("LatticeParams: depths must be non-negative");
  }

  static double reduce_phase(double p) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(p, two_pi);
    if (r < 0.0) r += two_pi;
    return r >= two_pi ? 0.0 : r;
  }

  double potential(double x) const {
    return 0.5 * v1 * std::cos(2.0 * x) + 0.5 * v2 * std::cos(4.0 * x + phi);
  }

  std::string describe() const;
};

/// Plane waves exp(i(kappa + 2n)x) for n in [-cutoff, cutoff].
struct PlaneWaveBasis {
  int cutoff = 16;

  PlaneWaveBasis() = default;
  explicit PlaneWaveBasis(int c) : cutoff(c) {
    if (c < 4) throw ConfigError("PlaneWaveBasis: cutoff must be >= 4");
  }
  Eigen::Index size() const { return 2 * cutoff + 1; }
  /// Reciprocal-lattice index n of basis position i.
  int index(Eigen::Index i) const { return static_cast<int>(i) - cutoff; }
};

struct BlochState {
  int band = 0;
  double kappa = 0.0;
  double energy = 0.0;
  Eigen::VectorXcd coeffs;  ///< unit 2-norm, ordered n = -cutoff..cutoff
};

/// Bands on a uniform kappa grid over [-1, 1] that contains kappa = 0 and both zone edges.
struct BandStructure {
  LatticeParams params;
  PlaneWaveBasis basis;
  Eigen::VectorXd kappas;
  std::vector<std::vector<BlochState>> bands;  ///< bands[alpha][kappa index]

  int n_bands() const { return static_cast<int>(bands.size()); }
  Eigen::Index n_kappas() const { return kappas.size(); }
  Eigen::Index center_index() const { return kappas.size() / 2; }
  double energy(int alpha, Eigen::Index k) const {
    return bands[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(k)].energy;
  }
  const BlochState& state(int alpha, Eigen::Index k) const {
    return bands[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(k)];
  }
  /// Energies as an (n_kappas x n_bands) table.
  Eigen::MatrixXd energies() const;
};

/// Hermitian plane-wave matrix of the lattice Hamiltonian at quasimomentum `kappa`.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> build_hamiltonian(
    const LatticeParams& params, Scalar kappa, const PlaneWaveBasis& basis) {
  using Complex = std::complex<Scalar>;
  using std::abs;
  if (!std::isfinite(static_cast<double>(kappa)) || !std::isfinite(params.v1) ||
      !std::isfinite(params.v2) || !std::isfinite(params.phi))
    throw ConfigError("build_hamiltonian: non-finite input");
  if (abs(kappa) > Scalar(1) + Scalar(1e-12))
    throw ConfigError("build_hamiltonian: |kappa| must not exceed 1");

  const Eigen::Index n = basis.size();
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> h =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  const Scalar first = Scalar(params.v1) / Scalar(4);
  // cos(4x + phi) raises the plane-wave index by 2 with weight e^{+i phi}.
  const Complex second = std::polar(Scalar(params.v2) / Scalar(4), Scalar(params.phi));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar k = kappa + Scalar(2 * basis.index(i));
    h(i, i) = Complex(k * k, Scalar(0));
    if (i + 1 < n) {
      h(i + 1, i) = Complex(first, Scalar(0));
      h(i, i + 1) = Complex(first, Scalar(0));
    }
    if (i + 2 < n) {
      h(i + 2, i) = second;
      h(i, i + 2) = std::conj(second);
    }
  }
  return h;
}

/// Lowest `n_bands` eigenpairs at `kappa`, ascending in energy. Eigenvector phases are not fixed.
std::vector<BlochState> solve_bloch(const LatticeParams& params, double kappa,
                                    const PlaneWaveBasis& basis, int n_bands);

/// Diagonalizes on `n_kappas` (odd, >= 33) uniformly spaced points covering [-1, 1].
BandStructure compute_band_structure(const LatticeParams& params, int n_kappas, int n_bands,
                                     const PlaneWaveBasis& basis = PlaneWaveBasis{});

/// Perturbative estimate |(v1/4)^2 + v2 e^{i phi}| of the band-1/band-2 gap at kappa = 0.
double approximate_gap(const LatticeParams& params);

/// Energy difference E_2(0) - E_1(0) read from the grid.
double central_gap(const BandStructure& bands);

/// Samples psi(x) = sum_n c_n exp(i(kappa + 2n)x) on `grid`. Throws if plane waves beyond the
/// grid's Nyquist wavenumber carry weight above 1e-12.
Eigen::VectorXcd bloch_to_grid(const BlochState& state, const SpatialGrid& grid);

/// CSV with header `kappa,E0,...` and energies at 15 significant digits.
void write_band_csv(std::ostream& os, const BandStructure& bands);

/// One block per (alpha, kappa): `# band <a> kappa <k> energy <E>` followed by lines `n re im`.
void write_eigenvectors(std::ostream& os, const BandStructure& bands);

}  // namespace bichro
