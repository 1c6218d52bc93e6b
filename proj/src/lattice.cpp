#include "bichro/lattice.hpp"

#include <Eigen/Eigenvalues>

#include <iomanip>
#include <ostream>
#include <sstream>

namespace bichro {

std::string LatticeParams::describe() const {
  std::ostringstream os;
  os << std::setprecision(15) << "V1=" << v1 << " V2=" << v2 << " phi=" << phi;
  return os.str();
}

Eigen::MatrixXd BandStructure::energies() const {
  Eigen::MatrixXd e(n_kappas(), n_bands());
  for (int a = 0; a < n_bands(); ++a)
    for (Eigen::Index k = 0; k < n_kappas(); ++k) e(k, a) = energy(a, k);
  return e;
}

std::vector<BlochState> solve_bloch(const LatticeParams& params, double kappa,
                                    const PlaneWaveBasis& basis, int n_bands) {
  if (n_bands < 1 || n_bands > basis.size())
    throw ConfigError("solve_bloch: n_bands must lie in [1, 2*cutoff+1]");
  const Eigen::MatrixXcd h = build_hamiltonian(params, kappa, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "solve_bloch: eigensolver did not converge at kappa=" << kappa << " ("
       << params.describe() << ")";
    throw NumericError(os.str());
  }
  std::vector<BlochState> out;
  out.reserve(static_cast<std::size_t>(n_bands));
  for (int a = 0; a < n_bands; ++a) {
    BlochState s;
    s.band = a;
    s.kappa = kappa;
    s.energy = solver.eigenvalues()[a];
    s.coeffs = solver.eigenvectors().col(a).normalized();
    out.push_back(std::move(s));
  }
  return out;
}

BandStructure compute_band_structure(const LatticeParams& params, int n_kappas, int n_bands,
                                     const PlaneWaveBasis& basis) {
  if (n_kappas < 33 || n_kappas % 2 == 0)
    throw ConfigError("compute_band_structure: n_kappas must be odd and >= 33");
  BandStructure bs;
  bs.params = params;
  bs.basis = basis;
  bs.kappas.resize(n_kappas);
  const int half = n_kappas / 2;
  for (int j = 0; j < n_kappas; ++j)
    bs.kappas[j] = static_cast<double>(j - half) / static_cast<double>(half);
  bs.bands.assign(static_cast<std::size_t>(n_bands), {});
  for (auto& b : bs.bands) b.reserve(static_cast<std::size_t>(n_kappas));
  for (int j = 0; j < n_kappas; ++j) {
    auto states = solve_bloch(params, bs.kappas[j], basis, n_bands);
    for (int a = 0; a < n_bands; ++a)
      bs.bands[static_cast<std::size_t>(a)].push_back(std::move(states[static_cast<std::size_t>(a)]));
  }
  return bs;
}

double approximate_gap(const LatticeParams& params) {
  const std::complex<double> z =
      (params.v1 / 4.0) * (params.v1 / 4.0) + std::polar(params.v2, params.phi);
  return std::abs(z);
}

double central_gap(const BandStructure& bands) {
  if (bands.n_bands() < 3) throw ConfigError("central_gap: bands 1 and 2 are required");
  const auto c = bands.center_index();
  return bands.energy(2, c) - bands.energy(1, c);
}

Eigen::VectorXcd bloch_to_grid(const BlochState& state, const SpatialGrid& grid) {
  const int cutoff = static_cast<int>(state.coeffs.size() / 2);
  const double nyquist = std::numbers::pi / grid.dx();
  double aliased = 0.0;
  for (Eigen::Index i = 0; i < state.coeffs.size(); ++i)
    if (std::abs(state.kappa + 2.0 * (static_cast<double>(i) - cutoff)) > nyquist * (1.0 + 1e-12))
      aliased += std::norm(state.coeffs[i]);
  if (aliased > 1e-12) throw ConfigError("bloch_to_grid: grid too coarse for the Bloch state");
  Eigen::VectorXcd out(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    // e^{i(kappa+2n)x} = e^{i(kappa-2c)x} * (e^{2ix})^{n+c}, evaluated by Horner's rule
    const std::complex<double> step = std::polar(1.0, 2.0 * x);
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = state.coeffs.size() - 1; i >= 0; --i) acc = acc * step + state.coeffs[i];
    out[j] = acc * std::polar(1.0, (state.kappa - 2.0 * cutoff) * x);
  }
  return out;
}

void write_band_csv(std::ostream& os, const BandStructure& bands) {
  os << "kappa";
  for (int a = 0; a < bands.n_bands(); ++a) os << ",E" << a;
  os << '\n' << std::setprecision(15);
  for (Eigen::Index k = 0; k < bands.n_kappas(); ++k) {
    os << bands.kappas[k];
    for (int a = 0; a < bands.n_bands(); ++a) os << ',' << bands.energy(a, k);
    os << '\n';
  }
}

void write_eigenvectors(std::ostream& os, const BandStructure& bands) {
  os << std::setprecision(15);
  for (int a = 0; a < bands.n_bands(); ++a)
    for (Eigen::Index k = 0; k < bands.n_kappas(); ++k) {
      const auto& s = bands.state(a, k);
      os << "# band " << a << " kappa " << s.kappa << " energy " << s.energy << '\n';
      for (Eigen::Index i = 0; i < s.coeffs.size(); ++i)
        os << bands.basis.index(i) << ' ' << s.coeffs[i].real() << ' ' << s.coeffs[i].imag() << '\n';
    }
}

}  // namespace bichro
