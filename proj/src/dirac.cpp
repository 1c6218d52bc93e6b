#include "bichro/dirac.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <iomanip>
#include <ostream>
#include <vector>

namespace bichro {
namespace {

constexpr double kMasslessHalfGap = 1e-6;

struct DispersionResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Eigen::VectorXd& k;
  const Eigen::VectorXd& lower;
  const Eigen::VectorXd& upper;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(2 * k.size()); }

  // p = (E_D, mc^2, c)
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const Eigen::Index n = k.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = std::sqrt(p[1] * p[1] + p[2] * p[2] * k[i] * k[i]);
      r[i] = lower[i] - (p[0] - s);
      r[n + i] = upper[i] - (p[0] + s);
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    const Eigen::Index n = k.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = std::max(std::sqrt(p[1] * p[1] + p[2] * p[2] * k[i] * k[i]), 1e-300);
      const double dm = p[1] / s;
      const double dc = p[2] * k[i] * k[i] / s;
      j(i, 0) = -1.0;
      j(i, 1) = dm;
      j(i, 2) = dc;
      j(n + i, 0) = -1.0;
      j(n + i, 1) = -dm;
      j(n + i, 2) = -dc;
    }
    return 0;
  }
};

}  // namespace

DiracParams fit_dirac(const BandStructure& bands, double window) {
  if (bands.n_bands() < 3) throw ConfigError("fit_dirac: bands 1 and 2 are required");
  const auto e = bands.energies();
  return fit_dirac(bands.kappas, e.col(1), e.col(2), window);
}

DiracParams fit_dirac(const Eigen::VectorXd& kappas, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper, double window) {
  if (!(window > 0.0) || window > 0.5) throw ConfigError("fit_dirac: window must lie in (0, 0.5]");
  std::vector<Eigen::Index> idx;
  Eigen::Index zero = -1;
  for (Eigen::Index i = 0; i < kappas.size(); ++i) {
    if (std::abs(kappas[i]) <= window + 1e-12) idx.push_back(i);
    if (std::abs(kappas[i]) < 1e-14) zero = i;
  }
  if (idx.size() < 5) throw ConfigError("fit_dirac: fewer than 5 grid points inside the window");
  if (zero < 0) throw ConfigError("fit_dirac: kappa = 0 must lie on the grid");

  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd k(n), lo(n), up(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = idx[static_cast<std::size_t>(i)];
    k[i] = kappas[j];
    lo[i] = lower[j];
    up[i] = upper[j];
  }

  DiracParams out;
  out.fit_window = window;
  const double half_gap = 0.5 * (upper[zero] - lower[zero]);
  const double mid = 0.5 * (upper[zero] + lower[zero]);

  if (half_gap < kMasslessHalfGap) {
    // mc^2 fixed at zero: E = E_D -+ c|kappa| is linear in (E_D, c)
    Eigen::MatrixXd a(2 * n, 2);
    Eigen::VectorXd b(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = -std::abs(k[i]);
      b[i] = lo[i];
      a(n + i, 0) = 1.0;
      a(n + i, 1) = std::abs(k[i]);
      b[n + i] = up[i];
    }
    const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
    out.offset = sol[0];
    out.mass_energy = 0.0;
    out.speed = std::abs(sol[1]);
    out.fit_residual = std::sqrt((a * sol - b).squaredNorm() / static_cast<double>(2 * n));
  } else {
    // initial slope from the outermost in-window pair on the kappa > 0 side
    Eigen::Index outer = 0, inner = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (k[i] > k[outer]) outer = i;
    for (Eigen::Index i = 0; i < n; ++i)
      if (k[i] < k[outer] && (k[inner] >= k[outer] || k[i] > k[inner])) inner = i;
    double c0 = 0.5 * ((up[outer] - lo[outer]) - (up[inner] - lo[inner])) / (k[outer] - k[inner]);
    if (!(c0 > 0.0)) c0 = 1.0;

    Eigen::VectorXd p(3);
    p << mid, half_gap, c0;
    DispersionResidual functor{k, lo, up};
    Eigen::LevenbergMarquardt<DispersionResidual> lm(functor);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 2000;
    const auto status = lm.minimize(p);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !p.allFinite())
      throw NumericError("fit_dirac: least-squares fit did not converge");
    Eigen::VectorXd r(2 * n);
    functor(p, r);
    out.offset = p[0];
    out.mass_energy = std::abs(p[1]);
    out.speed = std::abs(p[2]);
    out.fit_residual = std::sqrt(r.squaredNorm() / static_cast<double>(2 * n));
  }
  if (!(out.speed > 0.0)) throw NumericError("fit_dirac: fitted speed of light is zero");
  return out;
}

DiracParams local_dirac_params(const LatticeParams& lattice, const PlaneWaveBasis& basis) {
  const auto h = build_hamiltonian(lattice, 0.0, basis);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw NumericError("local_dirac_params: eigensolver failed");
  const Eigen::VectorXd e = es.eigenvalues();
  const Eigen::MatrixXcd& u = es.eigenvectors();
  Eigen::VectorXd dh(basis.size());
  for (Eigen::Index i = 0; i < dh.size(); ++i) dh[i] = 4.0 * basis.index(i);
  const Eigen::MatrixXcd v = u.adjoint() * dh.asDiagonal() * u;
  const auto curvature = [&](Eigen::Index n) {
    double c = 2.0;
    for (Eigen::Index m = 0; m < e.size(); ++m)
      if (m != n) c += 2.0 * std::norm(v(m, n)) / (e[n] - e[m]);
    return c;
  };
  DiracParams p;
  p.fit_window = 0.0;
  p.offset = 0.5 * (e[1] + e[2]);
  p.mass_energy = 0.5 * (e[2] - e[1]);
  if (p.mass_energy < kMasslessHalfGap) {
    // degenerate pair: the splitting comes from dH/dkappa restricted to the pair
    const Eigen::Matrix2cd block = v.block(1, 1, 2, 2);
    const Eigen::Vector2d split = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(block).eigenvalues();
    p.mass_energy = 0.0;
    p.speed = 0.5 * (split[1] - split[0]);
  } else {
    const double c2 = p.mass_energy * (curvature(2) - curvature(1)) / 2.0;
    if (!(c2 > 0.0)) throw NumericError("local_dirac_params: bands do not curve apart");
    p.speed = std::sqrt(c2);
  }
  return p;
}

double gap_consistency(const DiracParams& params, const BandStructure& bands) {
  return std::abs(central_gap(bands) - 2.0 * params.mass_energy);
}

double mixing_angle(const DiracParams& params, double kappa) {
  const double m = params.mass_energy;
  const double ck = params.speed * kappa;
  if (m == 0.0 && kappa == 0.0)
    throw ConfigError("mixing_angle: undefined at a massless Dirac point (kappa = 0)");
  const double e = params.dispersion(kappa);
  // For kappa < 0 use tan(theta) = (E - c kappa)/mc^2, which avoids cancellation in c kappa + E.
  if (kappa >= 0.0) return std::atan2(m, ck + e);
  return std::atan2(e - ck, m);
}

std::pair<BlochState, BlochState> rotate_band_pair(const BlochState& u1, const BlochState& u2,
                                                   double theta) {
  if (std::abs(u1.kappa - u2.kappa) > 1e-14)
    throw ConfigError("rotate_band_pair: states belong to different quasimomenta");
  if (u1.coeffs.size() != u2.coeffs.size())
    throw ConfigError("rotate_band_pair: basis size mismatch");
  const double c = std::cos(theta), s = std::sin(theta);
  BlochState a = u1, b = u2;
  a.coeffs = c * u1.coeffs + s * u2.coeffs;
  b.coeffs = -s * u1.coeffs + c * u2.coeffs;
  a.energy = c * c * u1.energy + s * s * u2.energy;
  b.energy = s * s * u1.energy + c * c * u2.energy;
  return {std::move(a), std::move(b)};
}

void write_fit_report(std::ostream& os, double phi, const DiracParams& p) {
  os << std::setprecision(15) << "phi " << phi << '\n'
     << "mc2 " << p.mass_energy << '\n'
     << "c " << p.speed << '\n'
     << "E_D " << p.offset << '\n'
     << "residual " << p.fit_residual << '\n'
     << "window " << p.fit_window << '\n';
}

}  // namespace bichro
