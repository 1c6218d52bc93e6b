#include "bichro/slater.hpp"

#include <numbers>
#include <sstream>

#include "bichro/spectral.hpp"

namespace bichro {
namespace {

using cd = std::complex<double>;

Eigen::Index signed_index(Eigen::Index q, Eigen::Index n) { return q < (n + 1) / 2 ? q : q - n; }

}  // namespace

BandOperator identity_operator(int components) {
  if (components < 1) throw ConfigError("identity_operator: need at least one component");
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(components, components);
  return {"identity", components, [id](double) { return id; }, {id}};
}

BandOperator band_energy_operator(const BandStructure& bands, int alpha, int order) {
  if (alpha < 0 || alpha >= bands.n_bands()) throw ConfigError("band_energy_operator: band out of range");
  if (order < 0) throw ConfigError("band_energy_operator: negative order");
  // Distinct zone points: drop kappa = +1, the image of -1.
  const Eigen::Index nk = bands.n_kappas() - 1;
  Eigen::VectorXd e(nk);
  for (Eigen::Index j = 0; j < nk; ++j) e[j] = bands.energy(alpha, j);

  std::vector<Eigen::MatrixXcd> taylor;
  double factorial = 1.0;
  // Hopping amplitudes t_s; for even nk the Nyquist term is split between s = -nk/2 and +nk/2.
  const Eigen::Index smax = nk / 2;
  std::vector<cd> hop(static_cast<std::size_t>(2 * smax + 1));
  for (Eigen::Index s = -smax; s <= smax; ++s) {
    cd t = 0.0;
    for (Eigen::Index j = 0; j < nk; ++j) t += e[j] * std::polar(1.0, -bands.kappas[j] * s * kPeriod);
    t /= static_cast<double>(nk);
    if (nk % 2 == 0 && std::abs(s) == smax) t *= 0.5;
    hop[static_cast<std::size_t>(s + smax)] = t;
  }
  for (int k = 0; k <= order; ++k) {
    if (k > 0) factorial *= k;
    cd sum = 0.0;
    // pair +s and -s so odd orders cancel exactly for even bands
    for (Eigen::Index s = smax; s >= 1; --s)
      sum += hop[static_cast<std::size_t>(smax + s)] * std::pow(cd(0.0, s * kPeriod), k) +
             hop[static_cast<std::size_t>(smax - s)] * std::pow(cd(0.0, -s * kPeriod), k);
    if (k == 0) sum += hop[static_cast<std::size_t>(smax)];
    taylor.push_back(Eigen::MatrixXcd::Constant(1, 1, cd(sum.real() / factorial, 0.0)));
  }
  const LatticeParams params = bands.params;
  const PlaneWaveBasis basis = bands.basis;
  auto exact = [params, basis, alpha](double kappa) {
    const auto s = solve_bloch(params, kappa, basis, alpha + 1);
    return Eigen::MatrixXcd::Constant(1, 1, cd(s.back().energy, 0.0)).eval();
  };
  std::ostringstream name;
  name << "band" << alpha << "-energy";
  return {name.str(), 1, exact, taylor};
}

BandOperator rotated_two_band_operator(const LatticeParams& params, const PlaneWaveBasis& basis,
                                       const DiracParams& dirac) {
  auto exact = [params, basis, dirac](double kappa) {
    const auto s = solve_bloch(params, kappa, basis, 3);
    const double t = mixing_angle(dirac, kappa);
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const Eigen::Matrix2d d = Eigen::Vector2d(s[2].energy, s[1].energy).asDiagonal();
    return Eigen::MatrixXcd((r * d * r.transpose()).cast<cd>());
  };
  Eigen::MatrixXcd t0(2, 2), t1(2, 2);
  t0 << dirac.offset, dirac.mass_energy, dirac.mass_energy, dirac.offset;
  t1 << dirac.speed, 0.0, 0.0, -dirac.speed;
  return {"rotated-two-band", 2, exact, {t0, t1}};
}

Envelope gaussian_envelope(double sigma, double kappa, double x0) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_envelope: sigma must be positive");
  return [=](double x) {
    const double y = x - x0;
    return std::exp(-y * y / (4.0 * sigma * sigma)) * std::polar(1.0, kappa * x);
  };
}

double slater_oracle(const BandOperator& op, const std::vector<Envelope>& envelopes,
                     const SlaterOptions& options) {
  const int nc = op.components;
  if (static_cast<int>(envelopes.size()) != nc) throw ConfigError("slater_oracle: one envelope per component required");
  if (options.n_sites < 16 || options.oversampling < 1) throw ConfigError("slater_oracle: invalid options");
  const Eigen::Index n = options.n_sites;
  const Eigen::Index m = n * options.oversampling;
  const double fine_dx = kPeriod / options.oversampling;

  Fft site_fft(n), fine_fft(m);
  Eigen::MatrixXcd site_spec(nc, n), rhs_sites(nc, n), lhs_sites(nc, n);

  for (int a = 0; a < nc; ++a) {
    Eigen::VectorXcd sites(n), fine(m);
    for (Eigen::Index i = 0; i < n; ++i) sites[i] = envelopes[static_cast<std::size_t>(a)]((i - n / 2) * kPeriod);
    for (Eigen::Index i = 0; i < m; ++i) fine[i] = envelopes[static_cast<std::size_t>(a)]((i - m / 2) * fine_dx);
    site_spec.row(a) = site_fft.forward(sites).transpose();

    // Effective operator on the continuum: multiply mode p by the polynomial coefficients.
    const Eigen::VectorXcd spec = fine_fft.forward(fine);
    double outside = 0.0;
    for (Eigen::Index q = 0; q < m; ++q) {
      const double p = 2.0 * std::numbers::pi * signed_index(q, m) / (m * fine_dx);
      if (std::abs(p) >= 1.0) outside = std::max(outside, std::abs(spec[q]));
    }
    if (outside > options.alias_tolerance * spec.cwiseAbs().maxCoeff()) {
      std::ostringstream os;
      os << "slater_oracle: envelope " << a << " not band-limited (relative amplitude " << outside / spec.cwiseAbs().maxCoeff() << " beyond |p| = 1)";
      throw ConfigError(os.str());
    }
  }

  for (int b = 0; b < nc; ++b) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(m);
    for (int a = 0; a < nc; ++a) {
      Eigen::VectorXcd fine(m);
      for (Eigen::Index i = 0; i < m; ++i) fine[i] = envelopes[static_cast<std::size_t>(a)]((i - m / 2) * fine_dx);
      const Eigen::VectorXcd spec = fine_fft.forward(fine);
      for (Eigen::Index q = 0; q < m; ++q) {
        const double p = 2.0 * std::numbers::pi * signed_index(q, m) / (m * fine_dx);
        cd poly = 0.0;
        for (std::size_t k = op.taylor.size(); k-- > 0;) poly = poly * p + op.taylor[k](b, a);
        out[q] += poly * spec[q];
      }
    }
    const Eigen::VectorXcd cont = fine_fft.inverse(out);
    for (Eigen::Index i = 0; i < n; ++i) rhs_sites(b, i) = cont[i * options.oversampling];
  }

  // Exact action: Bloch amplitude of band alpha at kappa_q is the lattice transform of the
  // site coefficients; O(kappa) acts pointwise in kappa.
  Eigen::MatrixXcd out_spec(nc, n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const double kappa = 2.0 * signed_index(q, n) / static_cast<double>(n);
    out_spec.col(q) = op.exact(kappa) * site_spec.col(q);
  }
  for (int b = 0; b < nc; ++b) lhs_sites.row(b) = site_fft.inverse(out_spec.row(b).transpose()).transpose();

  const double scale = lhs_sites.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw NumericError("slater_oracle: exact action vanishes");
  return (lhs_sites - rhs_sites).cwiseAbs().maxCoeff() / scale;
}

}  // namespace bichro
