#include "bichro/wannier.hpp"

#include <algorithm>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace bichro {
namespace {

// Coefficients of u_{kappa+2} expressed in the basis at kappa: index n -> n+1.
Eigen::VectorXcd shift_to_next_zone(const Eigen::VectorXcd& c) {
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(c.size());
  s.head(c.size() - 1) = c.tail(c.size() - 1);
  return s;
}

[[noreturn]] void degenerate(int alpha, double kappa, const char* why) {
  std::ostringstream os;
  os << "fix_gauge: band " << alpha << " is degenerate at kappa=" << kappa << " (" << why << ")";
  throw DegenerateBandError(os.str(), kappa);
}

}  // namespace

GaugeFixedBand fix_gauge(const BandStructure& bands, int alpha) {
  if (bands.n_kappas() < 129) throw ConfigError("fix_gauge: need at least 129 kappa points");
  if (alpha < 0 || alpha + 1 >= bands.n_bands())
    throw ConfigError("fix_gauge: band index must leave one band above it in the structure");
  const Eigen::Index n = bands.n_kappas() - 1;

  for (Eigen::Index j = 0; j <= n; ++j) {
    const double e = bands.energy(alpha, j);
    if (bands.energy(alpha + 1, j) - e < kMinBandGap)
      degenerate(alpha, bands.kappas[j], "gap to the band above");
    if (alpha > 0 && e - bands.energy(alpha - 1, j) < kMinBandGap)
      degenerate(alpha, bands.kappas[j], "gap to the band below");
  }

  GaugeFixedBand out;
  out.band = alpha;
  out.basis = bands.basis;
  out.kappas = bands.kappas.head(n);
  out.coeffs.reserve(static_cast<std::size_t>(n));
  out.coeffs.push_back(bands.state(alpha, 0).coeffs);
  for (Eigen::Index j = 1; j < n; ++j) {
    Eigen::VectorXcd c = bands.state(alpha, j).coeffs;
    const std::complex<double> o = out.coeffs.back().dot(c);
    if (std::abs(o) < kMinTransportOverlap)
      degenerate(alpha, bands.kappas[j], "eigenvector changes character between grid points");
    c *= std::conj(o) / std::abs(o);
    out.coeffs.push_back(std::move(c));
  }

  const std::complex<double> closing = out.coeffs.back().dot(shift_to_next_zone(out.coeffs.front()));
  if (std::abs(closing) < kMinTransportOverlap)
    degenerate(alpha, 1.0, "eigenvector changes character across the zone edge");
  double winding = std::arg(closing);
  // Zak phase of pi for inversion-symmetric lattices: pick one branch deterministically.
  if (winding <= -std::numbers::pi + 1e-8) winding += 2.0 * std::numbers::pi;
  out.winding = winding;
  for (Eigen::Index j = 0; j < n; ++j)
    out.coeffs[static_cast<std::size_t>(j)] *=
        std::polar(1.0, winding * static_cast<double>(j) / static_cast<double>(n));
  return out;
}

GaugeFixedBand with_global_phase(GaugeFixedBand band, double phase) {
  const std::complex<double> f = std::polar(1.0, phase);
  for (auto& c : band.coeffs) c *= f;
  return band;
}

SpatialGrid supercell_grid(const GaugeFixedBand& band, int site, int points_per_period) {
  return SpatialGrid::lattice(band.n_kappas(), points_per_period, site * kPeriod);
}

WannierFunction build_wannier(const GaugeFixedBand& band, int site, const SpatialGrid& grid) {
  if (grid.length() < 20.0 * kPeriod * (1.0 - 1e-12))
    throw ConfigError("build_wannier: grid must span at least 20 lattice periods");
  const Eigen::Index nk = band.n_kappas();
  const Eigen::Index nb = band.basis.size();
  const int cutoff = band.basis.cutoff;

  Eigen::MatrixXcd c(nb, nk);
  for (Eigen::Index j = 0; j < nk; ++j) c.col(j) = band.coeffs[static_cast<std::size_t>(j)];

  const double norm = 1.0 / (static_cast<double>(nk) * std::sqrt(kPeriod));
  const double site_x = site * kPeriod;
  WannierFunction w{band.band, site, grid, Eigen::VectorXcd(grid.size()), 0.0};
  Eigen::VectorXcd phases(nk);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    const double y = x - site_x;
    for (Eigen::Index j = 0; j < nk; ++j) phases[j] = std::polar(1.0, band.kappas[j] * y);
    const Eigen::VectorXcd a = c * phases;
    const std::complex<double> step = std::polar(1.0, 2.0 * x);
    std::complex<double> acc = 0.0;
    for (Eigen::Index m = nb - 1; m >= 0; --m) acc = acc * step + a[m];
    w.samples[i] = norm * acc * std::polar(1.0, -2.0 * cutoff * x);
  }

  const Eigen::VectorXd rho = w.samples.cwiseAbs2();
  const double captured = rho.sum() * grid.dx();
  if (captured < 1.0 - 1e-6) {
    std::ostringstream os;
    os << "build_wannier: grid captures only " << captured << " of the norm";
    throw ConfigError(os.str());
  }
  w.center = grid.points().dot(rho) / rho.sum();
  return w;
}

WannierFunction build_wannier(const GaugeFixedBand& band, int site, int points_per_period) {
  return build_wannier(band, site, supercell_grid(band, site, points_per_period));
}

double shift_residual(const GaugeFixedBand& band, int site, int points_per_period) {
  const SpatialGrid g = supercell_grid(band, 0, points_per_period);
  const WannierFunction w0 = build_wannier(band, 0, g);
  const WannierFunction wn = build_wannier(band, site, g);
  const Eigen::Index n = g.size();
  const Eigen::Index shift = static_cast<Eigen::Index>(site) * points_per_period;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = ((i - shift) % n + n) % n;
    worst = std::max(worst, std::abs(wn.samples[i] - w0.samples[j]));
  }
  return worst / w0.samples.cwiseAbs().maxCoeff();
}

double imaginary_residual(const WannierFunction& w) {
  const std::complex<double> s = w.samples.array().square().sum();
  const std::complex<double> rot = std::polar(1.0, -0.5 * std::arg(s));
  return (w.samples * rot).imag().cwiseAbs().maxCoeff() / w.samples.cwiseAbs().maxCoeff();
}

std::complex<double> potential_matrix_element(const WannierFunction& w_left,
                                              const Eigen::VectorXd& potential,
                                              const WannierFunction& w_right) {
  if (!w_left.grid.same_as(w_right.grid) || potential.size() != w_left.grid.size())
    throw ConfigError("potential_matrix_element: grid mismatch");
  return w_left.samples.dot(potential.cast<std::complex<double>>().cwiseProduct(w_right.samples)) *
         w_left.grid.dx();
}

std::complex<double> potential_matrix_element(const WannierFunction& w_left,
                                              const std::function<double(double)>& potential,
                                              const WannierFunction& w_right) {
  Eigen::VectorXd v(w_left.grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = potential(w_left.grid.x(i));
  return potential_matrix_element(w_left, v, w_right);
}

double decay_slope(const WannierFunction& w, double inner, double outer) {
  // Per-period maxima of |w| on both sides, so nodes inside a cell do not bias the fit.
  std::vector<std::pair<double, double>> pts;
  for (int side : {-1, 1}) {
    for (double lo = inner; lo + kPeriod <= outer + 1e-12; lo += kPeriod) {
      double best = 0.0, at = lo;
      for (Eigen::Index i = 0; i < w.grid.size(); ++i) {
        const double r = side * (w.grid.x(i) - w.center);
        if (r >= lo && r < lo + kPeriod && std::abs(w.samples[i]) > best) {
          best = std::abs(w.samples[i]);
          at = r;
        }
      }
      if (best > 0.0) pts.emplace_back(at, std::log(best));
    }
  }
  if (pts.size() < 2) throw ConfigError("decay_slope: window outside the grid");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double decay_decades(const WannierFunction& w, double distance) {
  const Eigen::VectorXd rho = w.samples.cwiseAbs2();
  double tail = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    if (std::abs(w.grid.x(i) - w.center) > distance) tail = std::max(tail, rho[i]);
  return std::log10(rho.maxCoeff() / std::max(tail, 1e-300));
}

double PotentialMatrixTable::hermiticity_residual() const {
  double worst = 0.0;
  for (const auto& [key, value] : entries) {
    const auto [b, a, s] = key;
    const auto it = entries.find({a, b, -s});
    if (it != entries.end()) worst = std::max(worst, std::abs(value - std::conj(it->second)));
  }
  return worst;
}

PotentialMatrixTable linear_potential_table(const LatticeParams& params, int max_offset,
                                            const WannierOptions& options) {
  if (max_offset < 0) throw ConfigError("linear_potential_table: max_offset must be >= 0");
  const auto bands =
      compute_band_structure(params, options.n_kappas, std::max(options.n_bands, 4), options.basis);
  const auto g0 = fix_gauge(bands, 0);
  const auto g1 = fix_gauge(bands, 1);
  const auto g2 = fix_gauge(bands, 2);

  // Ground-band Wannier centre marks the lattice well; centre the grid on it so the
  // integration window is symmetric about the site.
  const auto probe = build_wannier(g0, 0, options.points_per_period);
  const double dx = kPeriod / options.points_per_period;
  const double origin = std::round(probe.center / dx) * dx;
  const auto grid = SpatialGrid::lattice(g0.n_kappas(), options.points_per_period, origin);

  PotentialMatrixTable table;
  table.v1 = params.v1;
  table.v2 = params.v2;
  table.phi = params.phi;
  table.site_origin = origin;
  const GaugeFixedBand* gauges[] = {&g1, &g2};
  std::vector<WannierFunction> home;
  for (const auto* g : gauges) home.push_back(build_wannier(*g, 0, grid));
  const auto relative_x = [origin](double x) { return x - origin; };
  for (int bi = 0; bi < 2; ++bi)
    for (int s = -max_offset; s <= max_offset; ++s) {
      const auto left = build_wannier(*gauges[bi], s, grid);
      for (int ai = 0; ai < 2; ++ai)
        table.entries[{bi + 1, ai + 1, s}] =
            potential_matrix_element(left, relative_x, home[static_cast<std::size_t>(ai)]);
    }
  return table;
}

void write_wannier_csv(std::ostream& os, const WannierFunction& w) {
  os << "x,re,im\n" << std::setprecision(15);
  for (Eigen::Index i = 0; i < w.grid.size(); ++i)
    os << w.grid.x(i) << ',' << w.samples[i].real() << ',' << w.samples[i].imag() << '\n';
}

void write_matrix_table_csv(std::ostream& os, const PotentialMatrixTable& t, bool header) {
  if (header) os << "alpha,beta,offset,re,im,V1,phi\n";
  os << std::setprecision(15);
  for (const auto& [key, v] : t.entries) {
    const auto [b, a, s] = key;
    os << a << ',' << b << ',' << s << ',' << v.real() << ',' << v.imag() << ',' << t.v1 << ',' << t.phi << '\n';
  }
}

}  // namespace bichro
