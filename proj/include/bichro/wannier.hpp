#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <iosfwd>
#include <map>
#include <tuple>
#include <vector>

#include "bichro/grid.hpp"
#include "bichro/lattice.hpp"

namespace bichro {

/// Bloch coefficients of one band in a smooth, zone-periodic gauge.
/// Holds the distinct points kappa_j = -1 + 2j/N, j = 0..N-1 (kappa = +1 is the image of -1).
struct GaugeFixedBand {
  int band = 0;
  PlaneWaveBasis basis;
  Eigen::VectorXd kappas;
  std::vector<Eigen::VectorXcd> coeffs;
  double winding = 0.0;  ///< accumulated parallel-transport phase around the zone

  Eigen::Index n_kappas() const { return kappas.size(); }
};

/// Minimum gap to neighbouring bands below which fix_gauge refuses a band.
inline constexpr double kMinBandGap = 1e-6;
/// Minimum |<u_j|u_j+1>| tolerated between neighbouring grid points.
inline constexpr double kMinTransportOverlap = 0.8;

/// Parallel-transport gauge with the zone winding spread uniformly over the grid.
/// Throws DegenerateBandError if the band touches a neighbour or changes character
/// between grid points faster than the grid resolves.
GaugeFixedBand fix_gauge(const BandStructure& bands, int alpha);

/// Multiplies every coefficient vector by the same phase.
GaugeFixedBand with_global_phase(GaugeFixedBand band, double phase);

struct WannierFunction {
  int band = 0;
  int site = 0;
  SpatialGrid grid;
  Eigen::VectorXcd samples;
  double center = 0.0;  ///< <x> of |w|^2

  double norm() const { return std::sqrt(samples.squaredNorm() * grid.dx()); }
};

/// Real-space grid covering the full Born-von Karman supercell of the band (N periods)
/// around site `site`, with `points_per_period` samples per period.
SpatialGrid supercell_grid(const GaugeFixedBand& band, int site, int points_per_period = 64);

/// w_{alpha,n}(x) = 1/(N sqrt d) sum_j e^{-i kappa_j n d} u_{alpha,kappa_j}(x).
/// Throws if the grid spans fewer than 20 periods or captures norm below 1 - 1e-6.
WannierFunction build_wannier(const GaugeFixedBand& band, int site, const SpatialGrid& grid);
WannierFunction build_wannier(const GaugeFixedBand& band, int site, int points_per_period = 64);

/// max |w_{alpha,site}(x) - w_{alpha,0}(x - site d)| / max |w_{alpha,0}| on the site-0 supercell.
double shift_residual(const GaugeFixedBand& band, int site, int points_per_period = 64);

/// Largest |Im(e^{-i theta0} w)| relative to max |w| after removing the optimal global phase.
double imaginary_residual(const WannierFunction& w);

/// <w_left | V | w_right> by the periodic trapezoidal rule.
std::complex<double> potential_matrix_element(const WannierFunction& w_left,
                                              const Eigen::VectorXd& potential,
                                              const WannierFunction& w_right);
std::complex<double> potential_matrix_element(const WannierFunction& w_left,
                                              const std::function<double(double)>& potential,
                                              const WannierFunction& w_right);

inline std::complex<double> overlap(const WannierFunction& a, const WannierFunction& b) {
  return potential_matrix_element(a, [](double) { return 1.0; }, b);
}

/// Semi-log slope of |w| against |x - center| over the window [inner, outer] (units of x).
double decay_slope(const WannierFunction& w, double inner = 2.0 * kPeriod,
                   double outer = 6.0 * kPeriod);

/// Decades by which |w|^2 falls from its peak to the largest value beyond `distance` from
/// the centre.
double decay_decades(const WannierFunction& w, double distance);

/// Elements of a linear potential per unit slope,
/// entry(beta, alpha, s) = int w*_{beta,s}(x) (x - x_site) w_{alpha,0}(x) dx,
/// where x_site is the Wannier centre of the ground band (the lattice well).
struct PotentialMatrixTable {
  double v1 = 0.0;
  double v2 = 0.0;
  double phi = 0.0;
  double slope = 1.0;        ///< F; entries are stored per unit F
  double site_origin = 0.0;  ///< x_0; the diagonal term F x_n is F (x_0 + n d)
  std::map<std::tuple<int, int, int>, std::complex<double>> entries;

  std::complex<double> entry(int beta, int alpha, int offset) const {
    return entries.at({beta, alpha, offset});
  }
  /// max |entry(b,a,s) - conj(entry(a,b,-s))| over stored pairs.
  double hermiticity_residual() const;
};

/// The supercell must be long enough that x - x_site stays single-valued under the tails.
struct WannierOptions {
  int n_kappas = 385;
  int n_bands = 5;
  int points_per_period = 32;
  PlaneWaveBasis basis{};
};

PotentialMatrixTable linear_potential_table(const LatticeParams& params, int max_offset,
                                            const WannierOptions& options = {});

/// CSV `x,re,im`
void write_wannier_csv(std::ostream& os, const WannierFunction& w);
/// CSV `alpha,beta,offset,re,im,V1,phi` (header written when `header` is true)
void write_matrix_table_csv(std::ostream& os, const PotentialMatrixTable& t, bool header = true);

}  // namespace bichro
