#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "bichro/errors.hpp"

namespace bichro {

/// Lattice period in scaled units (x measured in 1/k0).
inline constexpr double kPeriod = std::numbers::pi;

/// Uniform periodic grid x_j = x_min + j*dx, j = 0..n_points-1. The point x_max is excluded.
class SpatialGrid {
 public:
  SpatialGrid(double x_min, double x_max, Eigen::Index n_points)
      : x_min_(x_min), x_max_(x_max), n_(n_points) {
    if (!(x_max > x_min) || n_points < 2 || !std::isfinite(x_min) || !std::isfinite(x_max))
      throw ConfigError("SpatialGrid: need x_max > x_min and at least two points");
    dx_ = (x_max - x_min) / static_cast<double>(n_points);
  }

  /// Grid covering `n_periods` lattice periods centred on `center`.
  static SpatialGrid lattice(Eigen::Index n_periods, Eigen::Index points_per_period,
                             double center = 0.0) {
    const double half = 0.5 * static_cast<double>(n_periods) * kPeriod;
    return {center - half, center + half, n_periods * points_per_period};
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double dx() const { return dx_; }
  double length() const { return x_max_ - x_min_; }
  Eigen::Index size() const { return n_; }
  double x(Eigen::Index j) const { return x_min_ + static_cast<double>(j) * dx_; }

  Eigen::VectorXd points() const {
    return Eigen::VectorXd::LinSpaced(n_, x_min_, x_min_ + static_cast<double>(n_ - 1) * dx_);
  }

  /// Number of lattice periods spanned, or -1 if the length is not a whole multiple of d.
  Eigen::Index whole_periods() const {
    const double p = length() / kPeriod;
    const double r = std::round(p);
    return std::abs(p - r) < 1e-9 * std::max(1.0, p) ? static_cast<Eigen::Index>(r) : -1;
  }

  bool is_power_of_two() const { return n_ > 0 && (n_ & (n_ - 1)) == 0; }

  bool same_as(const SpatialGrid& o) const {
    return n_ == o.n_ && std::abs(x_min_ - o.x_min_) < 1e-12 * std::max(1.0, std::abs(x_min_)) &&
           std::abs(dx_ - o.dx_) < 1e-14 * std::max(1.0, dx_);
  }

  /// Wavenumbers in FFT order: k_q = 2*pi*q/L with q in [-n/2, n/2).
  Eigen::VectorXd wavenumbers() const {
    Eigen::VectorXd k(n_);
    for (Eigen::Index q = 0; q < n_; ++q) {
      const Eigen::Index s = q < (n_ + 1) / 2 ? q : q - n_;
      k[q] = 2.0 * std::numbers::pi * static_cast<double>(s) / length();
    }
    return k;
  }

 private:
  double x_min_;
  double x_max_;
  Eigen::Index n_;
  double dx_;
};

}  // namespace bichro
