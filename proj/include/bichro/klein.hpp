#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "bichro/dirac.hpp"
#include "bichro/dynamics.hpp"
#include "bichro/lattice.hpp"

namespace bichro {

/// Packet escaping a dipole trap with a linear tilt, V(x) = -V0 exp(-2x^2/W0^2) - F x.
struct KleinConfig {
  double tilt = 0.076;
  double trap_depth = 19.77;
  double trap_waist = 157.0;
  WavePacketSpec packet{2, 0.95, 17.0, 40.0};
  int periods = 1024;
  int points_per_period = 32;
  double dt = 1e-3;
  double t_final = 80.0;
  long stride = 100;  ///< steps between observations
  PlaneWaveBasis basis{};
  int n_kappas = 129;
  double fit_window = kDefaultFitWindow;
  double edge_margin = 5.0 * kPeriod;
  double edge_tolerance = 1e-6;
  bool keep_frames = false;
  int decimation = 1;  ///< keep every n-th grid point in stored frames
  bool run_dirac = true;
};

struct Trajectory {
  std::vector<Observables> records;
  std::vector<Eigen::VectorXd> frames;  ///< densities at each record (when kept)
  SpatialGrid frame_grid{0.0, 1.0, 2};
  double norm_drift = 0.0;  ///< max | ||psi(t)|| - ||psi(0)|| |

  double final_transmitted() const { return records.back().transmitted; }
  /// Center-of-mass velocities between consecutive records.
  Eigen::VectorXd center_velocities() const;
};

struct KleinResult {
  LatticeParams lattice;
  DiracParams dirac;
  double x_cut = 0.0;  ///< barrier maximum
  double initial_purity = 0.0;
  Trajectory schrodinger;
  Trajectory dirac_run;
  double dirac_max_speed = 0.0;
  double schrodinger_late_speed = 0.0;  ///< mean speed over the last tenth of the run
  double center_rms = 0.0;  ///< Dirac vs Schrodinger centre while both transmit < 0.1
};

KleinResult run_klein_scenario(const LatticeParams& lattice, const KleinConfig& config = {});

/// Writes `<stem>_NNNNN.csv` (x,density) for each frame and `<stem>_manifest.csv`
/// (time,file,norm,center,transmitted_fraction). `header` lines are written as `# ` comments
/// in every file; `stamp` goes only into the manifest.
void write_trajectory(const std::filesystem::path& dir, const std::string& stem,
                      const Trajectory& trajectory, const std::vector<std::string>& header,
                      const std::string& stamp);

}  // namespace bichro
