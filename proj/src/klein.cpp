#include "bichro/klein.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bichro {
namespace {

Eigen::VectorXd decimate(const Eigen::VectorXd& v, int step) {
  Eigen::VectorXd out(v.size() / step);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[i * step];
  return out;
}

class Recorder {
 public:
  Recorder(Trajectory& t, const KleinConfig& c, double x_cut) : t_(t), c_(c), x_cut_(x_cut) {}

  void operator()(const WaveState& s) {
    const double ratio = edge_density_ratio(s, c_.edge_margin);
    if (ratio > c_.edge_tolerance) {
      std::ostringstream os;
      os << "klein: density at the box edge reached " << ratio << " of the peak at t = " << s.time;
      throw NumericError(os.str());
    }
    Observables o = observables(s, x_cut_);
    const double n = std::sqrt(o.norm);
    if (t_.records.empty()) n0_ = n;
    t_.norm_drift = std::max(t_.norm_drift, std::abs(n - n0_));
    t_.records.push_back(std::move(o));
    if (c_.keep_frames) t_.frames.push_back(decimate(s.density(), c_.decimation));
  }

 private:
  Trajectory& t_;
  const KleinConfig& c_;
  double x_cut_;
  double n0_ = 0.0;
};

}  // namespace

Eigen::VectorXd Trajectory::center_velocities() const {
  const auto n = static_cast<Eigen::Index>(records.size());
  Eigen::VectorXd v(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const auto& a = records[static_cast<std::size_t>(i)];
    const auto& b = records[static_cast<std::size_t>(i + 1)];
    v[i] = (b.center - a.center) / (b.time - a.time);
  }
  return v;
}

KleinResult run_klein_scenario(const LatticeParams& lattice, const KleinConfig& config) {
  if (config.periods < 1024) throw ConfigError("klein: box must span at least 1024 periods");
  if (config.decimation < 1 || config.points_per_period % config.decimation != 0)
    throw ConfigError("klein: decimation must divide the points per period");
  if (!(config.dt > 0.0) || !(config.t_final > 0.0) || config.stride < 1)
    throw ConfigError("klein: dt, t_final and stride must be positive");

  KleinResult r;
  r.lattice = lattice;
  const BandStructure bands = compute_band_structure(lattice, config.n_kappas, 3, config.basis);
  r.dirac = fit_dirac(bands, config.fit_window);

  const SpatialGrid grid = SpatialGrid::lattice(config.periods, config.points_per_period);
  const SlowPotential slow =
      SlowPotential::dipole_plus_tilt(config.trap_depth, config.trap_waist, config.tilt);
  r.x_cut = slow.barrier_position();
  const long n_steps = std::lround(config.t_final / config.dt);

  WaveState psi = prepare_bloch_packet(config.packet, bands, grid);
  r.initial_purity = band_populations(psi, lattice, config.basis, config.packet.band + 1)[config.packet.band];
  WaveState spinor = dirac_initial_state(psi, lattice, config.basis, r.dirac, config.packet.kappa0);
  // Both runs start from unit norm; the band envelopes carry the bands-1,2 weight only.
  for (auto& c : spinor.components) c /= spinor.norm();

  const SpatialGrid frame_grid(grid.x_min(), grid.x_max(), grid.size() / config.decimation);
  r.schrodinger.frame_grid = frame_grid;
  r.dirac_run.frame_grid = frame_grid;
  {
    SchrodingerPropagator prop(grid, lattice, slow, config.dt);
    Recorder rec(r.schrodinger, config, r.x_cut);
    prop.run(psi, n_steps, config.stride, std::ref(rec));
  }
  if (config.run_dirac) {
    DiracPropagator prop(grid, r.dirac, slow, config.dt);
    Recorder rec(r.dirac_run, config, r.x_cut);
    prop.run(spinor, n_steps, config.stride, std::ref(rec));

    r.dirac_max_speed = r.dirac_run.center_velocities().cwiseAbs().maxCoeff();
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < r.schrodinger.records.size(); ++i) {
      const auto& s = r.schrodinger.records[i];
      const auto& d = r.dirac_run.records[i];
      if (s.transmitted >= 0.1 || d.transmitted >= 0.1) break;
      sum += (s.center - d.center) * (s.center - d.center);
      ++count;
    }
    r.center_rms = count > 0 ? std::sqrt(sum / count) : 0.0;
  }
  const auto& recs = r.schrodinger.records;
  const std::size_t late = recs.size() - 1 - (recs.size() - 1) / 10;
  r.schrodinger_late_speed = (recs.back().center - recs[late].center) / (recs.back().time - recs[late].time);
  return r;
}

void write_trajectory(const std::filesystem::path& dir, const std::string& stem,
                      const Trajectory& trajectory, const std::vector<std::string>& header,
                      const std::string& stamp) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw IoError("cannot write " + p.string());
    return os;
  };
  char buf[96];
  std::ofstream manifest = open(dir / (stem + "_manifest.csv"));
  for (const auto& h : header) manifest << "# " << h << '\n';
  manifest << "# created " << stamp << '\n' << "time,file,norm,center,transmitted_fraction\n";
  const Eigen::VectorXd x = trajectory.frame_grid.points();
  for (std::size_t i = 0; i < trajectory.records.size(); ++i) {
    const auto& o = trajectory.records[i];
    std::string file = "-";
    if (i < trajectory.frames.size()) {
      std::snprintf(buf, sizeof buf, "%s_%05zu.csv", stem.c_str(), i);
      file = buf;
      std::ofstream fs = open(dir / file);
      for (const auto& h : header) fs << "# " << h << '\n';
      std::snprintf(buf, sizeof buf, "# time %.6f\n", o.time);
      fs << buf << "x,density\n";
      const auto& rho = trajectory.frames[i];
      for (Eigen::Index j = 0; j < rho.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.8f,%.12e\n", x[j], rho[j]);
        fs << buf;
      }
      if (!fs) throw IoError("write failed for " + file);
    }
    std::snprintf(buf, sizeof buf, "%.6f,", o.time);
    manifest << buf << file;
    std::snprintf(buf, sizeof buf, ",%.15g,%.15g,%.15g\n", o.norm, o.center, o.transmitted);
    manifest << buf;
  }
  if (!manifest) throw IoError("write failed for manifest");
}

}  // namespace bichro
