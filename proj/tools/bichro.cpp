#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "bichro/config.hpp"
#include "bichro/dirac.hpp"
#include "bichro/dynamics.hpp"
#include "bichro/klein.hpp"
#include "bichro/lattice.hpp"
#include "bichro/slater.hpp"
#include "bichro/wannier.hpp"

namespace fs = std::filesystem;
using namespace bichro;

namespace {

struct Context {
  std::string command;
  RunConfig config;
  fs::path out;

  std::vector<std::string> header() const {
    std::vector<std::string> h{std::string("bichro ") + BICHRO_VERSION, "command " + command};
    for (const auto& line : config.echo()) h.push_back(line);
    return h;
  }

  std::ofstream open(const std::string& name) const {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
    std::ofstream os(out / name);
    if (!os) throw IoError("cannot write " + (out / name).string());
    for (const auto& h : header()) os << "# " << h << '\n';
    return os;
  }

  LatticeParams lattice(double phi) const { return {config.real("v1"), config.real("v2"), phi}; }
  PlaneWaveBasis basis() const { return PlaneWaveBasis(config.integer("cutoff")); }
};

void finish(std::ofstream& os, const std::string& what) {
  os.flush();
  if (!os) throw IoError("write failed for " + what);
}

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_bands(const Context& ctx) {
  for (double phi : ctx.config.list("phi")) {
    const LatticeParams p = ctx.lattice(phi);
    const BandStructure bands =
        compute_band_structure(p, ctx.config.integer("n_kappas"), ctx.config.integer("n_bands"), ctx.basis());
    if (p.v1 == 0.0 && p.v2 == 0.0) {
      double worst = 0.0;
      for (Eigen::Index k = 0; k < bands.n_kappas(); ++k) {
        std::vector<double> free;
        for (int n = -ctx.config.integer("cutoff"); n <= ctx.config.integer("cutoff"); ++n)
          free.push_back(std::pow(bands.kappas[k] + 2.0 * n, 2));
        std::sort(free.begin(), free.end());
        for (int a = 0; a < bands.n_bands(); ++a)
          worst = std::max(worst, std::abs(bands.energy(a, k) - free[static_cast<std::size_t>(a)]));
      }
      if (worst > 1e-10) throw NumericError("bands: free-particle check failed by " + std::to_string(worst));
      std::cout << "free-particle check: max deviation " << worst << '\n';
    }
    const std::string name = "bands_" + phase_tag(phi) + ".csv";
    std::ofstream os = ctx.open(name);
    write_band_csv(os, bands);
    finish(os, name);
    std::cout << "phi=" << phase_tag(phi) << " gap E2(0)-E1(0)=" << std::setprecision(6) << central_gap(bands)
              << " approx=" << approximate_gap(p) << " -> " << (ctx.out / name).string() << '\n';
  }
  return 0;
}

int cmd_fit_sweep(const Context& ctx) {
  const int n = ctx.config.integer("sweep_points");
  if (n < 2) throw ConfigError("fit-sweep: sweep_points must be at least 2");
  std::ofstream os = ctx.open("fit_sweep.csv");
  os << "phi,mc2,c,E_D,residual\n" << std::setprecision(12);
  for (int i = 0; i < n; ++i) {
    const double phi = std::numbers::pi * i / (n - 1);
    const BandStructure bands = compute_band_structure(ctx.lattice(phi), ctx.config.integer("n_kappas"), 3, ctx.basis());
    const DiracParams d = fit_dirac(bands, ctx.config.real("fit_window"));
    os << phi << ',' << d.mass_energy << ',' << d.speed << ',' << d.offset << ',' << d.fit_residual << '\n';
    std::cout << "phi=" << phase_tag(phi) << " mc2=" << std::setprecision(6) << d.mass_energy << " c=" << d.speed
              << " residual=" << d.fit_residual << (d.flagged() ? "  [flagged: poor fit]" : "") << '\n'
              << std::setprecision(12);
  }
  finish(os, "fit_sweep.csv");
  return 0;
}

int cmd_wannier(const Context& ctx) {
  const int ppp = ctx.config.integer("wannier_grid");
  const int max_site = ctx.config.integer("max_site");
  for (double phi : ctx.config.list("phi")) {
    const std::string tag = phase_tag(phi);
    const BandStructure bands = compute_band_structure(ctx.lattice(phi), ctx.config.integer("n_kappas"),
                                                       std::max(ctx.config.integer("n_bands"), 4), ctx.basis());
    std::vector<GaugeFixedBand> gauged;
    std::vector<WannierFunction> home;
    std::ostringstream report;
    report << "band,center,shift_residual,decay_slope,imaginary_residual\n" << std::setprecision(10);
    for (int a = 0; a <= 2; ++a) {
      try {
        gauged.push_back(fix_gauge(bands, a));
      } catch (const DegenerateBandError& e) {
        std::cout << "phi=" << tag << " band " << a << " refused: " << e.what() << '\n';
        report << a << ",refused,,,\n";
        continue;
      }
      const auto& g = gauged.back();
      home.push_back(build_wannier(g, 0, ppp));
      const auto& w = home.back();
      double shift = 0.0;
      for (int n = 1; n <= max_site; ++n) shift = std::max(shift, shift_residual(g, n, ppp));
      report << a << ',' << w.center << ',' << shift << ',' << decay_slope(w) << ',' << imaginary_residual(w) << '\n';
      const std::string name = "wannier_" + tag + "_band" + std::to_string(a) + ".csv";
      std::ofstream os = ctx.open(name);
      write_wannier_csv(os, w);
      finish(os, name);
    }
    double ortho = 0.0;
    for (std::size_t i = 0; i < gauged.size(); ++i)
      for (std::size_t j = 0; j < gauged.size(); ++j)
        for (int n = -max_site; n <= max_site; ++n) {
          const WannierFunction wn = build_wannier(gauged[j], n, home[i].grid);
          const double expect = (i == j && n == 0) ? 1.0 : 0.0;
          ortho = std::max(ortho, std::abs(overlap(wn, home[i]) - expect));
        }
    const std::string name = "wannier_report_" + tag + ".csv";
    std::ofstream os = ctx.open(name);
    os << "# orthonormality_deviation " << std::setprecision(6) << ortho << '\n' << report.str();
    finish(os, name);
    std::cout << "phi=" << tag << " orthonormality deviation " << ortho << " -> " << (ctx.out / name).string() << '\n';
  }
  return 0;
}

int cmd_matrix_elements(const Context& ctx) {
  const double ratio = ctx.config.real("v1") > 0.0 ? ctx.config.real("v2") / ctx.config.real("v1") : 0.0;
  WannierOptions opt;
  opt.n_kappas = ctx.config.integer("table_kappas");
  opt.n_bands = std::max(ctx.config.integer("n_bands"), 4);
  opt.points_per_period = ctx.config.integer("grid_per_period");
  opt.basis = ctx.basis();
  std::ofstream os = ctx.open("matrix_elements.csv");
  os << "# V2/V1 " << std::setprecision(15) << ratio << '\n';
  bool header = true;
  for (double phi : ctx.config.list("phi")) {
    for (double v1 : ctx.config.list("v1_sweep")) {
      const LatticeParams p(v1, v1 * ratio, phi);
      PotentialMatrixTable t;
      try {
        t = linear_potential_table(p, ctx.config.integer("max_offset"), opt);
      } catch (const DegenerateBandError& e) {
        std::cout << "phi=" << phase_tag(phi) << " V1=" << v1 << " refused: " << e.what() << '\n';
        os << "# refused phi " << phi << " V1 " << v1 << '\n';
        continue;
      }
      write_matrix_table_csv(os, t, header);
      header = false;
      std::cout << "phi=" << phase_tag(phi) << " V1=" << v1 << " |V(1,2,1)|=" << std::setprecision(6)
                << std::abs(t.entry(2, 1, 1)) << " |V(1,2,2)|=" << std::abs(t.entry(2, 1, 2))
                << " hermiticity " << t.hermiticity_residual() << '\n';
    }
  }
  finish(os, "matrix_elements.csv");
  return 0;
}

KleinConfig klein_config(const RunConfig& c) {
  KleinConfig k;
  k.tilt = c.real("tilt");
  k.trap_depth = c.real("trap_depth");
  k.trap_waist = c.real("trap_waist");
  k.packet = {c.integer("band"), c.real("kappa0"), c.real("sigma"), c.real("x0")};
  k.periods = c.integer("periods");
  k.points_per_period = c.integer("grid_per_period");
  k.dt = c.real("dt");
  k.t_final = c.real("t_final");
  k.stride = c.integer("stride");
  k.basis = PlaneWaveBasis(c.integer("cutoff"));
  k.n_kappas = c.integer("n_kappas");
  k.fit_window = c.real("fit_window");
  k.keep_frames = c.flag("frames");
  k.decimation = c.integer("decimation");
  return k;
}

int cmd_klein(const Context& ctx) {
  const KleinConfig kc = klein_config(ctx.config);
  const std::string stamp = utc_stamp();
  std::ofstream summary = ctx.open("klein_summary.csv");
  summary << "phi,mc2,c,x_cut,purity,transmitted_schrodinger,transmitted_dirac,norm_drift_schrodinger,"
             "norm_drift_dirac,dirac_max_speed,schrodinger_late_speed,center_rms\n"
          << std::setprecision(10);
  for (double phi : ctx.config.list("phi")) {
    const KleinResult r = run_klein_scenario(ctx.lattice(phi), kc);
    auto header = ctx.header();
    std::ostringstream meta;
    meta << std::setprecision(15) << "phi " << phi << " mc2 " << r.dirac.mass_energy << " c " << r.dirac.speed
         << " E_D " << r.dirac.offset << " x_cut " << r.x_cut;
    header.push_back(meta.str());
    header.push_back("grid " + std::to_string(kc.periods * kc.points_per_period) + " points over " +
                     std::to_string(kc.periods) + " periods, centred on 0");
    header.push_back("dirac initial state: band envelopes (bands 1, 2) by band-limited interpolation, rotated at kappa0");
    const fs::path dir = ctx.out / ("klein_" + phase_tag(phi));
    write_trajectory(dir, "schrodinger", r.schrodinger, header, stamp);
    write_trajectory(dir, "dirac", r.dirac_run, header, stamp);
    summary << phi << ',' << r.dirac.mass_energy << ',' << r.dirac.speed << ',' << r.x_cut << ','
            << r.initial_purity << ',' << r.schrodinger.final_transmitted() << ','
            << r.dirac_run.final_transmitted() << ',' << r.schrodinger.norm_drift << ','
            << r.dirac_run.norm_drift << ',' << r.dirac_max_speed << ',' << r.schrodinger_late_speed << ','
            << r.center_rms << '\n';
    std::cout << "phi=" << phase_tag(phi) << std::setprecision(4) << " transmitted: schrodinger "
              << r.schrodinger.final_transmitted() << ", dirac " << r.dirac_run.final_transmitted()
              << "; norm drift " << std::max(r.schrodinger.norm_drift, r.dirac_run.norm_drift) << '\n';
  }
  finish(summary, "klein_summary.csv");
  return 0;
}

int cmd_slater_check(const Context& ctx) {
  SlaterOptions opt;
  opt.n_sites = ctx.config.integer("slater_sites");
  std::ofstream os = ctx.open("slater.csv");
  os << "phi,operator,sigma,discrepancy\n";
  for (double phi : ctx.config.list("phi")) {
    const LatticeParams p = ctx.lattice(phi);
    const BandStructure bands = compute_band_structure(p, ctx.config.integer("n_kappas"), 3, ctx.basis());
    std::vector<BandOperator> ops{identity_operator(), band_energy_operator(bands, 0, ctx.config.integer("taylor_order"))};
    const DiracParams d = local_dirac_params(p, bands.basis);
    if (d.mass_energy > 1e-6) ops.push_back(rotated_two_band_operator(p, bands.basis, d));
    for (const auto& op : ops)
      for (double sigma : ctx.config.list("sigmas")) {
        std::vector<Envelope> env(static_cast<std::size_t>(op.components), gaussian_envelope(sigma));
        const double disc = slater_oracle(op, env, opt);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.15g,%s,%.15g,%.6e\n", phi, op.name.c_str(), sigma, disc);
        os << buf;
        std::cout << "phi=" << phase_tag(phi) << ' ' << op.name << " sigma=" << sigma << " discrepancy "
                  << std::setprecision(3) << std::scientific << disc << std::defaultfloat << '\n';
      }
  }
  finish(os, "slater.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac points in bichromatic optical lattices"};
  app.set_version_flag("--version", std::string(BICHRO_VERSION));
  app.require_subcommand(1);

  std::string config_file;
  std::string out_dir = "out";
  app.add_option("--config", config_file, "flat key = value configuration file");
  app.add_option("--out", out_dir, "output directory");
  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& k : RunConfig::keys()) {
    std::string flag = "--" + k.name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option(flag, overrides[k.name], k.help + " (default " + k.fallback + ")");
  }

  const std::map<std::string, int (*)(const Context&)> commands = {
      {"bands", cmd_bands},     {"fit-sweep", cmd_fit_sweep}, {"wannier", cmd_wannier},
      {"matrix-elements", cmd_matrix_elements}, {"klein", cmd_klein}, {"slater-check", cmd_slater_check}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out = out_dir;
    if (!config_file.empty()) ctx.config.load_file(config_file);
    for (const auto& [key, value] : overrides)
      if (value) ctx.config.set(key, *value);
    return commands.at(ctx.command)(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  }
}
