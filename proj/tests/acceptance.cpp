// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "bichro/dirac.hpp"
#include "bichro/dynamics.hpp"
#include "bichro/klein.hpp"
#include "bichro/lattice.hpp"
#include "bichro/slater.hpp"
#include "bichro/wannier.hpp"

using namespace bichro;

namespace {

constexpr double pi = std::numbers::pi;
const LatticeParams kLattice(5.0, 1.56, 0.0);

LatticeParams at_phase(double phi) { return {5.0, 1.56, phi}; }

struct Verdict {
  bool pass;
  std::string detail;
};

Verdict dirac_point() {
  const BandStructure b = compute_band_structure(at_phase(pi), 129, 3);
  const double gap = central_gap(b), approx = approximate_gap(at_phase(pi));
  std::ostringstream os;
  os << "gap(pi) = " << gap << ", approximate formula = " << approx;
  return {gap < 0.01 && std::abs(approx - 0.0025) < 1e-9, os.str()};
}

Verdict mass_anchors() {
  struct Anchor {
    double phi, lo, hi;
  };
  const Anchor anchors[] = {{0.0, 0.73, 0.83}, {0.8 * pi, 0.19, 0.29}, {pi, -1.0, 0.01}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& a : anchors) {
    const DiracParams d = fit_dirac(compute_band_structure(at_phase(a.phi), 129, 3));
    const bool here = d.mass_energy > a.lo && d.mass_energy < a.hi && d.fit_residual < 0.02;
    ok = ok && here;
    os << "mc2(" << a.phi / pi << "pi) = " << d.mass_energy << " res " << d.fit_residual << (here ? "" : " [out]") << "; ";
  }
  return {ok, os.str()};
}

Verdict gap_relation() {
  double worst = 0.0;
  for (int i = 0; i <= 5; ++i) {
    const BandStructure b = compute_band_structure(at_phase(0.2 * pi * i), 129, 3);
    worst = std::max(worst, gap_consistency(fit_dirac(b), b));
  }
  std::ostringstream os;
  os << "max |dE - 2mc2| = " << worst;
  return {worst < 0.02, os.str()};
}

Verdict free_particle() {
  const BandStructure b = compute_band_structure({}, 129, 5);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < b.n_kappas(); ++k) {
    std::vector<double> e;
    for (int n = -16; n <= 16; ++n) e.push_back(std::pow(b.kappas[k] + 2.0 * n, 2));
    std::sort(e.begin(), e.end());
    for (int a = 0; a < 5; ++a) worst = std::max(worst, std::abs(b.energy(a, k) - e[static_cast<std::size_t>(a)]));
  }
  std::ostringstream os;
  os << "max deviation " << worst;
  return {worst < 1e-10, os.str()};
}

Verdict wannier_suite() {
  const BandStructure b = compute_band_structure(kLattice, 129, 5);
  std::vector<GaugeFixedBand> g;
  for (int a = 0; a <= 2; ++a) g.push_back(fix_gauge(b, a));
  const SpatialGrid grid = supercell_grid(g[0], 0, 64);
  std::vector<WannierFunction> home;
  for (const auto& band : g) home.push_back(build_wannier(band, 0, grid));
  double ortho = 0.0, shift = 0.0, decades = 1e9;
  for (int bi = 0; bi <= 2; ++bi) {
    for (int n = -3; n <= 3; ++n) {
      const auto wn = build_wannier(g[static_cast<std::size_t>(bi)], n, grid);
      for (int ai = 0; ai <= 2; ++ai) {
        const double expect = (ai == bi && n == 0) ? 1.0 : 0.0;
        ortho = std::max(ortho, std::abs(overlap(wn, home[static_cast<std::size_t>(ai)]) - expect));
      }
      if (n != 0) shift = std::max(shift, shift_residual(g[static_cast<std::size_t>(bi)], n, 64));
    }
  }
  for (int a : {0, 1}) decades = std::min(decades, decay_decades(home[static_cast<std::size_t>(a)], 3.0 * kPeriod));
  std::ostringstream os;
  os << "orthonormality " << ortho << ", shift " << shift << ", decades within 3d (bands 0,1) " << decades;
  return {ortho < 1e-6 && shift < 1e-6 && decades >= 3.0, os.str()};
}

Verdict matrix_elements() {
  bool ok = true;
  double diag = 0.0;
  double prev1 = 1e9, prev2 = 1e9;
  std::ostringstream os;
  for (double v1 : {4.0, 6.0, 8.0, 10.0}) {
    const PotentialMatrixTable t = linear_potential_table({v1, v1 * 1.56 / 5.0, 0.0}, 2);
    diag = std::max({diag, std::abs(t.entry(1, 1, 0)), std::abs(t.entry(2, 2, 0))});
    const double s1 = std::max(std::abs(t.entry(2, 1, 1)), std::abs(t.entry(2, 1, -1)));
    const double s2 = std::max(std::abs(t.entry(2, 1, 2)), std::abs(t.entry(2, 1, -2)));
    ok = ok && s1 < prev1 && s2 < prev2 && s2 < s1;
    prev1 = s1;
    prev2 = s2;
    os << "V1=" << v1 << " |s1| " << s1 << " |s2| " << s2 << "; ";
  }
  os << "diagonal " << diag;
  return {ok && diag < 1e-8, os.str()};
}

Verdict slater() {
  const BandOperator op = band_energy_operator(compute_band_structure(kLattice, 129, 3), 0);
  double d[3];
  int i = 0;
  for (double sigma : {8.0, 17.0, 34.0}) d[i++] = slater_oracle(op, {gaussian_envelope(sigma)});
  std::ostringstream os;
  os << "discrepancy sigma 8/17/34: " << d[0] << " / " << d[1] << " / " << d[2];
  return {d[1] < 1e-4 && d[0] > d[1] && d[1] > d[2], os.str()};
}

KleinResult klein_runs[3];

Verdict klein() {
  const double phis[] = {0.0, 0.8 * pi, pi};
  for (int i = 0; i < 3; ++i) klein_runs[i] = run_klein_scenario(at_phase(phis[i]));
  const auto regime = [](int i, double t) {
    return i == 0 ? t < 0.1 : (i == 1 ? (t > 0.1 && t < 0.9) : t > 0.9);
  };
  bool ok = true;
  double drift = 0.0;
  std::ostringstream os;
  for (int i = 0; i < 3; ++i) {
    const auto& r = klein_runs[i];
    const double ts = r.schrodinger.final_transmitted(), td = r.dirac_run.final_transmitted();
    ok = ok && regime(i, ts) && regime(i, td);
    drift = std::max({drift, r.schrodinger.norm_drift, r.dirac_run.norm_drift});
    os << "phi " << phis[i] / pi << "pi T " << ts << "/" << td << "; ";
  }
  os << "norm drift " << drift;
  return {ok && drift < 1e-8, os.str()};
}

Verdict speed_limit() {
  const auto& r = klein_runs[2];
  std::ostringstream os;
  os << "c = " << r.dirac.speed << ", Dirac max speed " << r.dirac_max_speed << ", Schrodinger late speed "
     << r.schrodinger_late_speed << " (center RMS pre-escape " << r.center_rms << ")";
  return {r.dirac_max_speed <= r.dirac.speed * (1.0 + 1e-3) && r.schrodinger_late_speed > r.dirac.speed, os.str()};
}

Verdict propagator_suite() {
  const LatticeParams p(5.0, 1.56, 0.8 * pi);
  const SlowPotential slow = SlowPotential::dipole_plus_tilt(19.77, 157.0, 0.076);
  const BandStructure b = compute_band_structure(p, 129, 3);
  const SpatialGrid g = SpatialGrid::lattice(1024, 32);
  const WaveState start = prepare_bloch_packet({2, 0.95, 17.0, 40.0}, b, g);

  WaveState s = start;
  SchrodingerPropagator prop(g, p, slow, 1e-3), back(g, p, slow, -1e-3), fine(g, p, slow, 5e-4);
  const double e0 = energy_expectation(s, p, slow);
  double edrift = 0.0;
  prop.run(s, 4000, 500, [&](const WaveState& w) {
    edrift = std::max(edrift, std::abs(energy_expectation(w, p, slow) - e0) / std::abs(e0));
  });
  const double unitarity = std::abs(s.norm() - start.norm());
  WaveState h = start;
  fine.run(h, 8000);
  const double halving = (s.density() - h.density()).cwiseAbs().maxCoeff();
  back.run(s, 4000);
  const double reversal = s.sup_distance(start);
  std::ostringstream os;
  os << "unitarity " << unitarity << ", reversal " << reversal << ", halving " << halving << ", energy drift " << edrift;
  return {unitarity < 1e-8 && reversal < 1e-7 && halving < 1e-6 && edrift < 1e-6, os.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"Dirac point at phi = pi", dirac_point},
      {"effective-mass anchors", mass_anchors},
      {"gap relation", gap_relation},
      {"free-particle bands", free_particle},
      {"Wannier suite", wannier_suite},
      {"matrix-element structure", matrix_elements},
      {"Slater oracle", slater},
      {"Klein tunneling regimes", klein},
      {"speed limit", speed_limit},
      {"propagator properties", propagator_suite},
  };
  int failures = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s | %s (%.1f s)\n", n, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  std::printf("%d of %d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
