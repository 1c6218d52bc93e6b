#include "bichro/dynamics.hpp"

#include <algorithm>
#include <iostream>
#include <numbers>
#include <sstream>

namespace bichro {
namespace {

using cd = std::complex<double>;

// Momentum-space samples in absolute-x phase convention: Psi(k_q) = sum_j psi_j e^{-i k_q x_j}.
Eigen::VectorXcd absolute_spectrum(const Eigen::VectorXcd& psi, const SpatialGrid& grid, Fft& fft) {
  Eigen::VectorXcd s = fft.forward(psi);
  const Eigen::VectorXd k = grid.wavenumbers();
  for (Eigen::Index q = 0; q < s.size(); ++q) s[q] *= std::polar(1.0, -k[q] * grid.x_min());
  return s;
}

Eigen::Index whole_periods_or_throw(const SpatialGrid& grid, const char* who) {
  const auto p = grid.whole_periods();
  if (p <= 0) throw ConfigError(std::string(who) + ": box length must be a whole number of periods");
  return p;
}

// Index of the FFT mode with signed wavenumber index s, or -1 if outside the grid.
Eigen::Index mode_index(Eigen::Index s, Eigen::Index n) {
  if (s < -n / 2 || s >= (n + 1) / 2) return -1;
  return s >= 0 ? s : s + n;
}

// Plane-wave amplitudes v_m = Psi(kappa + 2m) for the quasimomentum class r in [-P/2, P/2).
Eigen::VectorXcd bloch_slice(const Eigen::VectorXcd& spectrum, Eigen::Index r, Eigen::Index periods,
                             const PlaneWaveBasis& basis) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    const Eigen::Index idx = mode_index(r + basis.index(i) * periods, spectrum.size());
    if (idx >= 0) v[i] = spectrum[idx];
  }
  return v;
}

void check_norm(double initial, double current, long step) {
  if (std::abs(current - initial) > kMaxNormDrift * initial) {
    std::ostringstream os;
    os << "propagator: norm drift " << current - initial << " after " << step << " steps";
    throw NumericError(os.str());
  }
}

}  // namespace

Eigen::VectorXd WaveState::density() const {
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(grid.size());
  for (const auto& c : components) rho += c.cwiseAbs2();
  return rho;
}

double WaveState::sup_distance(const WaveState& other) const {
  if (components.size() != other.components.size() || !grid.same_as(other.grid))
    throw ConfigError("WaveState::sup_distance: incompatible states");
  double d = 0.0;
  for (std::size_t c = 0; c < components.size(); ++c)
    d = std::max(d, (components[c] - other.components[c]).cwiseAbs().maxCoeff());
  return d;
}

double SlowPotential::operator()(double x) const {
  switch (kind) {
    case Kind::DipolePlusTilt:
      return -v0 * std::exp(-2.0 * x * x / (w0 * w0)) - f * x;
    case Kind::Linear:
      return -f * x;
    case Kind::Custom:
      break;
  }
  throw ConfigError("SlowPotential: custom samples cannot be evaluated pointwise");
}

Eigen::VectorXd SlowPotential::sample(const SpatialGrid& grid) const {
  if (kind == Kind::Custom) {
    if (samples.size() != grid.size()) throw ConfigError("SlowPotential: sample count mismatch");
    return samples;
  }
  Eigen::VectorXd v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = (*this)(grid.x(i));
  return v;
}

double SlowPotential::barrier_position() const {
  if (kind != Kind::DipolePlusTilt || !(f > 0.0) || !(v0 > 0.0))
    throw ConfigError("barrier_position: needs a trap with positive depth and tilt");
  const auto slope = [this](double x) {
    return 4.0 * v0 * x / (w0 * w0) * std::exp(-2.0 * x * x / (w0 * w0)) - f;
  };
  // V' starts at -f, rises inside the trap and falls back to -f; the barrier is the outer root.
  const double h = w0 * 1e-4;
  double x = 0.0;
  bool rising = false;
  for (; x < 10.0 * w0; x += h) {
    if (slope(x) > 0.0) rising = true;
    if (rising && slope(x + h) <= 0.0) break;
  }
  if (!rising || x >= 10.0 * w0) throw ConfigError("barrier_position: tilt too strong for a barrier");
  double lo = x, hi = x + h;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

WaveState prepare_bloch_packet(const WavePacketSpec& spec, const BandStructure& bands,
                               const SpatialGrid& grid) {
  if (grid.dx() > kPeriod / 16.0 * (1.0 + 1e-12))
    throw ConfigError("prepare_bloch_packet: grid needs at least 16 points per period");
  if (!(spec.sigma > 0.0) || std::abs(spec.kappa0) > 1.0)
    throw ConfigError("prepare_bloch_packet: need sigma > 0 and |kappa0| <= 1");
  if (spec.band < 0 || spec.band >= bands.basis.size())
    throw ConfigError("prepare_bloch_packet: band index out of range");
  if (spec.sigma < 3.0 * kPeriod)
    std::clog << "warning: packet width " << spec.sigma
              << " is below three lattice periods; the envelope is not slow\n";

  const auto edge = [&](double x) { return std::exp(-(x - spec.x0) * (x - spec.x0) / (2.0 * spec.sigma * spec.sigma)); };
  if (std::max(edge(grid.x_min()), edge(grid.x_max())) > 1e-8)
    throw ConfigError("prepare_bloch_packet: packet touches the box edge");

  const auto states = solve_bloch(bands.params, spec.kappa0, bands.basis, spec.band + 1);
  const Eigen::VectorXcd u = bloch_to_grid(states.back(), grid);
  Eigen::VectorXcd psi(grid.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double y = grid.x(i) - spec.x0;
    psi[i] = std::exp(-y * y / (4.0 * spec.sigma * spec.sigma)) * u[i];
  }
  psi /= std::sqrt(psi.squaredNorm() * grid.dx());
  WaveState state = WaveState::scalar(grid, std::move(psi));

  if (grid.whole_periods() > 0) {
    const auto pops = band_populations(state, bands.params, bands.basis, spec.band + 1);
    if (pops[spec.band] < 0.95) {
      std::ostringstream os;
      os << "prepare_bloch_packet: band purity " << pops[spec.band] << " below 0.95";
      throw ConfigError(os.str());
    }
  }
  return state;
}

Eigen::VectorXd band_populations(const WaveState& state, const LatticeParams& params,
                                 const PlaneWaveBasis& basis, int n_bands) {
  if (state.is_spinor()) throw ConfigError("band_populations: scalar state required");
  const Eigen::Index periods = whole_periods_or_throw(state.grid, "band_populations");
  Fft fft(state.grid.size());
  const Eigen::VectorXcd spec = absolute_spectrum(state.components[0], state.grid, fft);
  const double total = spec.squaredNorm();
  Eigen::VectorXd pops = Eigen::VectorXd::Zero(n_bands);
  for (Eigen::Index r = -periods / 2; r < periods - periods / 2; ++r) {
    const Eigen::VectorXcd v = bloch_slice(spec, r, periods, basis);
    if (v.squaredNorm() < 1e-30 * total) continue;
    const double kappa = 2.0 * static_cast<double>(r) / static_cast<double>(periods);
    const auto eig = solve_bloch(params, kappa, basis, n_bands);
    for (int a = 0; a < n_bands; ++a) pops[a] += std::norm(eig[static_cast<std::size_t>(a)].coeffs.dot(v));
  }
  return pops / total;
}

double energy_expectation(const WaveState& state, const LatticeParams& params,
                          const SlowPotential& slow) {
  if (state.is_spinor()) throw ConfigError("energy_expectation: scalar state required");
  const auto& psi = state.components[0];
  const auto& g = state.grid;
  Fft fft(g.size());
  const Eigen::VectorXcd s = fft.forward(psi);
  const Eigen::VectorXd k = g.wavenumbers();
  const double kinetic = (k.array().square() * s.cwiseAbs2().array()).sum() / static_cast<double>(g.size());
  Eigen::VectorXd v = slow.sample(g);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += params.potential(g.x(i));
  const double potential = v.dot(psi.cwiseAbs2());
  return (kinetic + potential) / psi.squaredNorm();
}

SchrodingerPropagator::SchrodingerPropagator(const SpatialGrid& grid, const LatticeParams& lattice,
                                             const SlowPotential& slow, double dt)
    : grid_(grid), dt_(dt), fft_(grid.size()), work_(grid.size()) {
  if (!grid.is_power_of_two()) throw ConfigError("SchrodingerPropagator: grid size must be a power of two");
  if ((lattice.v1 > 0.0 || lattice.v2 > 0.0) && grid.whole_periods() <= 0)
    throw ConfigError("SchrodingerPropagator: box must hold a whole number of lattice periods");
  if (!std::isfinite(dt) || dt == 0.0) throw ConfigError("SchrodingerPropagator: invalid time step");
  const Eigen::VectorXd v = slow.sample(grid);
  half_potential_.resize(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    half_potential_[i] = std::polar(1.0, -0.5 * dt * (v[i] + lattice.potential(grid.x(i))));
  const Eigen::VectorXd k = grid.wavenumbers();
  kinetic_.resize(grid.size());
  for (Eigen::Index q = 0; q < k.size(); ++q) kinetic_[q] = std::polar(1.0, -dt * k[q] * k[q]);
}

void SchrodingerPropagator::step(WaveState& state) {
  auto& psi = state.components[0];
  psi.array() *= half_potential_.array();
  fft_.forward(psi, work_);
  work_.array() *= kinetic_.array();
  fft_.inverse(work_, psi);
  psi.array() *= half_potential_.array();
  state.time += dt_;
}

void SchrodingerPropagator::run(WaveState& state, long n_steps, long stride, const Observer& observer) {
  if (state.is_spinor() || !state.grid.same_as(grid_))
    throw ConfigError("SchrodingerPropagator::run: scalar state on the propagator grid required");
  const double n0 = state.norm_squared();
  if (observer) observer(state);
  for (long s = 1; s <= n_steps; ++s) {
    step(state);
    if (s % 1000 == 0 || s == n_steps) check_norm(n0, state.norm_squared(), s);
    if (observer && stride > 0 && s % stride == 0) observer(state);
  }
}

DiracPropagator::DiracPropagator(const SpatialGrid& grid, const DiracParams& dirac,
                                 const SlowPotential& slow, double dt)
    : grid_(grid), dt_(dt), fft_(grid.size()), work_(grid.size()) {
  if (!grid.is_power_of_two()) throw ConfigError("DiracPropagator: grid size must be a power of two");
  if (!std::isfinite(dt) || dt == 0.0) throw ConfigError("DiracPropagator: invalid time step");
  const Eigen::VectorXd v = slow.sample(grid);
  phase_.resize(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) phase_[i] = std::polar(1.0, -0.5 * dt * v[i]);
  mass_cos_ = std::cos(0.5 * dt * dirac.mass_energy);
  mass_sin_ = std::sin(0.5 * dt * dirac.mass_energy);
  const Eigen::VectorXd k = grid.wavenumbers();
  kinetic_plus_.resize(k.size());
  kinetic_minus_.resize(k.size());
  for (Eigen::Index q = 0; q < k.size(); ++q) {
    kinetic_plus_[q] = std::polar(1.0, -dt * dirac.speed * k[q]);
    kinetic_minus_[q] = std::conj(kinetic_plus_[q]);
  }
}

void DiracPropagator::half_potential(WaveState& state) const {
  auto& a = state.components[0];
  auto& b = state.components[1];
  const cd ms(0.0, -mass_sin_);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    // exp(-i dt/2 (V + mc^2 sigma_x)) = e^{-i dt V/2} (cos - i sin sigma_x)
    const cd na = phase_[i] * (mass_cos_ * a[i] + ms * b[i]);
    const cd nb = phase_[i] * (mass_cos_ * b[i] + ms * a[i]);
    a[i] = na;
    b[i] = nb;
  }
}

void DiracPropagator::step(WaveState& state) {
  half_potential(state);
  fft_.forward(state.components[0], work_);
  work_.array() *= kinetic_plus_.array();
  fft_.inverse(work_, state.components[0]);
  fft_.forward(state.components[1], work_);
  work_.array() *= kinetic_minus_.array();
  fft_.inverse(work_, state.components[1]);
  half_potential(state);
  state.time += dt_;
}

void DiracPropagator::run(WaveState& state, long n_steps, long stride, const Observer& observer) {
  if (!state.is_spinor() || !state.grid.same_as(grid_))
    throw ConfigError("DiracPropagator::run: spinor state on the propagator grid required");
  const double n0 = state.norm_squared();
  if (observer) observer(state);
  for (long s = 1; s <= n_steps; ++s) {
    step(state);
    if (s % 1000 == 0 || s == n_steps) check_norm(n0, state.norm_squared(), s);
    if (observer && stride > 0 && s % stride == 0) observer(state);
  }
}

Eigen::VectorXd CoarseGrained::site_positions() const {
  Eigen::VectorXd x(amplitudes.cols());
  for (Eigen::Index n = 0; n < x.size(); ++n) x[n] = (first_site + static_cast<double>(n)) * kPeriod;
  return x;
}

CoarseGrained coarse_grain(const WaveState& state, const std::vector<WannierFunction>& home) {
  if (state.is_spinor() || home.empty()) throw ConfigError("coarse_grain: scalar state and Wannier set required");
  const auto& g = state.grid;
  const double ppp_f = kPeriod / g.dx();
  const auto ppp = static_cast<Eigen::Index>(std::llround(ppp_f));
  if (std::abs(ppp_f - static_cast<double>(ppp)) > 1e-9) throw ConfigError("coarse_grain: grid spacing must divide the period");

  CoarseGrained out;
  Eigen::Index lo_site = std::numeric_limits<Eigen::Index>::min(), hi_site = std::numeric_limits<Eigen::Index>::max();
  std::vector<Eigen::Index> offsets;
  for (const auto& w : home) {
    if (w.site != 0 || std::abs(w.grid.dx() - g.dx()) > 1e-12 * g.dx())
      throw ConfigError("coarse_grain: home-site Wannier functions on the state spacing required");
    const double off_f = (w.grid.x_min() - g.x_min()) / g.dx();
    const auto off = static_cast<Eigen::Index>(std::llround(off_f));
    if (std::abs(off_f - static_cast<double>(off)) > 1e-6) throw ConfigError("coarse_grain: grids not aligned");
    offsets.push_back(off);
    const auto floor_div = [](Eigen::Index a, Eigen::Index b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    const Eigen::Index first = -floor_div(off, ppp);
    const Eigen::Index last = floor_div(g.size() - w.grid.size() - off, ppp);
    lo_site = std::max(lo_site, first);
    hi_site = std::min(hi_site, last);
    out.bands.push_back(w.band);
  }
  if (hi_site < lo_site) throw ConfigError("coarse_grain: Wannier window larger than the state grid");
  out.first_site = static_cast<int>(lo_site);
  out.amplitudes.resize(static_cast<Eigen::Index>(home.size()), hi_site - lo_site + 1);
  const auto& psi = state.components[0];
  for (std::size_t b = 0; b < home.size(); ++b) {
    const auto& w = home[b].samples;
    for (Eigen::Index n = lo_site; n <= hi_site; ++n)
      out.amplitudes(static_cast<Eigen::Index>(b), n - lo_site) =
          w.dot(psi.segment(offsets[b] + n * ppp, w.size())) * g.dx();
  }
  return out;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> band_envelopes(const WaveState& state,
                                                             const LatticeParams& params,
                                                             const PlaneWaveBasis& basis,
                                                             double kappa_ref) {
  if (state.is_spinor()) throw ConfigError("band_envelopes: scalar state required");
  const auto& g = state.grid;
  const Eigen::Index periods = whole_periods_or_throw(g, "band_envelopes");
  Fft fft(g.size());
  const Eigen::VectorXcd spec = absolute_spectrum(state.components[0], g, fft);
  const auto ref = solve_bloch(params, kappa_ref, basis, 3);
  Eigen::VectorXcd lower = Eigen::VectorXcd::Zero(g.size());
  Eigen::VectorXcd upper = Eigen::VectorXcd::Zero(g.size());
  const double total = spec.squaredNorm();
  for (Eigen::Index r = -periods / 2; r < periods - periods / 2; ++r) {
    const Eigen::VectorXcd v = bloch_slice(spec, r, periods, basis);
    if (v.squaredNorm() < 1e-30 * total) continue;
    const double kappa = 2.0 * static_cast<double>(r) / static_cast<double>(periods);
    const auto eig = solve_bloch(params, kappa, basis, 3);
    // Unfold into [kappa_ref - 1, kappa_ref + 1) so a packet straddling the zone edge stays smooth.
    Eigen::Index m = 0;
    if (kappa < kappa_ref - 1.0) m = 1;
    if (kappa >= kappa_ref + 1.0) m = -1;
    const double kappa_u = kappa + 2.0 * static_cast<double>(m);
    const Eigen::Index q = mode_index(r + m * periods, g.size());
    const Eigen::Index nb = basis.size();
    for (int a : {1, 2}) {
      Eigen::VectorXcd c = eig[static_cast<std::size_t>(a)].coeffs;
      const auto& cr = ref[static_cast<std::size_t>(a)].coeffs;
      cd o = 0.0;
      for (Eigen::Index i = std::max<Eigen::Index>(0, -m); i < std::min(nb, nb - m); ++i)
        o += std::conj(c[i + m]) * cr[i];
      if (std::abs(o) > 0.0) c *= o / std::abs(o);
      const cd amp = c.dot(v) * std::polar(1.0, kappa_u * g.x_min());
      (a == 1 ? lower : upper)[q] = amp;
    }
  }
  return {fft.inverse(lower), fft.inverse(upper)};
}

WaveState dirac_initial_state(const WaveState& schrodinger, const LatticeParams& params,
                              const PlaneWaveBasis& basis, const DiracParams& dirac, double kappa0) {
  auto [lower, upper] = band_envelopes(schrodinger, params, basis, kappa0);
  const double t = mixing_angle(dirac, kappa0);
  const double c = std::cos(t), s = std::sin(t);
  Eigen::VectorXcd psi1 = c * upper - s * lower;
  Eigen::VectorXcd psi2 = s * upper + c * lower;
  return WaveState::spinor(schrodinger.grid, std::move(psi1), std::move(psi2));
}

Observables observables(const WaveState& state, double x_cut) {
  const Eigen::VectorXd rho = state.density();
  const Eigen::VectorXd x = state.grid.points();
  const double total = rho.sum();
  Observables o;
  o.time = state.time;
  o.norm = total * state.grid.dx();
  o.center = x.dot(rho) / total;
  o.width = std::sqrt(std::max(0.0, x.cwiseAbs2().dot(rho) / total - o.center * o.center));
  double beyond = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    if (x[i] > x_cut) beyond += rho[i];
  o.transmitted = beyond / total;
  return o;
}

Observables observables(const WaveState& state, double x_cut, const LatticeParams& params,
                        const PlaneWaveBasis& basis, int n_bands) {
  Observables o = observables(state, x_cut);
  o.populations = band_populations(state, params, basis, n_bands);
  return o;
}

double edge_density_ratio(const WaveState& state, double margin) {
  const Eigen::VectorXd rho = state.density();
  double edge = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double x = state.grid.x(i);
    if (x < state.grid.x_min() + margin || x >= state.grid.x_max() - margin) edge = std::max(edge, rho[i]);
  }
  return edge / rho.maxCoeff();
}

}  // namespace bichro
