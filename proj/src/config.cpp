#include "bichro/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bichro/errors.hpp"

namespace bichro {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string normalise(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
  return out;
}

}  // namespace

const std::vector<RunConfig::Key>& RunConfig::keys() {
  static const std::vector<Key> k = {
      {"v1", Kind::Real, "5", "primary lattice depth [E_R]"},
      {"v2", Kind::Real, "1.56", "secondary lattice depth [E_R]"},
      {"phi", Kind::PhaseList, "0,0.8pi,pi", "relative phases; 'pi' suffix allowed"},
      {"cutoff", Kind::Integer, "16", "plane waves n in [-cutoff, cutoff]"},
      {"n_kappas", Kind::Integer, "129", "quasimomentum grid points over [-1, 1]"},
      {"n_bands", Kind::Integer, "5", "bands computed"},
      {"fit_window", Kind::Real, "0.3", "Dirac fit window |kappa| <= w"},
      {"sweep_points", Kind::Integer, "21", "fit-sweep phases over [0, pi]"},
      {"wannier_grid", Kind::Integer, "64", "Wannier samples per period"},
      {"max_site", Kind::Integer, "3", "sites checked for orthonormality"},
      {"table_kappas", Kind::Integer, "385", "quasimomentum points for matrix-elements"},
      {"max_offset", Kind::Integer, "2", "matrix-element site offsets"},
      {"v1_sweep", Kind::RealList, "4,6,8,10", "V1 values for matrix-elements (V2/V1 fixed)"},
      {"dt", Kind::Real, "0.001", "time step [hbar/E_R]"},
      {"grid_per_period", Kind::Integer, "32", "propagation grid points per period"},
      {"periods", Kind::Integer, "1024", "propagation box length in periods"},
      {"t_final", Kind::Real, "80", "propagation time [hbar/E_R]"},
      {"stride", Kind::Integer, "100", "steps between snapshots"},
      {"decimation", Kind::Integer, "16", "grid points skipped in density files"},
      {"frames", Kind::Flag, "true", "write per-snapshot density files"},
      {"band", Kind::Integer, "2", "packet band"},
      {"kappa0", Kind::Real, "0.95", "packet quasimomentum"},
      {"sigma", Kind::Real, "17", "packet envelope width [1/k0]"},
      {"x0", Kind::Real, "40", "packet centre [1/k0]"},
      {"trap_depth", Kind::Real, "19.77", "dipole trap depth V0 [E_R]"},
      {"trap_waist", Kind::Real, "157", "dipole trap waist W0 [1/k0]"},
      {"tilt", Kind::Real, "0.076", "linear tilt F [E_R k0]"},
      {"sigmas", Kind::RealList, "8,17,34", "envelope widths for slater-check"},
      {"taylor_order", Kind::Integer, "2", "order of the effective band operator"},
      {"slater_sites", Kind::Integer, "512", "sites in the slater-check lattice"},
  };
  return k;
}

RunConfig::RunConfig() {
  for (const auto& k : keys()) values_[k.name] = k.fallback;
}

const RunConfig::Key& RunConfig::lookup(const std::string& key) const {
  const std::string name = normalise(key);
  for (const auto& k : keys())
    if (k.name == name) return k;
  throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const Key& k = lookup(key);
  const std::string v = trim(value);
  switch (k.kind) {
    case Kind::Real:
      parse_real(v, k.name);
      break;
    case Kind::Integer: {
      int i = 0;
      const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
      if (v.empty() || ec != std::errc() || end != v.data() + v.size())
        throw ConfigError("config: '" + k.name + "' expects an integer, got '" + value + "'");
      break;
    }
    case Kind::RealList:
      for (const auto& item : split(v)) parse_real(item, k.name);
      break;
    case Kind::PhaseList:
      for (const auto& item : split(v)) parse_phase(item);
      break;
    case Kind::Flag:
      if (v != "true" && v != "false") throw ConfigError("config: '" + k.name + "' expects true or false");
      break;
  }
  values_[k.name] = v;
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file " + path.string());
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
}

const std::string& RunConfig::raw(const std::string& key) const { return values_.at(lookup(key).name); }

double RunConfig::real(const std::string& key) const { return parse_real(raw(key), key); }

int RunConfig::integer(const std::string& key) const { return std::stoi(raw(key)); }

bool RunConfig::flag(const std::string& key) const { return raw(key) == "true"; }

std::vector<double> RunConfig::list(const std::string& key) const {
  const Key& k = lookup(key);
  std::vector<double> out;
  for (const auto& item : split(raw(key)))
    out.push_back(k.kind == Kind::PhaseList ? parse_phase(item) : parse_real(item, k.name));
  return out;
}

std::vector<std::string> RunConfig::echo() const {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.name + " = " + values_.at(k.name));
  return out;
}

double parse_phase(const std::string& text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    std::string factor = trim(t.substr(0, t.size() - 2));
    if (factor.empty() || factor == "+") factor = "1";
    if (factor == "-") factor = "-1";
    if (!factor.empty() && factor.back() == '*') factor.pop_back();
    return parse_real(factor, "phi") * std::numbers::pi;
  }
  return parse_real(t, "phi");
}

std::string phase_tag(double phi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4fpi", phi / std::numbers::pi);
  return buf;
}

}  // namespace bichro
