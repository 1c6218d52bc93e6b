#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bichro {

/// Flat key-value run configuration. Every key has a default; unknown keys are rejected.
class RunConfig {
 public:
  enum class Kind { Real, Integer, RealList, PhaseList, Flag };
  struct Key {
    std::string name;
    Kind kind;
    std::string fallback;
    std::string help;
  };

  RunConfig();

  static const std::vector<Key>& keys();

  /// Validates and stores a value. Accepts '-' in place of '_' in key names.
  void set(const std::string& key, const std::string& value);
  /// Reads `key = value` lines; blank lines and `#` comments are skipped.
  void load_file(const std::filesystem::path& path);

  const std::string& raw(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;

  /// `key = value` for every key in declaration order.
  std::vector<std::string> echo() const;

 private:
  const Key& lookup(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

/// Parses a phase such as `0.8`, `0.8pi`, `pi` or `-pi`.
double parse_phase(const std::string& text);
/// Compact label for a phase: `0.8000pi`.
std::string phase_tag(double phi);

}  // namespace bichro
