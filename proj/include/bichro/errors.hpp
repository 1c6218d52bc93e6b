#pragma once

#include <stdexcept>
#include <string>

namespace bichro {

/// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigensolver failure, norm drift, fit failure, packet hitting the box edge. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A band touches a neighbour somewhere on the quasimomentum grid.
class DegenerateBandError : public NumericError {
 public:
  DegenerateBandError(const std::string& what, double kappa)
      : NumericError(what), kappa_(kappa) {}
  double kappa() const { return kappa_; }

 private:
  double kappa_;
};

/// File system failures. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bichro
