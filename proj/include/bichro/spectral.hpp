#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>

namespace bichro {

/// Forward/inverse complex FFT of fixed size. Inverse is scaled by 1/n.
/// Backed by Eigen's FFT module (FFTW backend when available).
class Fft {
 public:
  explicit Fft(Eigen::Index n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  Eigen::Index size() const { return n_; }
  void forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
  void inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

  Eigen::VectorXcd forward(const Eigen::VectorXcd& in) {
    Eigen::VectorXcd out(n_);
    forward(in, out);
    return out;
  }
  Eigen::VectorXcd inverse(const Eigen::VectorXcd& in) {
    Eigen::VectorXcd out(n_);
    inverse(in, out);
    return out;
  }

 private:
  struct Impl;
  Eigen::Index n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bichro
