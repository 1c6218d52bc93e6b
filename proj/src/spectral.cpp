#ifdef BICHRO_USE_FFTW
#define EIGEN_FFTW_DEFAULT
#endif
#include <unsupported/Eigen/FFT>

#include "bichro/spectral.hpp"

namespace bichro {

struct Fft::Impl {
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> in;
  std::vector<std::complex<double>> out;
};

Fft::Fft(Eigen::Index n) : n_(n), impl_(std::make_unique<Impl>()) {
  impl_->in.resize(static_cast<std::size_t>(n));
  impl_->out.resize(static_cast<std::size_t>(n));
}
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  std::copy(in.data(), in.data() + n_, impl_->in.begin());
  impl_->engine.fwd(impl_->out, impl_->in);
  out.resize(n_);
  std::copy(impl_->out.begin(), impl_->out.end(), out.data());
}

void Fft::inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  std::copy(in.data(), in.data() + n_, impl_->in.begin());
  impl_->engine.inv(impl_->out, impl_->in);
  out.resize(n_);
  std::copy(impl_->out.begin(), impl_->out.end(), out.data());
}

}  // namespace bichro
