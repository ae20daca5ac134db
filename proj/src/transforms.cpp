#include "sparsepsd/transforms.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

namespace sparsepsd {
namespace {

// Eigen::FFT caches twiddles per size and is not safe to share across threads.
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

// Centered grid bin k corresponds to standard FFT bin (k + L/2) mod L; with L
// even the same shift maps back.
void centered_forward(const Complex* x, Complex* u, Index L, Complex* work) {
  fft_engine().fwd(work, x, L);
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  const Index half = L / 2;
  for (Index k = 0; k < L; ++k) u[k] = work[(k + half) % L] * scale;
}

void centered_inverse(const Complex* u, Complex* x, Index L, Complex* work) {
  const Index half = L / 2;
  for (Index m = 0; m < L; ++m) work[m] = u[(m + half) % L];
  fft_engine().inv(x, work, L);
  const double scale = std::sqrt(static_cast<double>(L));
  for (Index l = 0; l < L; ++l) x[l] *= scale;
}

void check_bins(Index bins) {
  if (bins < 2 || bins % 2 != 0) {
    throw std::invalid_argument("transform length must be even and >= 2, got " +
                                std::to_string(bins));
  }
}

}  // namespace

Eigen::VectorXcd dft_analyze(const Eigen::VectorXcd& x) {
  check_bins(x.size());
  Eigen::VectorXcd u(x.size()), work(x.size());
  centered_forward(x.data(), u.data(), x.size(), work.data());
  return u;
}

Eigen::VectorXcd dft_synthesize(const Eigen::VectorXcd& u) {
  check_bins(u.size());
  Eigen::VectorXcd x(u.size()), work(u.size());
  centered_inverse(u.data(), x.data(), u.size(), work.data());
  return x;
}

Eigen::VectorXd hamming_window(Index bins) {
  check_bins(bins);
  Eigen::VectorXd w(bins);
  for (Index l = 0; l < bins; ++l) {
    w[l] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(l) / static_cast<double>(bins - 1));
  }
  w *= std::sqrt(static_cast<double>(bins)) / w.norm();
  return w;
}

SynthesisOperator::SynthesisOperator(SynthesisKind kind, Index bins)
    : kind_(kind), bins_(bins) {
  check_bins(bins);
  window_ = kind == SynthesisKind::DFT ? Eigen::VectorXd::Ones(bins) : hamming_window(bins);
  nu_ = window_.array().square().inverse().matrix();
}

SynthesisOperator::SynthesisOperator(Eigen::VectorXd window)
    : kind_(SynthesisKind::WindowedDFT), bins_(window.size()), window_(std::move(window)) {
  check_bins(bins_);
  if ((window_.array() <= 0.0).any()) throw std::invalid_argument("window must be positive");
  nu_ = window_.array().square().inverse().matrix();
}

void SynthesisOperator::check(const Eigen::VectorXcd& v) const {
  if (v.size() != bins_) {
    throw std::invalid_argument("length " + std::to_string(v.size()) +
                                " does not match synthesis operator length " +
                                std::to_string(bins_));
  }
}

Eigen::VectorXcd SynthesisOperator::synthesize(const Eigen::VectorXcd& u) const {
  check(u);
  Eigen::VectorXcd x = dft_synthesize(u);
  if (kind_ == SynthesisKind::WindowedDFT) x.array() /= window_.array();
  return x;
}

Eigen::VectorXcd SynthesisOperator::adjoint(const Eigen::VectorXcd& x) const {
  check(x);
  if (kind_ == SynthesisKind::DFT) return dft_analyze(x);
  Eigen::VectorXcd scaled = x.array() / window_.array();
  return dft_analyze(scaled);
}

Eigen::VectorXcd SynthesisOperator::analyze(const Eigen::VectorXcd& x) const {
  check(x);
  if (kind_ == SynthesisKind::DFT) return dft_analyze(x);
  Eigen::VectorXcd weighted = x.array() * window_.array();
  return dft_analyze(weighted);
}

Eigen::VectorXcd SynthesisOperator::solve_shifted_gram(double c, const Eigen::VectorXcd& b) const {
  check(b);
  if (!(c > 0.0)) throw std::invalid_argument("solve_shifted_gram: shift must be positive");
  Eigen::VectorXcd Gb = synthesize(b);
  Gb.array() /= (c + nu_.array());
  return (b - adjoint(Gb)) / c;
}

RowMatrixXcd SynthesisOperator::synthesize_rows(const RowMatrixXcd& u) const {
  if (u.cols() != bins_) throw std::invalid_argument("synthesize_rows: bin count mismatch");
  RowMatrixXcd x(u.rows(), u.cols());
  Eigen::VectorXcd work(bins_);
  for (Index n = 0; n < u.rows(); ++n) {
    Complex* out = x.row(n).data();
    centered_inverse(u.row(n).data(), out, bins_, work.data());
    if (kind_ == SynthesisKind::WindowedDFT) {
      for (Index l = 0; l < bins_; ++l) out[l] /= window_[l];
    }
  }
  return x;
}

RowMatrixXcd SynthesisOperator::adjoint_rows(const RowMatrixXcd& x) const {
  if (x.cols() != bins_) throw std::invalid_argument("adjoint_rows: bin count mismatch");
  RowMatrixXcd u(x.rows(), x.cols());
  Eigen::VectorXcd work(bins_), scaled(bins_);
  for (Index n = 0; n < x.rows(); ++n) {
    const Complex* in = x.row(n).data();
    if (kind_ == SynthesisKind::WindowedDFT) {
      for (Index l = 0; l < bins_; ++l) scaled[l] = in[l] / window_[l];
      in = scaled.data();
    }
    centered_forward(in, u.row(n).data(), bins_, work.data());
  }
  return u;
}

RowMatrixXcd SynthesisOperator::analyze_rows(const RowMatrixXcd& x) const {
  if (x.cols() != bins_) throw std::invalid_argument("analyze_rows: bin count mismatch");
  RowMatrixXcd u(x.rows(), x.cols());
  Eigen::VectorXcd work(bins_), scaled(bins_);
  for (Index n = 0; n < x.rows(); ++n) {
    const Complex* in = x.row(n).data();
    if (kind_ == SynthesisKind::WindowedDFT) {
      for (Index l = 0; l < bins_; ++l) scaled[l] = in[l] * window_[l];
      in = scaled.data();
    }
    centered_forward(in, u.row(n).data(), bins_, work.data());
  }
  return u;
}

RowMatrixXcd SynthesisOperator::solve_shifted_gram_rows(double c, const RowMatrixXcd& b) const {
  RowMatrixXcd Gb = synthesize_rows(b);
  for (Index n = 0; n < Gb.rows(); ++n) Gb.row(n).array() /= (c + nu_.array()).transpose();
  return (b - adjoint_rows(Gb)) / c;
}

DifferenceOperator::DifferenceOperator(Index bins, int order) : bins_(bins), order_(order) {
  if (bins < 2) throw std::invalid_argument("difference operator needs L >= 2");
  if (order < 1) throw std::invalid_argument("difference order must be >= 1");
  eig2_.resize(bins);
  inverse_spectrum_.resize(bins);
  for (Index k = 0; k < bins; ++k) {
    eig2_[k] = 2.0 - 2.0 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(bins));
    inverse_spectrum_[k] = 1.0 / (1.0 + std::pow(eig2_[k], order));
  }
}

Eigen::VectorXd DifferenceOperator::apply(const Eigen::VectorXd& s) const {
  if (s.size() != bins_) throw std::invalid_argument("apply_difference: length mismatch");
  Eigen::VectorXd cur = s, next(bins_);
  for (int p = 0; p < order_; ++p) {
    for (Index k = 0; k + 1 < bins_; ++k) next[k] = cur[k + 1] - cur[k];
    next[bins_ - 1] = cur[0] - cur[bins_ - 1];
    cur.swap(next);
  }
  return cur;
}

Eigen::VectorXd DifferenceOperator::apply_transpose(const Eigen::VectorXd& s) const {
  if (s.size() != bins_) throw std::invalid_argument("apply_difference: length mismatch");
  Eigen::VectorXd cur = s, next(bins_);
  for (int p = 0; p < order_; ++p) {
    next[0] = cur[bins_ - 1] - cur[0];
    for (Index k = 1; k < bins_; ++k) next[k] = cur[k - 1] - cur[k];
    cur.swap(next);
  }
  return cur;
}

Eigen::VectorXd DifferenceOperator::solve_identity_plus_gram(const Eigen::VectorXd& b) const {
  if (b.size() != bins_) throw std::invalid_argument("difference solve: length mismatch");
  Eigen::VectorXcd buf = b.cast<Complex>(), spec(bins_);
  auto& fft = fft_engine();
  fft.fwd(spec.data(), buf.data(), bins_);
  spec.array() *= inverse_spectrum_.array();
  fft.inv(buf.data(), spec.data(), bins_);
  return buf.real();
}

RowMatrixXd DifferenceOperator::apply_rows(const RowMatrixXd& s) const {
  RowMatrixXd out(s.rows(), s.cols());
  for (Index n = 0; n < s.rows(); ++n) out.row(n) = apply(s.row(n).transpose()).transpose();
  return out;
}

RowMatrixXd DifferenceOperator::apply_transpose_rows(const RowMatrixXd& s) const {
  RowMatrixXd out(s.rows(), s.cols());
  for (Index n = 0; n < s.rows(); ++n) {
    out.row(n) = apply_transpose(s.row(n).transpose()).transpose();
  }
  return out;
}

RowMatrixXd DifferenceOperator::solve_identity_plus_gram_rows(const RowMatrixXd& b) const {
  RowMatrixXd out(b.rows(), b.cols());
  for (Index n = 0; n < b.rows(); ++n) {
    out.row(n) = solve_identity_plus_gram(b.row(n).transpose()).transpose();
  }
  return out;
}

namespace dense {

Eigen::MatrixXcd dft_matrix(Index bins) {
  if (bins > 64) throw std::invalid_argument("dense oracle limited to L <= 64");
  const FrequencyGrid grid(bins);
  Eigen::MatrixXcd F(bins, bins);
  const double scale = 1.0 / std::sqrt(static_cast<double>(bins));
  for (Index k = 0; k < bins; ++k) {
    for (Index l = 0; l < bins; ++l) {
      F(k, l) = std::polar(scale, -2.0 * kPi * grid[k] * static_cast<double>(l));
    }
  }
  return F;
}

Eigen::MatrixXcd synthesis_matrix(const SynthesisOperator& G) {
  Eigen::MatrixXcd FH = dft_matrix(G.bins()).adjoint();
  return G.window().cwiseInverse().asDiagonal() * FH;
}

Eigen::MatrixXd difference_matrix(Index bins, int order) {
  if (bins > 64) throw std::invalid_argument("dense oracle limited to L <= 64");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(bins, bins);
  for (Index k = 0; k < bins; ++k) {
    D(k, k) = -1.0;
    D(k, (k + 1) % bins) += 1.0;
  }
  Eigen::MatrixXd Dr = Eigen::MatrixXd::Identity(bins, bins);
  for (int p = 0; p < order; ++p) Dr = D * Dr;
  return Dr;
}

}  // namespace dense

}  // namespace sparsepsd
