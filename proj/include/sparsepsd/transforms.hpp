// Synthesis operators G, circular difference operators D^r and the structured
// linear solves built on them. All FFT bin reordering lives in transforms.cpp.
#ifndef SPARSEPSD_TRANSFORMS_HPP_
#define SPARSEPSD_TRANSFORMS_HPP_

#include "sparsepsd/core.hpp"

namespace sparsepsd {

/// Normalized DFT on the centered grid: (F x)_k = L^{-1/2} sum_l x_l exp(-i 2 pi f_k l).
Eigen::VectorXcd dft_analyze(const Eigen::VectorXcd& x);

/// F^H u, the inverse of dft_analyze.
Eigen::VectorXcd dft_synthesize(const Eigen::VectorXcd& u);

/// Symmetric Hamming window 0.54 - 0.46 cos(2 pi l / (L - 1)), rescaled to norm sqrt(L).
Eigen::VectorXd hamming_window(Index bins);

/// G = F^H (DFT) or W^{-1} F^H (windowed DFT). G G^H = diag(nu).
class SynthesisOperator {
 public:
  SynthesisOperator(SynthesisKind kind, Index bins);
  /// Windowed DFT with an explicit positive window.
  explicit SynthesisOperator(Eigen::VectorXd window);

  SynthesisKind kind() const { return kind_; }
  Index bins() const { return bins_; }
  const Eigen::VectorXd& window() const { return window_; }
  const Eigen::VectorXd& nu() const { return nu_; }

  /// G u
  Eigen::VectorXcd synthesize(const Eigen::VectorXcd& u) const;
  /// G^H x
  Eigen::VectorXcd adjoint(const Eigen::VectorXcd& x) const;
  /// G^{-1} x = F W x (F x for the DFT kind)
  Eigen::VectorXcd analyze(const Eigen::VectorXcd& x) const;
  /// (c I + G^H G)^{-1} b via G G^H = diag(nu); c > 0.
  Eigen::VectorXcd solve_shifted_gram(double c, const Eigen::VectorXcd& b) const;
  /// (I + G^H G)^{-1} b = b - G^H diag(1 / (1 + nu)) G b
  Eigen::VectorXcd solve_identity_plus_gram(const Eigen::VectorXcd& b) const {
    return solve_shifted_gram(1.0, b);
  }

  /// Row-wise application to an N x L field.
  RowMatrixXcd synthesize_rows(const RowMatrixXcd& u) const;
  RowMatrixXcd adjoint_rows(const RowMatrixXcd& x) const;
  RowMatrixXcd analyze_rows(const RowMatrixXcd& x) const;
  RowMatrixXcd solve_shifted_gram_rows(double c, const RowMatrixXcd& b) const;

 private:
  void check(const Eigen::VectorXcd& v) const;

  SynthesisKind kind_;
  Index bins_;
  Eigen::VectorXd window_;  // ones for the DFT kind
  Eigen::VectorXd nu_;
};

inline Eigen::VectorXcd synthesize(const SynthesisOperator& G, const Eigen::VectorXcd& u) {
  return G.synthesize(u);
}
inline Eigen::VectorXcd solve_identity_plus_gram(const SynthesisOperator& G,
                                                 const Eigen::VectorXcd& b) {
  return G.solve_identity_plus_gram(b);
}

/// D^r with D the circulant first difference (D s)_k = s_{k+1} - s_k (wrapping).
class DifferenceOperator {
 public:
  DifferenceOperator(Index bins, int order);

  Index bins() const { return bins_; }
  int order() const { return order_; }
  /// |lambda_k|^2 = 2 - 2 cos(2 pi k / L), the squared eigenvalue moduli of D.
  const Eigen::VectorXd& eigenvalue_moduli_squared() const { return eig2_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& s) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& s) const;
  /// (I + (D^r)^T D^r)^{-1} b by FFT diagonalization.
  Eigen::VectorXd solve_identity_plus_gram(const Eigen::VectorXd& b) const;

  RowMatrixXd apply_rows(const RowMatrixXd& s) const;
  RowMatrixXd apply_transpose_rows(const RowMatrixXd& s) const;
  RowMatrixXd solve_identity_plus_gram_rows(const RowMatrixXd& b) const;

 private:
  Index bins_;
  int order_;
  Eigen::VectorXd eig2_;
  Eigen::VectorXd inverse_spectrum_;  // 1 / (1 + |lambda_k|^{2r})
};

inline Eigen::VectorXd apply_difference(const DifferenceOperator& D, const Eigen::VectorXd& s) {
  return D.apply(s);
}
inline Eigen::VectorXd solve_identity_plus_diff_gram(const DifferenceOperator& D,
                                                     const Eigen::VectorXd& b) {
  return D.solve_identity_plus_gram(b);
}

/// Explicit matrices for oracle tests; L <= 64.
namespace dense {
Eigen::MatrixXcd dft_matrix(Index bins);
Eigen::MatrixXcd synthesis_matrix(const SynthesisOperator& G);
Eigen::MatrixXd difference_matrix(Index bins, int order);
}  // namespace dense

}  // namespace sparsepsd

#endif  // SPARSEPSD_TRANSFORMS_HPP_
