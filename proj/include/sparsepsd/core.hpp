// Domain types shared by every sparsepsd module.
//
// Tensor layout convention: a field indexed (source n, bin k) is an N x L
// row-major matrix, so row n holds the L frequency samples of source n.
// Trial-indexed complex fields are a std::vector of such matrices.
// All indices are 0-based.
#ifndef SPARSEPSD_CORE_HPP_
#define SPARSEPSD_CORE_HPP_

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sparsepsd {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RowMatrixXd = RowMatrix<double>;
using RowMatrixXcd = RowMatrix<Complex>;

inline constexpr double kPi = 3.14159265358979323846;

// Numerical failure inside an iterative method; names the offending block.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& block)
      : std::runtime_error("non-finite values in block '" + block + "'"), block_(block) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

class DegenerateCovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingDefaultError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid f_k = (k - L/2) / L, k = 0..L-1, covering [-1/2, 1/2).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(Index bins);

  Index size() const { return bins_; }
  double operator[](Index k) const { return f_[k]; }
  const Eigen::VectorXd& frequencies() const { return f_; }

 private:
  Index bins_ = 0;
  Eigen::VectorXd f_;
};

/// Throws std::invalid_argument unless L is even and >= 2.
FrequencyGrid make_frequency_grid(Index bins);

struct RadarParams {
  Index elements = 128;       // M
  double lambda_cw = 0.0318;  // carrier wavelength [m]
  double delta = 0.0165;      // element spacing [m]
  double T = 4e-4;            // pulse repetition time [s]
  double noise_std = 1.5811388300841898;  // sqrt(2.5), per complex entry

  void validate() const;
};

/// a(theta)_m = exp(-i 2 pi m delta sin(theta) / lambda_cw), m = 0..M-1.
Eigen::VectorXcd steering_vector(double theta, const RadarParams& params);

/// Columns are steering vectors: M x N.
Eigen::MatrixXcd steering_matrix(const Eigen::VectorXd& thetas, const RadarParams& params);

/// Ground-truth description of one simulated PAWR range cell.
struct Scenario {
  Eigen::VectorXd theta;          // radians, size N
  Eigen::VectorXd power;          // P_n, linear units
  Eigen::VectorXd mean_doppler;   // mu_n [Hz]
  Eigen::VectorXd doppler_width;  // varsigma_n [Hz]
  RadarParams radar;
  FrequencyGrid grid;
  Index trials = 1;  // J
  std::uint64_t rng_seed = 0;

  Index sources() const { return theta.size(); }
  Index bins() const { return grid.size(); }
  void validate() const;
};

/// J observed vectors y_j of length d; for PAWR d = M L with snapshot l
/// occupying entries [l M, (l + 1) M).
struct ObservationSet {
  std::vector<Eigen::VectorXcd> y;

  Index trials() const { return static_cast<Index>(y.size()); }
  Index length() const { return y.empty() ? 0 : y.front().size(); }
  void validate() const;
};

/// Complex tensor u(j, n, k): one N x L matrix per trial.
struct SpectralCoefficients {
  std::vector<RowMatrixXcd> u;

  SpectralCoefficients() = default;
  SpectralCoefficients(Index trials, Index sources, Index bins);

  Index trials() const { return static_cast<Index>(u.size()); }
  Index sources() const { return u.empty() ? 0 : u.front().rows(); }
  Index bins() const { return u.empty() ? 0 : u.front().cols(); }
  Complex operator()(Index j, Index n, Index k) const { return u[j](n, k); }
  Complex& operator()(Index j, Index n, Index k) { return u[j](n, k); }
  bool all_finite() const;
};

/// Nonnegative latent field sigma(n, k).
struct SigmaField {
  RowMatrixXd sigma;
};

/// PSD samples S(n, k) on the frequency grid.
struct PsdEstimate {
  RowMatrixXd S;

  Index sources() const { return S.rows(); }
  Index bins() const { return S.cols(); }
};

enum class SynthesisKind { DFT, WindowedDFT };

std::string to_string(SynthesisKind kind);
SynthesisKind parse_synthesis_kind(const std::string& name);

struct SolverConfig {
  double lambda = 0.0;
  double alpha = 0.0;
  int r = 2;
  double gamma = 1.0;
  int max_iter = 3000;
  double tol_primal = 1e-5;
  double tol_dual = 1e-5;
  SynthesisKind synthesis_kind = SynthesisKind::DFT;
  bool record_objective = true;

  void validate() const;
};

inline double degrees_to_radians(double deg) { return deg * kPi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / kPi; }

}  // namespace sparsepsd

#endif  // SPARSEPSD_CORE_HPP_
