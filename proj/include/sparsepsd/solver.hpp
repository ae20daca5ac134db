// Joint estimator of block-sparse frequency components u and a smooth latent
// field sigma whose square is the PSD estimate:
//
//   min_{u, sigma >= 0}  1/2 sum_j |y_j - sum_n A_n G u_{j,n}|^2
//                        + lambda sum_{n,k} phi((u_{j,n}[k])_j, sigma_n[k])
//   s.t.                 sum_n |D^r sigma_n|_1 <= alpha
//
// solved by ADMM with splitting x = G u, u~ = u, sigma~ = sigma, eta = D^r sigma.
#ifndef SPARSEPSD_SOLVER_HPP_
#define SPARSEPSD_SOLVER_HPP_

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "sparsepsd/core.hpp"
#include "sparsepsd/transforms.hpp"

namespace sparsepsd {

/// The linear observation operator x -> sum_n A_n x_n with a cached
/// factorization of I + gamma A^H A.
class MixingModel {
 public:
  enum class Kind { PAWR, GenericDense };

  /// A_n = blockdiag(a(theta_n), ..., a(theta_n)) with L copies; steering is M x N.
  static MixingModel pawr(Eigen::MatrixXcd steering, Index bins);
  /// Arbitrary A_n blocks, each d x L.
  static MixingModel generic(const std::vector<Eigen::MatrixXcd>& blocks);

  Kind kind() const { return kind_; }
  Index sources() const { return sources_; }
  Index bins() const { return bins_; }
  Index data_length() const { return data_length_; }
  const Eigen::MatrixXcd& steering() const { return steering_; }

  void factorize(double gamma);
  std::optional<double> factorized_gamma() const { return gamma_; }

  /// sum_n A_n x_n for x stored N x L.
  Eigen::VectorXcd apply(const RowMatrixXcd& x) const;
  /// A^H y arranged N x L.
  RowMatrixXcd adjoint(const Eigen::VectorXcd& y) const;
  /// argmin_x gamma/2 |y - A x|^2 + 1/2 |b - x|^2 given Ahy = A^H y; all N x L.
  RowMatrixXcd fidelity_step(const RowMatrixXcd& Ahy, const RowMatrixXcd& b, double gamma) const;
  /// The full d x NL matrix [A_1, ..., A_N].
  Eigen::MatrixXcd materialize() const;

 private:
  void require_factorization(double gamma) const;

  Kind kind_ = Kind::PAWR;
  Index sources_ = 0;
  Index bins_ = 0;
  Index data_length_ = 0;
  Eigen::MatrixXcd steering_;  // PAWR: M x N
  Eigen::MatrixXcd dense_;     // generic: d x NL
  std::optional<double> gamma_;
  Eigen::LLT<Eigen::MatrixXcd> factor_;
};

/// Closed-form PAWR data-fidelity step on L x N matrices:
/// (gamma Y_j^T S^* + G U_j + Q_j)(I_N + gamma S^T S^*)^{-1}.
Eigen::MatrixXcd data_fidelity_step_pawr(const MixingModel& mixing, const Eigen::VectorXcd& y,
                                         const Eigen::MatrixXcd& Gu_plus_q, double gamma);

/// Every Algorithm-1 block. Complex blocks are (J) x (N x L); real blocks N x L.
struct AdmmState {
  std::vector<RowMatrixXcd> u, x, u_tilde, q, r;
  RowMatrixXd sigma, sigma_tilde, eta, tau, zeta;
  Index iteration = 0;

  static AdmmState zeros(Index trials, Index sources, Index bins);
};

/// Precomputed, immutable data for one proposed-model solve.
class ProposedProblem {
 public:
  ProposedProblem(const ObservationSet& observations, MixingModel mixing, const SolverConfig& config);

  const ObservationSet& observations() const { return observations_; }
  const MixingModel& mixing() const { return mixing_; }
  const SynthesisOperator& synthesis() const { return G_; }
  const DifferenceOperator& difference() const { return D_; }
  const SolverConfig& config() const { return config_; }
  const RowMatrixXcd& adjoint_data(Index j) const { return Ahy_[static_cast<std::size_t>(j)]; }
  Index trials() const { return observations_.trials(); }

 private:
  ObservationSet observations_;
  MixingModel mixing_;
  SolverConfig config_;
  SynthesisOperator G_;
  DifferenceOperator D_;
  std::vector<RowMatrixXcd> Ahy_;
};

struct IterationResiduals {
  // |Gu - x|, |u - u~|, |sigma - sigma~|, |D^r sigma - eta|
  std::array<double, 4> primal{};
  std::array<double, 4> primal_scale{};
  double dual = 0.0;  // change of (x, u~, sigma~, eta) over the sweep
  double dual_scale = 1.0;

  double primal_relative() const;
  double dual_relative() const { return dual / dual_scale; }
};

/// One full sweep of the ADMM iteration; updates state in place.
IterationResiduals admm_iterate(AdmmState& state, const ProposedProblem& problem);

struct SolveDiagnostics {
  std::vector<double> objective;
  std::vector<std::array<double, 4>> primal_residuals;
  std::vector<double> dual_residuals;
  Index iterations = 0;
  bool converged = false;
};

struct SolveResult {
  SpectralCoefficients u_hat;
  SigmaField sigma_hat;
  PsdEstimate psd;
  SolveDiagnostics diagnostics;
  double final_objective = 0.0;
};

/// Shared ADMM loop: calls step() until the primal and dual tests both pass
/// or max_iter sweeps have run. objective() is sampled after every sweep when
/// cfg.record_objective is set.
SolveDiagnostics drive_admm(const SolverConfig& cfg, const std::function<IterationResiduals()>& step,
                            const std::function<double()>& objective);

/// Data term plus lambda * sum phi; +inf when the D^r budget is exceeded
/// (slack 1e-9 max(1, alpha)) or any phi term is infinite.
double objective(const SpectralCoefficients& u, const SigmaField& sigma,
                 const ObservationSet& observations, const MixingModel& mixing,
                 const SynthesisOperator& G, double lambda, const DifferenceOperator& D, double alpha);

/// Pulls each sigma_n toward its mean so that sum_n |D^r sigma_n|_1 <= alpha.
/// Keeps sigma >= 0 and stays positive wherever the input was.
RowMatrixXd feasible_sigma(const RowMatrixXd& sigma, const DifferenceOperator& D, double alpha);

/// Runs ADMM from the all-zero state.
SolveResult solve(const ObservationSet& observations, MixingModel mixing, const SolverConfig& config);
/// Same as above, continuing from (and updating) a caller-supplied state.
SolveResult solve(const ProposedProblem& problem, AdmmState& state);
/// PAWR geometry taken from the scenario (angles and radar).
SolveResult solve(const ObservationSet& observations, const Scenario& geometry,
                  const SolverConfig& config);

// ADMM step and cap used by all presets. With peak powers near 1e5 the
// thresholds gamma * lambda must be far above 1 or the iterates crawl.
inline constexpr double kPresetGamma = 1000.0;
inline constexpr int kPresetMaxIter = 20000;

/// Proposed-model presets for (L, J) in {32, 128} x {1, 2}; r = 2.
SolverConfig default_tuning(Index bins, Index trials, SynthesisKind kind, Index elements,
                            Index sources);

}  // namespace sparsepsd

#endif  // SPARSEPSD_SOLVER_HPP_
