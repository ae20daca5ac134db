// Comparison estimators: averaged periodogram, Daniell smoothing, an MMSE
// beamformer, l1-regularized least squares and the latent group lasso. Also
// two exhaustive evaluations of the block-sparsity penalty psi used as
// oracles in tests.
#ifndef SPARSEPSD_BASELINES_HPP_
#define SPARSEPSD_BASELINES_HPP_

#include <string>
#include <vector>

#include "sparsepsd/core.hpp"
#include "sparsepsd/solver.hpp"
#include "sparsepsd/transforms.hpp"

namespace sparsepsd {

/// S[n][k] = (1/J) sum_j |u_{j,n}[k]|^2
PsdEstimate periodogram_avg(const SpectralCoefficients& u);

/// Circular moving average of half-width R along the frequency axis.
PsdEstimate daniell_smooth(const PsdEstimate& S, Index radius);

/// Circularly contiguous blocks covering 0..L-1, given by their start bins in
/// increasing order. Block m runs from starts[m] up to starts[m+1] - 1
/// (the last one wraps to starts[0] - 1).
struct BlockPartition {
  Index bins = 0;
  std::vector<Index> starts;

  Index size() const { return static_cast<Index>(starts.size()); }
  std::vector<Index> block(Index m) const;
  void validate() const;
};

/// Every partition into at most H circular blocks; L <= 10.
std::vector<BlockPartition> enumerate_circular_partitions(Index bins, Index max_blocks);

/// min over partitions with at most H blocks of sum_m sqrt(J |B_m|) |u_{B_m}|.
/// u is J x L.
double psi_bruteforce(const Eigen::MatrixXcd& u, Index max_blocks);

/// min over sigma >= 0 with |D sigma|_0 <= H of sum_k phi(u[:, k], sigma[k]),
/// by enumerating jump supports. Must agree with psi_bruteforce.
double psi_sigma_form(const Eigen::MatrixXcd& u, Index max_blocks);

enum class BaselineMethod { MMSE, L1, LatentGroupLasso };

std::string to_string(BaselineMethod method);
BaselineMethod parse_baseline_method(const std::string& name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::MMSE;
  double lambda = 0.0;
  Index block = 1;             // B, latent group lasso only
  Index smoothing_radius = 0;  // R
  double noise_std = 1.5811388300841898;  // MMSE only
  int refinement_passes = 3;              // MMSE only
  SynthesisKind synthesis_kind = SynthesisKind::DFT;
  double gamma = 1.0;
  int max_iter = 3000;
  double tol_primal = 1e-5;
  double tol_dual = 1e-5;
  bool record_objective = false;

  void validate() const;
  /// ADMM settings in solver form (alpha and r unused).
  SolverConfig admm() const;
};

/// Baseline presets for (L, J) in {32, 128} x {1, 2}; noise_std is copied into
/// the MMSE config.
BaselineConfig default_baseline_config(BaselineMethod method, Index bins, Index trials,
                                       SynthesisKind kind, Index elements, Index sources,
                                       double noise_std);

/// x = (S_a^H S_a + s^2 P_a^{-1})^{-1} S_a^H Y on the sources with P > 0,
/// zero elsewhere; Y is M x L, the result N x L.
RowMatrixXcd wiener_unmix(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& steering,
                          const Eigen::VectorXd& power, double noise_std);

/// Time-domain MMSE estimates per trial (N x L each) after the power refinement.
std::vector<RowMatrixXcd> mmse_unmix(const ObservationSet& observations,
                                     const Eigen::MatrixXcd& steering, double noise_std,
                                     int refinement_passes = 3);

/// MMSE unmixing followed by analysis with G^{-1}.
SpectralCoefficients mmse_beamformer(const ObservationSet& observations,
                                     const Eigen::MatrixXcd& steering, double noise_std,
                                     const SynthesisOperator& G, int refinement_passes = 3);

struct BaselineResult {
  SpectralCoefficients u;
  SolveDiagnostics diagnostics;
  double final_objective = 0.0;
};

/// 1/2 sum_j |y_j - A G u_j|^2 + lambda sum |u|
double l1_objective(const SpectralCoefficients& u, const ObservationSet& observations,
                    const MixingModel& mixing, const SynthesisOperator& G, double lambda);

BaselineResult l1_estimator(const ObservationSet& observations, MixingModel mixing,
                            const SynthesisOperator& G, const SolverConfig& config);

/// Latent blocks for one trial: N x (L B); block b of source n occupies
/// columns [b B, (b + 1) B) and entry o maps to bin (b + o) mod L.
RowMatrixXcd latent_expand(const RowMatrixXcd& v, Index bins, Index block);  // E v
RowMatrixXcd latent_gather(const RowMatrixXcd& u, Index block);              // E^H u

/// 1/2 sum_j |y_j - A G E v_j|^2 + lambda sum_{n,b} sqrt(J B) |v_{., n, b}|
double latent_group_lasso_objective(const std::vector<RowMatrixXcd>& v, Index block,
                                    const ObservationSet& observations, const MixingModel& mixing,
                                    const SynthesisOperator& G, double lambda);

BaselineResult latent_group_lasso(const ObservationSet& observations, MixingModel mixing,
                                  const SynthesisOperator& G, const SolverConfig& config,
                                  Index block);

struct BaselineRun {
  PsdEstimate psd;  // raw, before smoothing
  SolveDiagnostics diagnostics;  // empty for MMSE
  double final_objective = 0.0;
};

/// Runs a baseline on PAWR data.
BaselineRun run_baseline(const ObservationSet& observations, const Scenario& geometry,
                         const BaselineConfig& config);

}  // namespace sparsepsd

#endif  // SPARSEPSD_BASELINES_HPP_
