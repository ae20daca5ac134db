// Monte-Carlo experiment runner, error metrics and result files.
#ifndef SPARSEPSD_HARNESS_HPP_
#define SPARSEPSD_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsepsd/baselines.hpp"
#include "sparsepsd/core.hpp"
#include "sparsepsd/simulator.hpp"
#include "sparsepsd/solver.hpp"

namespace sparsepsd {

/// sum |S* - S^| / sum S*
double nmae(const PsdEstimate& truth, const PsdEstimate& estimate);

struct PsdMoments {
  double power = 0.0;      // P = (1/L) sum_k S(f_k)
  Eigen::VectorXd q;       // S / sum S, empty when P = 0
  double mean_velocity = 0.0;  // (lambda_cw / 2) sum_k f_k q_k / T
};

PsdMoments psd_moments(const Eigen::VectorXd& S, const FrequencyGrid& grid, double T, double lambda_cw);

/// One estimator entry of an experiment. Unset fields fall back to the
/// presets for the scenario's (L, J, synthesis).
struct MethodSpec {
  std::string id;  // true | proposed | mmse | l1 | mixed
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<Index> block;
  std::optional<Index> smoothing_radius;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<MethodSpec> methods;
  Index trials = 20;
  std::uint64_t seed = 1;
  SynthesisKind synthesis_kind = SynthesisKind::DFT;
  double gamma = kPresetGamma;
  int r = 2;
  int max_iter = kPresetMaxIter;
  double tol = 1e-5;
  std::filesystem::path output_dir;  // empty: nothing written
  bool emit_plots = true;
  bool write_tensors = true;
  int threads = 0;  // 0: SPARSEPSD_THREADS, else hardware concurrency

  void validate() const;
};

std::vector<MethodSpec> default_methods();

struct MetricsRow {
  std::string method;
  double nmae = 0.0;
  std::vector<double> per_trial;
  double wall_seconds = 0.0;
  std::string config;  // "key=value;..." echo of the settings used
  bool failed = false;
  std::string error;

  bool operator==(const MetricsRow&) const = default;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;  // sorted by method id
};

/// Seed of trial t: a hash of (master seed, t).
std::uint64_t trial_seed(std::uint64_t master, Index trial);

/// Worker count from the config, SPARSEPSD_THREADS or the hardware.
int resolve_thread_count(int requested);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// metrics.csv, trials.csv and timing.csv under dir.
void write_metrics(const std::filesystem::path& dir, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& dir);

ScenarioConfig scenario_config_from_json(const std::string& text);
std::string scenario_config_to_json(const ScenarioConfig& config);
ExperimentConfig experiment_config_from_json(const std::string& text);

/// Complete Scenario (angles, powers, Doppler parameters, radar) as JSON.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sparsepsd

#endif  // SPARSEPSD_HARNESS_HPP_
