// PAWR scenario construction and Gaussian-process simulation.
#ifndef SPARSEPSD_SIMULATOR_HPP_
#define SPARSEPSD_SIMULATOR_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "sparsepsd/core.hpp"

namespace sparsepsd {

/// Knobs for building a Scenario. Angles in degrees here; radians inside Scenario.
struct ScenarioConfig {
  Index sources = 110;
  double theta_min_deg = -15.0;
  double theta_max_deg = 30.0;
  Index bins = 32;
  Index trials = 1;
  RadarParams radar;

  // Synthetic log-domain power profile (see make_power_profile).
  double peak_power_db = 50.0;
  double dynamic_range_db = 40.0;
  double gap_start = 0.55;  // zero-power gap, as fractions of the angular span
  double gap_end = 0.65;
  std::vector<double> powers;  // explicit P_n overrides the synthetic profile

  double v0 = 10.0;  // mean-Doppler sine amplitude [m/s]
  double velocity_width_min = 1.0;  // [m/s]
  double velocity_width_max = 3.0;
};

/// SplitMix64 finalizer over (seed, stream): independent per-purpose substreams.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

Eigen::VectorXd make_angles(const ScenarioConfig& cfg);
Eigen::VectorXd make_power_profile(const ScenarioConfig& cfg);
/// mu_n = (2 v0 / lambda_cw) sin(2 pi (theta_n - theta_1) / (theta_N - theta_1)).
Eigen::VectorXd make_mean_doppler(const ScenarioConfig& cfg, const Eigen::VectorXd& theta);

/// Draws the Doppler widths from the seed; every other field is deterministic.
Scenario make_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

/// Number of aliasing terms m so that the dropped Gaussian tail is negligible.
int alias_terms_for(double mu, double varsigma, double T);

/// S(f_k) = (1/T) sum_{|m| <= m_max} P / (sqrt(2 pi) varsigma) exp(-((f_k - m)/T - mu)^2 / (2 varsigma^2)).
Eigen::VectorXd gaussian_psd_discrete(double power, double mu, double varsigma, double T,
                                      const FrequencyGrid& grid, int m_max);

/// R[l] = (1/L_d) sum_k S(f_k) exp(i 2 pi f_k l) on the dense grid, for l = 0..lags-1.
Eigen::VectorXcd autocorr_from_psd(const Eigen::VectorXd& S_dense, const FrequencyGrid& dense_grid,
                                   Index lags);

/// Rows are trials: C^{1/2} z with C_{a,b} = R[a - b] and z circular CN(0, I).
Eigen::MatrixXcd sample_realizations(const Eigen::VectorXcd& R, Index trials, std::mt19937_64& rng);

struct GroundTruth {
  PsdEstimate S_star;                    // (N, L)
  std::vector<Eigen::VectorXcd> autocorr;  // per source, lags 0..L-1
};

struct SimulationOutput {
  GroundTruth truth;
  ObservationSet observations;
  SpectralCoefficients realizations;  // time-domain x(j, n, l), stored as (J, N, L)
};

inline constexpr Index kDenseGridFactor = 8;

GroundTruth ground_truth(const Scenario& scenario);
SimulationOutput simulate(const Scenario& scenario);

}  // namespace sparsepsd

#endif  // SPARSEPSD_SIMULATOR_HPP_
