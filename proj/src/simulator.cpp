#include "sparsepsd/simulator.hpp"

#include <cmath>

namespace sparsepsd {
namespace {

constexpr std::uint64_t kWidthStream = 0;
constexpr std::uint64_t kSourceStreamBase = 1;
constexpr std::uint64_t kNoiseStreamBase = std::uint64_t{1} << 32;

// Two smooth reflectivity cells on a [0, 1] angular coordinate, max 1.
double cell_shape(double t) {
  const double a = (t - 0.25) / 0.15;
  const double b = (t - 0.80) / 0.08;
  return 0.6 * std::exp(-a * a) + std::exp(-b * b);
}

double span_fraction(Index n, Index count) {
  return count > 1 ? static_cast<double>(n) / static_cast<double>(count - 1) : 0.0;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Eigen::VectorXd make_angles(const ScenarioConfig& cfg) {
  if (cfg.sources < 1) throw std::invalid_argument("scenario: at least one source required");
  Eigen::VectorXd theta(cfg.sources);
  for (Index n = 0; n < cfg.sources; ++n) {
    const double deg = cfg.theta_min_deg +
                       (cfg.theta_max_deg - cfg.theta_min_deg) * span_fraction(n, cfg.sources);
    theta[n] = degrees_to_radians(deg);
  }
  return theta;
}

Eigen::VectorXd make_power_profile(const ScenarioConfig& cfg) {
  Eigen::VectorXd power(cfg.sources);
  if (!cfg.powers.empty()) {
    if (static_cast<Index>(cfg.powers.size()) != cfg.sources) {
      throw std::invalid_argument("scenario: explicit power list length must equal source count");
    }
    for (Index n = 0; n < cfg.sources; ++n) power[n] = cfg.powers[static_cast<std::size_t>(n)];
    return power;
  }
  double peak_shape = 0.0;
  for (int i = 0; i <= 1000; ++i) peak_shape = std::max(peak_shape, cell_shape(i / 1000.0));
  for (Index n = 0; n < cfg.sources; ++n) {
    const double t = span_fraction(n, cfg.sources);
    if (t >= cfg.gap_start && t <= cfg.gap_end) {
      power[n] = 0.0;
      continue;
    }
    const double db = cfg.peak_power_db + cfg.dynamic_range_db * (cell_shape(t) / peak_shape - 1.0);
    power[n] = std::pow(10.0, db / 10.0);
  }
  return power;
}

Eigen::VectorXd make_mean_doppler(const ScenarioConfig& cfg, const Eigen::VectorXd& theta) {
  Eigen::VectorXd mu(theta.size());
  const double span = theta[theta.size() - 1] - theta[0];
  for (Index n = 0; n < theta.size(); ++n) {
    const double t = span != 0.0 ? (theta[n] - theta[0]) / span : 0.0;
    mu[n] = 2.0 * cfg.v0 / cfg.radar.lambda_cw * std::sin(2.0 * kPi * t);
  }
  return mu;
}

Scenario make_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  Scenario s;
  s.radar = cfg.radar;
  s.grid = FrequencyGrid(cfg.bins);
  s.trials = cfg.trials;
  s.rng_seed = seed;
  s.theta = make_angles(cfg);
  s.power = make_power_profile(cfg);
  s.mean_doppler = make_mean_doppler(cfg, s.theta);
  if (!(cfg.velocity_width_min > 0.0) || cfg.velocity_width_max < cfg.velocity_width_min) {
    throw std::invalid_argument("scenario: invalid velocity width range");
  }
  std::mt19937_64 rng(substream_seed(seed, kWidthStream));
  std::uniform_real_distribution<double> width(cfg.velocity_width_min, cfg.velocity_width_max);
  s.doppler_width.resize(cfg.sources);
  for (Index n = 0; n < cfg.sources; ++n) {
    s.doppler_width[n] = 2.0 * width(rng) / cfg.radar.lambda_cw;
  }
  s.validate();
  return s;
}

int alias_terms_for(double mu, double varsigma, double T) {
  return static_cast<int>(std::ceil(std::abs(mu * T) + 0.5 + 12.0 * varsigma * T)) + 1;
}

Eigen::VectorXd gaussian_psd_discrete(double power, double mu, double varsigma, double T,
                                      const FrequencyGrid& grid, int m_max) {
  if (!(varsigma > 0.0)) throw std::invalid_argument("gaussian_psd: varsigma must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("gaussian_psd: T must be positive");
  if (m_max < 0) throw std::invalid_argument("gaussian_psd: m_max must be >= 0");
  Eigen::VectorXd S = Eigen::VectorXd::Zero(grid.size());
  if (power == 0.0) return S;
  const double amp = power / (std::sqrt(2.0 * kPi) * varsigma) / T;
  for (Index k = 0; k < grid.size(); ++k) {
    double acc = 0.0;
    for (int m = -m_max; m <= m_max; ++m) {
      const double z = ((grid[k] - m) / T - mu) / varsigma;
      acc += std::exp(-0.5 * z * z);
    }
    S[k] = amp * acc;
  }
  return S;
}

Eigen::VectorXcd autocorr_from_psd(const Eigen::VectorXd& S_dense, const FrequencyGrid& dense_grid,
                                   Index lags) {
  if (S_dense.size() != dense_grid.size()) {
    throw std::invalid_argument("autocorr_from_psd: PSD length does not match grid");
  }
  const double inv = 1.0 / static_cast<double>(dense_grid.size());
  Eigen::VectorXcd R = Eigen::VectorXcd::Zero(lags);
  for (Index l = 0; l < lags; ++l) {
    Complex acc = 0.0;
    for (Index k = 0; k < dense_grid.size(); ++k) {
      acc += S_dense[k] * std::polar(1.0, 2.0 * kPi * dense_grid[k] * static_cast<double>(l));
    }
    R[l] = acc * inv;
  }
  R[0] = R[0].real();
  return R;
}

Eigen::MatrixXcd sample_realizations(const Eigen::VectorXcd& R, Index trials, std::mt19937_64& rng) {
  const Index L = R.size();
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(trials, L);
  const double r0 = R[0].real();
  if (r0 <= 0.0) return X;

  Eigen::MatrixXcd C(L, L);
  for (Index a = 0; a < L; ++a) {
    for (Index b = 0; b < L; ++b) C(a, b) = a >= b ? R[a - b] : std::conj(R[b - a]);
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(C);
  double jitter = 1e-12;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-6 * (1.0 + 1e-9)) {
      throw DegenerateCovarianceError("covariance factorization failed after jitter up to 1e-6 R[0]");
    }
    llt.compute(C + Eigen::MatrixXcd::Identity(L, L) * (jitter * r0));
    jitter *= 10.0;
  }
  const Eigen::MatrixXcd Lc = llt.matrixL();

  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Eigen::VectorXcd z(L);
  for (Index j = 0; j < trials; ++j) {
    for (Index l = 0; l < L; ++l) {
      const double re = normal(rng);
      const double im = normal(rng);
      z[l] = {re, im};
    }
    X.row(j) = (Lc * z).transpose();
  }
  return X;
}

GroundTruth ground_truth(const Scenario& scenario) {
  scenario.validate();
  const Index N = scenario.sources();
  const Index L = scenario.bins();
  const double T = scenario.radar.T;
  const FrequencyGrid dense(kDenseGridFactor * L);
  GroundTruth truth;
  truth.S_star.S.resize(N, L);
  truth.autocorr.reserve(static_cast<std::size_t>(N));
  for (Index n = 0; n < N; ++n) {
    const double P = scenario.power[n];
    const double mu = scenario.mean_doppler[n];
    const double w = scenario.doppler_width[n];
    const int m_max = alias_terms_for(mu, w, T);
    truth.S_star.S.row(n) = gaussian_psd_discrete(P, mu, w, T, scenario.grid, m_max).transpose();
    const Eigen::VectorXd S_dense = gaussian_psd_discrete(P, mu, w, T, dense, m_max);
    truth.autocorr.push_back(autocorr_from_psd(S_dense, dense, L));
  }
  return truth;
}

SimulationOutput simulate(const Scenario& scenario) {
  SimulationOutput out;
  out.truth = ground_truth(scenario);
  const Index N = scenario.sources();
  const Index L = scenario.bins();
  const Index J = scenario.trials;
  const Index M = scenario.radar.elements;

  out.realizations = SpectralCoefficients(J, N, L);
  for (Index n = 0; n < N; ++n) {
    std::mt19937_64 rng(substream_seed(scenario.rng_seed, kSourceStreamBase + static_cast<std::uint64_t>(n)));
    const Eigen::MatrixXcd X = sample_realizations(out.truth.autocorr[static_cast<std::size_t>(n)], J, rng);
    for (Index j = 0; j < J; ++j) out.realizations.u[static_cast<std::size_t>(j)].row(n) = X.row(j);
  }

  const Eigen::MatrixXcd S = steering_matrix(scenario.theta, scenario.radar);
  for (Index j = 0; j < J; ++j) {
    Eigen::MatrixXcd Y = S * out.realizations.u[static_cast<std::size_t>(j)];  // M x L
    if (scenario.radar.noise_std > 0.0) {
      std::mt19937_64 rng(substream_seed(scenario.rng_seed, kNoiseStreamBase + static_cast<std::uint64_t>(j)));
      std::normal_distribution<double> noise(0.0, scenario.radar.noise_std / std::sqrt(2.0));
      for (Index l = 0; l < L; ++l) {
        for (Index m = 0; m < M; ++m) {
          const double re = noise(rng);
          const double im = noise(rng);
          Y(m, l) += Complex(re, im);
        }
      }
    }
    out.observations.y.emplace_back(Eigen::Map<const Eigen::VectorXcd>(Y.data(), M * L));
  }
  return out;
}

}  // namespace sparsepsd
