#include "sparsepsd/core.hpp"

#include <cmath>

namespace sparsepsd {

FrequencyGrid::FrequencyGrid(Index bins) : bins_(bins), f_(bins) {
  if (bins < 2 || bins % 2 != 0) {
    throw std::invalid_argument("frequency grid needs an even bin count >= 2, got " +
                                std::to_string(bins));
  }
  for (Index k = 0; k < bins; ++k) {
    f_[k] = static_cast<double>(k - bins / 2) / static_cast<double>(bins);
  }
}

FrequencyGrid make_frequency_grid(Index bins) { return FrequencyGrid(bins); }

void RadarParams::validate() const {
  if (elements < 1) throw std::invalid_argument("radar: element count must be >= 1");
  if (!(lambda_cw > 0.0)) throw std::invalid_argument("radar: lambda_cw must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("radar: element spacing must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("radar: pulse repetition time must be positive");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("radar: noise_std must be nonnegative");
}

Eigen::VectorXcd steering_vector(double theta, const RadarParams& params) {
  params.validate();
  Eigen::VectorXcd a(params.elements);
  const double phase = -2.0 * kPi * params.delta * std::sin(theta) / params.lambda_cw;
  for (Index m = 0; m < params.elements; ++m) {
    a[m] = std::polar(1.0, phase * static_cast<double>(m));
  }
  return a;
}

Eigen::MatrixXcd steering_matrix(const Eigen::VectorXd& thetas, const RadarParams& params) {
  Eigen::MatrixXcd S(params.elements, thetas.size());
  for (Index n = 0; n < thetas.size(); ++n) S.col(n) = steering_vector(thetas[n], params);
  return S;
}

void Scenario::validate() const {
  radar.validate();
  const Index n = sources();
  if (n < 1) throw std::invalid_argument("scenario: at least one source required");
  if (power.size() != n || mean_doppler.size() != n || doppler_width.size() != n) {
    throw std::invalid_argument("scenario: per-source parameter lengths disagree");
  }
  if (grid.size() < 2) throw std::invalid_argument("scenario: frequency grid not set");
  if (trials < 1) throw std::invalid_argument("scenario: trial count must be >= 1");
  for (Index i = 0; i < n; ++i) {
    if (!(doppler_width[i] > 0.0)) throw std::invalid_argument("scenario: Doppler width must be > 0");
    if (!(power[i] >= 0.0)) throw std::invalid_argument("scenario: power must be >= 0");
  }
}

void ObservationSet::validate() const {
  if (y.empty()) throw std::invalid_argument("observations: no trials");
  for (const auto& v : y) {
    if (v.size() != y.front().size()) {
      throw std::invalid_argument("observations: trial vectors differ in length");
    }
    if (!v.allFinite()) throw std::invalid_argument("observations: non-finite entry");
  }
}

SpectralCoefficients::SpectralCoefficients(Index trials, Index sources, Index bins)
    : u(static_cast<std::size_t>(trials), RowMatrixXcd::Zero(sources, bins)) {}

bool SpectralCoefficients::all_finite() const {
  for (const auto& m : u) {
    if (!m.allFinite()) return false;
  }
  return true;
}

std::string to_string(SynthesisKind kind) {
  return kind == SynthesisKind::DFT ? "dft" : "wdft";
}

SynthesisKind parse_synthesis_kind(const std::string& name) {
  if (name == "dft") return SynthesisKind::DFT;
  if (name == "wdft") return SynthesisKind::WindowedDFT;
  throw std::invalid_argument("unknown synthesis kind '" + name + "' (expected dft|wdft)");
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("solver: lambda must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("solver: alpha must be nonnegative");
  if (r < 1) throw std::invalid_argument("solver: difference order r must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("solver: gamma must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) {
    throw std::invalid_argument("solver: tolerances must be positive");
  }
}

}  // namespace sparsepsd
