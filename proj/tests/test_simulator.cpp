#include <doctest.h>

#include <random>

#include "sparsepsd/simulator.hpp"

using namespace sparsepsd;

namespace {

// Continuous Gaussian autocorrelation at lag l for a PSD with power P,
// mean mu and width w (Hz), sampled every T seconds.
Complex gaussian_autocorr(double P, double mu, double w, double T, Index l) {
  const double t = static_cast<double>(l) * T;
  return P * std::exp(-2.0 * kPi * kPi * w * w * t * t) * std::polar(1.0, 2.0 * kPi * mu * t);
}

}  // namespace

TEST_CASE("discrete gaussian psd integrates to the power") {
  const double T = 4e-4;
  // bin spacing 1 / (L T) must stay below about the width for the sum to be exact
  for (Index L : {16, 32, 64}) {
    const FrequencyGrid grid(L);
    for (double mu : {0.0, 300.0, -1100.0, 1240.0}) {
      for (double w : {100.0, 150.0, 190.0}) {
        if (w * L * T < 0.9) continue;
        const auto S = gaussian_psd_discrete(7.0, mu, w, T, grid, alias_terms_for(mu, w, T));
        CHECK(S.sum() / static_cast<double>(L) == doctest::Approx(7.0).epsilon(1e-6));
        CHECK((S.array() >= 0.0).all());
        // peak lands on the bin nearest mu T (mod 1)
        Index kmax;
        S.maxCoeff(&kmax);
        double d = grid[kmax] - mu * T;
        d -= std::round(d);
        CHECK(std::abs(d) <= 0.5 / static_cast<double>(L) + 1e-12);
      }
    }
  }
  CHECK(gaussian_psd_discrete(0.0, 0.0, 100.0, 4e-4, FrequencyGrid(8), 2).norm() == 0.0);
  CHECK_THROWS_AS(gaussian_psd_discrete(1.0, 0.0, 0.0, 4e-4, FrequencyGrid(8), 2), std::invalid_argument);
}

TEST_CASE("autocorrelation matches the continuous closed form") {
  const double T = 4e-4;
  const Index L = 32;
  const FrequencyGrid dense(kDenseGridFactor * L);
  for (double mu : {0.0, 500.0, -900.0}) {
    for (double w : {63.0, 120.0, 189.0}) {
      const auto S = gaussian_psd_discrete(3.0, mu, w, T, dense, alias_terms_for(mu, w, T));
      const auto R = autocorr_from_psd(S, dense, L);
      for (Index l = 0; l < L; ++l) {
        CHECK(std::abs(R[l] - gaussian_autocorr(3.0, mu, w, T, l)) < 1e-9);
      }
    }
  }
}

TEST_CASE("realizations have the requested covariance") {
  const double T = 4e-4;
  const Index L = 8;
  const FrequencyGrid dense(kDenseGridFactor * L);
  const auto S = gaussian_psd_discrete(2.0, 400.0, 150.0, T, dense, alias_terms_for(400.0, 150.0, T));
  const auto R = autocorr_from_psd(S, dense, L);
  std::mt19937_64 rng(11);
  const Index trials = 40000;
  const Eigen::MatrixXcd X = sample_realizations(R, trials, rng);
  const Eigen::MatrixXcd C = X.transpose() * X.conjugate() / static_cast<double>(trials);  // E[x_a x_b^*]
  for (Index a = 0; a < L; ++a) {
    for (Index b = 0; b <= a; ++b) CHECK(std::abs(C(a, b) - R[a - b]) < 0.05 * R[0].real());
  }
  // pseudo-covariance vanishes for circular samples
  const Eigen::MatrixXcd Pc = X.transpose() * X / static_cast<double>(trials);
  CHECK(Pc.cwiseAbs().maxCoeff() < 0.05 * R[0].real());
}

TEST_CASE("degenerate covariance is reported") {
  Eigen::VectorXcd R(2);
  R << 1.0, 2.0;
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(sample_realizations(R, 2, rng), DegenerateCovarianceError);
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(4);
  CHECK(sample_realizations(zero, 3, rng).norm() == 0.0);
}

TEST_CASE("scenario geometry and profiles") {
  ScenarioConfig cfg;
  const Scenario s = make_scenario(cfg, 5);
  CHECK(s.sources() == 110);
  CHECK(radians_to_degrees(s.theta[0]) == doctest::Approx(-15.0));
  CHECK(radians_to_degrees(s.theta[109]) == doctest::Approx(30.0));
  CHECK(s.power.maxCoeff() == doctest::Approx(std::pow(10.0, cfg.peak_power_db / 10.0)).epsilon(1e-2));
  int zeros = 0;
  for (Index n = 0; n < s.sources(); ++n) {
    if (s.power[n] == 0.0) ++zeros;
    else CHECK(10.0 * std::log10(s.power[n]) >= cfg.peak_power_db - cfg.dynamic_range_db - 1e-9);
    const double v = s.doppler_width[n] * s.radar.lambda_cw / 2.0;
    CHECK(v >= cfg.velocity_width_min);
    CHECK(v <= cfg.velocity_width_max);
    const double t = static_cast<double>(n) / 109.0;
    CHECK(s.mean_doppler[n] == doctest::Approx(2.0 * cfg.v0 / s.radar.lambda_cw * std::sin(2.0 * kPi * t)));
  }
  CHECK(zeros > 0);
  // widths depend on the seed, nothing else does
  const Scenario s2 = make_scenario(cfg, 6);
  CHECK(s2.doppler_width != s.doppler_width);
  CHECK(s2.power == s.power);
  CHECK(make_scenario(cfg, 5).doppler_width == s.doppler_width);

  cfg.powers = {1.0, 2.0};
  CHECK_THROWS_AS(make_power_profile(cfg), std::invalid_argument);
  cfg.sources = 2;
  CHECK(make_power_profile(cfg)[1] == 2.0);
}

TEST_CASE("simulation is deterministic and has the right second moments") {
  ScenarioConfig cfg;
  cfg.sources = 1;
  cfg.theta_min_deg = cfg.theta_max_deg = 10.0;
  cfg.powers = {4.0};
  cfg.trials = 400;
  cfg.bins = 8;
  cfg.radar.elements = 6;
  const Scenario s = make_scenario(cfg, 3);
  const auto a = simulate(s);
  const auto b = simulate(s);
  for (Index j = 0; j < s.trials; ++j) CHECK(a.observations.y[j] == b.observations.y[j]);

  // E|y|^2 per entry = P + noise^2
  double acc = 0.0;
  for (const auto& y : a.observations.y) acc += y.squaredNorm();
  const double per_entry = acc / static_cast<double>(s.trials * 6 * 8);
  CHECK(per_entry == doctest::Approx(4.0 + 2.5).epsilon(0.05));

  // y = S x + noise with the stored realizations
  const Eigen::MatrixXcd St = steering_matrix(s.theta, s.radar);
  double resid = 0.0;
  for (Index j = 0; j < s.trials; ++j) {
    const Eigen::MatrixXcd Y = Eigen::Map<const Eigen::MatrixXcd>(a.observations.y[j].data(), 6, 8);
    resid += (Y - St * a.realizations.u[j]).squaredNorm();
  }
  CHECK(resid / static_cast<double>(s.trials * 6 * 8) == doctest::Approx(2.5).epsilon(0.05));

  ScenarioConfig other = cfg;
  const auto c = simulate(make_scenario(other, 4));
  CHECK(c.observations.y[0] != a.observations.y[0]);
}

TEST_CASE("noise free simulation") {
  ScenarioConfig cfg;
  cfg.sources = 3;
  cfg.powers = {1.0, 0.0, 2.0};
  cfg.bins = 8;
  cfg.radar.elements = 4;
  cfg.radar.noise_std = 0.0;
  const Scenario s = make_scenario(cfg, 1);
  const auto out = simulate(s);
  const Eigen::MatrixXcd Y = Eigen::Map<const Eigen::MatrixXcd>(out.observations.y[0].data(), 4, 8);
  CHECK((Y - steering_matrix(s.theta, s.radar) * out.realizations.u[0]).norm() < 1e-12);
  CHECK(out.realizations.u[0].row(1).norm() == 0.0);
}
