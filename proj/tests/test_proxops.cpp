#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sparsepsd/core.hpp"
#include "sparsepsd/proxops.hpp"

using namespace sparsepsd;

namespace {

double bisect_cubic(double p, double q) {
  auto f = [&](double s) { return s * s * s + p * s - q; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("cubic root against bisection") {
  CHECK(depressed_cubic_positive_root(2.0, 4.0) == doctest::Approx(1.17951).epsilon(1e-5));
  CHECK(depressed_cubic_positive_root(-3.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));  // double root at 1
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(-50.0, 50.0), uq(1e-6, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double p = up(rng), q = uq(rng);
    const double ref = bisect_cubic(p, q);
    CHECK(std::abs(depressed_cubic_positive_root(p, q) - ref) <= 1e-10 * std::max(1.0, ref));
  }
  CHECK_THROWS_AS(depressed_cubic_positive_root(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("phi values") {
  Eigen::VectorXcd v(2);
  v << Complex(1, 1), Complex(0, 0);
  CHECK(phi_value(v, 1.0) == doctest::Approx(2.0));  // 2/2 + 1
  CHECK(phi_value(Eigen::VectorXcd::Zero(2).eval(), 0.0) == 0.0);
  CHECK(std::isinf(phi_value(v, 0.0)));
  CHECK(std::isinf(phi_value(v, -1.0)));
}

TEST_CASE("prox hand examples") {
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(1);
  auto a = prox_perspective(zero, 0.4, 1.0);
  CHECK(a.v.norm() == 0.0);
  CHECK(a.sigma == 0.0);
  auto b = prox_perspective(zero, 1.0, 1.0);
  CHECK(b.v.norm() == 0.0);
  CHECK(b.sigma == doctest::Approx(0.5));
  Eigen::VectorXcd two(1);
  two << 2.0;
  auto c = prox_perspective(two, 0.5, 1.0);
  CHECK(c.v[0].real() == doctest::Approx(0.82049).epsilon(1e-5));
  CHECK(c.v[0].imag() == 0.0);
  CHECK(c.sigma == doctest::Approx(0.69562).epsilon(1e-5));
}

TEST_CASE("prox matches brute-force minimization") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> uk(0.05, 3.0);
  for (int i = 0; i < 200; ++i) {
    const int J = 1 + i % 4;
    Eigen::VectorXcd v(J);
    for (int j = 0; j < J; ++j) v[j] = {g(rng), g(rng)};
    const double sigma = 2.0 * g(rng);
    const double kappa = uk(rng);
    const auto got = prox_perspective(v, sigma, kappa);
    const auto ref = oracle::prox_perspective_grid(v.norm(), sigma, kappa, J);
    const double f_got = oracle::prox_objective(got.v.norm(), got.sigma, v.norm(), sigma, kappa, J);
    const double f_ref = oracle::prox_objective(ref.norm_w, ref.s, v.norm(), sigma, kappa, J);
    CHECK(f_got <= f_ref + 1e-12);
    CHECK(std::abs(got.sigma - ref.s) < 1e-6 * std::max(1.0, ref.s));
    CHECK(std::abs(got.v.norm() - ref.norm_w) < 1e-6 * std::max(1.0, ref.norm_w));
    // direction preserved
    if (got.v.norm() > 0) CHECK((got.v / got.v.norm() - v / v.norm()).norm() < 1e-12);
  }
}

TEST_CASE("prox is a fixed point at zero and kills small inputs") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
  double s = 0.0;
  prox_perspective_inplace(v, s, 0.7);
  CHECK(v.norm() == 0.0);
  CHECK(s == 0.0);
  CHECK_THROWS_AS(prox_perspective_inplace(v, s, 0.0), std::invalid_argument);
}

TEST_CASE("soft threshold and group shrink") {
  CHECK(std::abs(soft_threshold_complex(Complex(3, 4), 1.0) - Complex(2.4, 3.2)) < 1e-15);
  CHECK(soft_threshold_complex(Complex(0.3, 0.4), 0.5) == Complex(0, 0));
  Eigen::VectorXcd g(2);
  g << Complex(3, 0), Complex(0, 4);
  const Eigen::VectorXcd s = group_shrink(g, 2.5);
  CHECK(std::abs(s[0] - Complex(1.5, 0)) < 1e-15);
  CHECK(std::abs(s[1] - Complex(0, 2)) < 1e-15);
  CHECK(group_shrink(g, 5.0).norm() == 0.0);
}

TEST_CASE("l1 projection") {
  Eigen::VectorXd z(2);
  z << 3, 1;
  const Eigen::VectorXd p = project_l1_ball(z, 2.0);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK((project_l1_ball(z, 10.0) - z).norm() == 0.0);
  CHECK(project_l1_ball(z, 0.0).norm() == 0.0);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index n = 1 + i * 7;
    Eigen::VectorXd x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = g(rng);
    if (i % 5 == 0) x.head(n / 2).setConstant(0.5);  // ties
    const double alpha = 0.3 * x.cwiseAbs().sum();
    const Eigen::VectorXd got = project_l1_ball(x, alpha);
    const Eigen::VectorXd ref = oracle::project_l1_sort(x, alpha);
    CHECK((got - ref).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(got.cwiseAbs().sum() == doctest::Approx(alpha).epsilon(1e-12));
  }
  // matrix input flattens
  RowMatrixXd m(2, 2);
  m << 3, -1, 0, 0;
  const RowMatrixXd pm = project_l1_ball(m, 2.0);
  CHECK(pm(0, 0) == doctest::Approx(2.0));
  CHECK(pm(0, 1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(project_l1_ball(z, -1.0), std::invalid_argument);
}
