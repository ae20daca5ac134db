#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sparsepsd/transforms.hpp"

using namespace sparsepsd;

namespace {

Eigen::MatrixXcd naive_dft(Index L) { return oracle::dft(L); }
Eigen::MatrixXd naive_difference(Index L, int r) { return oracle::difference(L, r); }

Eigen::VectorXcd random_vector(Index L, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(L);
  for (Index i = 0; i < L; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

double rel_err(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

TEST_CASE("dft matches the naive matrix") {
  std::mt19937_64 rng(1);
  for (Index L : {2, 4, 6, 8, 12, 16, 32, 10}) {
    const auto F = naive_dft(L);
    const auto x = random_vector(L, rng);
    CHECK(rel_err(dft_analyze(x), F * x) < 1e-12);
    CHECK(rel_err(dft_synthesize(x), F.adjoint() * x) < 1e-12);
    CHECK(rel_err(dft_synthesize(dft_analyze(x)), x) < 1e-12);
  }
}

TEST_CASE("dft hand examples") {
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(8);
  e1[0] = 1.0;
  const auto u = dft_analyze(e1);
  for (Index k = 0; k < 8; ++k) CHECK(std::abs(u[k] - Complex(1.0 / std::sqrt(8.0), 0.0)) < 1e-15);

  const auto c = dft_analyze(Eigen::VectorXcd::Ones(4));
  CHECK(std::abs(c[2] - Complex(2.0, 0.0)) < 1e-14);  // f = 0 bin
  CHECK(std::abs(c[0]) < 1e-14);
  CHECK(std::abs(c[1]) < 1e-14);
  CHECK(std::abs(c[3]) < 1e-14);
}

TEST_CASE("hamming window normalization and shape") {
  const auto w = hamming_window(32);
  CHECK(w.norm() == doctest::Approx(std::sqrt(32.0)).epsilon(1e-14));
  // symmetric, endpoints at 0.08 of the peak before rescaling
  CHECK(std::abs(w[0] - w[31]) < 1e-15);
  CHECK(w[0] / w.maxCoeff() == doctest::Approx(0.08 / (0.54 + 0.46 * std::cos(kPi / 31.0))).epsilon(1e-12));
}

TEST_CASE("windowed synthesis is the exact inverse of F W") {
  std::mt19937_64 rng(2);
  for (Index L : {8, 16, 32}) {
    const SynthesisOperator G(SynthesisKind::WindowedDFT, L);
    const auto u = random_vector(L, rng);
    CHECK(rel_err(G.analyze(G.synthesize(u)), u) < 1e-12);
    // G = W^{-1} F^H
    const Eigen::MatrixXcd dense =
        G.window().cwiseInverse().cast<Complex>().asDiagonal() * naive_dft(L).adjoint();
    CHECK(rel_err(G.synthesize(u), dense * u) < 1e-12);
    CHECK(rel_err(G.adjoint(u), dense.adjoint() * u) < 1e-12);
    // G G^H = diag(nu)
    const Eigen::MatrixXcd gg = dense * dense.adjoint();
    CHECK((gg - Eigen::MatrixXcd(G.nu().cast<Complex>().asDiagonal())).norm() < 1e-12);
  }
}

TEST_CASE("shifted gram solves match dense LU") {
  std::mt19937_64 rng(3);
  for (auto kind : {SynthesisKind::DFT, SynthesisKind::WindowedDFT}) {
    for (Index L : {4, 8, 16}) {
      const SynthesisOperator G(kind, L);
      Eigen::MatrixXcd dense = naive_dft(L).adjoint();
      if (kind == SynthesisKind::WindowedDFT) dense = G.window().cwiseInverse().cast<Complex>().asDiagonal() * dense;
      for (double c : {1.0, 0.125, 3.0}) {
        const auto b = random_vector(L, rng);
        const Eigen::MatrixXcd K = c * Eigen::MatrixXcd::Identity(L, L) + dense.adjoint() * dense;
        const Eigen::VectorXcd ref = K.partialPivLu().solve(b);
        CHECK(rel_err(G.solve_shifted_gram(c, b), ref) < 1e-10);
        if (c == 1.0) {
          CHECK(rel_err(K * solve_identity_plus_gram(G, b), b) < 1e-10);
        }
      }
    }
  }
  const SynthesisOperator F(SynthesisKind::DFT, 8);
  const auto b = random_vector(8, rng);
  CHECK(rel_err(F.solve_identity_plus_gram(b), b / 2.0) < 1e-14);
}

TEST_CASE("row-wise operators agree with per-row calls") {
  std::mt19937_64 rng(4);
  const SynthesisOperator G(SynthesisKind::WindowedDFT, 16);
  RowMatrixXcd X(3, 16);
  for (Index n = 0; n < 3; ++n) X.row(n) = random_vector(16, rng).transpose();
  const RowMatrixXcd Y = G.synthesize_rows(X);
  const RowMatrixXcd Z = G.solve_shifted_gram_rows(0.5, X);
  for (Index n = 0; n < 3; ++n) {
    CHECK(rel_err(Y.row(n).transpose(), G.synthesize(X.row(n).transpose())) < 1e-14);
    CHECK(rel_err(Z.row(n).transpose(), G.solve_shifted_gram(0.5, X.row(n).transpose())) < 1e-14);
  }
}

TEST_CASE("difference operator hand examples") {
  Eigen::VectorXd s(4);
  s << 1, 2, 3, 4;
  Eigen::VectorXd d1(4), d2(4);
  d1 << 1, 1, 1, -3;
  d2 << 0, 0, -4, 4;
  CHECK((apply_difference(DifferenceOperator(4, 1), s) - d1).norm() < 1e-14);
  CHECK((apply_difference(DifferenceOperator(4, 2), s) - d2).norm() < 1e-14);
  for (int r : {1, 2, 3}) {
    CHECK(DifferenceOperator(8, r).apply(Eigen::VectorXd::Constant(8, 2.5)).norm() < 1e-13);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(8, -1.25);
    CHECK((solve_identity_plus_diff_gram(DifferenceOperator(8, r), c) - c).norm() < 1e-13);
  }
}

TEST_CASE("circulant solves match dense oracles") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (Index L : {2, 4, 6, 7, 8, 16}) {
    for (int r : {1, 2, 3}) {
      const DifferenceOperator D(L, r);
      const Eigen::MatrixXd Dr = naive_difference(L, r);
      Eigen::VectorXd b(L);
      for (Index i = 0; i < L; ++i) b[i] = g(rng);
      CHECK((D.apply(b) - Dr * b).norm() <= 1e-12 * std::max(1.0, (Dr * b).norm()));
      CHECK((D.apply_transpose(b) - Dr.transpose() * b).norm() <= 1e-12 * std::max(1.0, b.norm()));
      const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(L, L) + Dr.transpose() * Dr;
      const Eigen::VectorXd ref = K.partialPivLu().solve(b);
      const Eigen::VectorXd got = D.solve_identity_plus_gram(b);
      CHECK((got - ref).norm() <= 1e-10 * ref.norm());
      CHECK((K * got - b).norm() <= 1e-10 * b.norm());
    }
  }
}

TEST_CASE("non power of two lengths work") {
  std::mt19937_64 rng(6);
  const auto x = random_vector(10, rng);
  CHECK(rel_err(dft_analyze(x), naive_dft(10) * x) < 1e-12);
  const SynthesisOperator G(SynthesisKind::WindowedDFT, 10);
  CHECK(rel_err(G.analyze(G.synthesize(x)), x) < 1e-12);
}

TEST_CASE("shape errors") {
  const SynthesisOperator G(SynthesisKind::DFT, 8);
  CHECK_THROWS_AS(G.synthesize(Eigen::VectorXcd::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(G.solve_shifted_gram(0.0, Eigen::VectorXcd::Zero(8)), std::invalid_argument);
  CHECK_THROWS_AS(DifferenceOperator(8, 0), std::invalid_argument);
}
