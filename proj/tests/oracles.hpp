// Brute-force reference implementations shared by the unit tests and the
// acceptance binary. Nothing here calls into the library's algorithms.
#ifndef SPARSEPSD_TESTS_ORACLES_HPP_
#define SPARSEPSD_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

/// Golden-section minimum of a unimodal f on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct ProxPoint {
  double norm_w = 0.0;  // |w|, w is parallel to v
  double s = 0.0;
};

/// kappa phi(t, s) + (t - |v|)^2 / 2 + (s - sigma)^2 / 2 with J copies in phi.
inline double prox_objective(double t, double s, double vnorm, double sigma, double kappa, int J) {
  double phi;
  if (s > 0.0) phi = t * t / (2.0 * s) + J * s / 2.0;
  else phi = t == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return kappa * phi + 0.5 * (t - vnorm) * (t - vnorm) + 0.5 * (s - sigma) * (s - sigma);
}

/// Minimizer of prox_objective over t, s >= 0. For fixed s the optimal t is
/// |v| s / (s + kappa); the remaining function of s is convex and is
/// minimized by a grid scan followed by golden-section refinement.
inline ProxPoint prox_perspective_grid(double vnorm, double sigma, double kappa, int J) {
  auto t_of = [&](double s) { return s > 0.0 ? vnorm * s / (s + kappa) : 0.0; };
  auto g = [&](double s) { return prox_objective(t_of(s), s, vnorm, sigma, kappa, J); };
  const double smax = std::max(sigma, 0.0) + vnorm + 1.0;
  const int n = 2000;
  int best = 0;
  double fbest = g(0.0);
  for (int i = 1; i <= n; ++i) {
    const double v = g(smax * i / n);
    if (v < fbest) { fbest = v; best = i; }
  }
  const double lo = smax * std::max(best - 1, 0) / n, hi = smax * std::min(best + 1, n) / n;
  double s = golden_min(g, lo, hi);
  if (g(0.0) <= g(s)) s = 0.0;
  return {t_of(s), s};
}

/// Euclidean projection onto the l1 ball by sorting.
inline Eigen::VectorXd project_l1_sort(const Eigen::VectorXd& z, double alpha) {
  if (z.cwiseAbs().sum() <= alpha) return z;
  std::vector<double> m(static_cast<size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) m[static_cast<size_t>(i)] = std::abs(z[i]);
  std::sort(m.begin(), m.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (size_t k = 0; k < m.size(); ++k) {
    cum += m[k];
    const double t = (cum - alpha) / static_cast<double>(k + 1);
    if (m[k] > t) theta = t;
  }
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = std::max(std::abs(z[i]) - theta, 0.0);
    out[i] = z[i] < 0 ? -s : s;
  }
  return out;
}

/// Centered-grid DFT matrix, unitary.
inline Eigen::MatrixXcd dft(Eigen::Index L) {
  Eigen::MatrixXcd F(L, L);
  for (Eigen::Index k = 0; k < L; ++k) {
    const double f = static_cast<double>(k - L / 2) / static_cast<double>(L);
    for (Eigen::Index l = 0; l < L; ++l) {
      F(k, l) = std::polar(1.0 / std::sqrt(static_cast<double>(L)), -2.0 * kPi * f * static_cast<double>(l));
    }
  }
  return F;
}

/// Circulant D^r with (D s)_k = s_{k+1} - s_k.
inline Eigen::MatrixXd difference(Eigen::Index L, int r) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(L, L);
  for (Eigen::Index k = 0; k < L; ++k) {
    D(k, k) = -1.0;
    D(k, (k + 1) % L) += 1.0;
  }
  Eigen::MatrixXd Dr = Eigen::MatrixXd::Identity(L, L);
  for (int i = 0; i < r; ++i) Dr = D * Dr;
  return Dr;
}

/// Symmetric Hamming window scaled to norm sqrt(L).
inline Eigen::VectorXd hamming(Eigen::Index L) {
  Eigen::VectorXd w(L);
  for (Eigen::Index l = 0; l < L; ++l) w[l] = 0.54 - 0.46 * std::cos(2.0 * kPi * l / (L - 1.0));
  return w * (std::sqrt(static_cast<double>(L)) / w.norm());
}

/// Dense G for the plain or windowed DFT.
inline Eigen::MatrixXcd synthesis(Eigen::Index L, bool windowed) {
  Eigen::MatrixXcd G = dft(L).adjoint();
  if (windowed) G = hamming(L).cwiseInverse().cast<std::complex<double>>().asDiagonal() * G;
  return G;
}


/// Dense B = A G for a PAWR model: y = vec(S X) column-major with X = N x L and
/// x_n = G u_n; u is stacked as index n L + k.
inline Eigen::MatrixXcd pawr_times_synthesis(const Eigen::MatrixXcd& S, const Eigen::MatrixXcd& G) {
  const Eigen::Index M = S.rows(), N = S.cols(), L = G.rows();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(M * L, N * L);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index l = 0; l < L; ++l)
      for (Eigen::Index k = 0; k < L; ++k)
        for (Eigen::Index m = 0; m < M; ++m) B(l * M + m, n * L + k) += S(m, n) * G(l, k);
  return B;
}

/// 1/2 sum_j |y_j - B u_j|^2 + lambda sum_i phi(u_{., i}, sigma_i), +inf if infeasible.
/// u_j and sigma stacked as n L + k.
inline double objective_formula(const std::vector<Eigen::VectorXcd>& u, const Eigen::VectorXd& sigma,
                                const std::vector<Eigen::VectorXcd>& y, const Eigen::MatrixXcd& B,
                                double lambda, const Eigen::MatrixXd& Dr, Eigen::Index L, double alpha) {
  const double inf = std::numeric_limits<double>::infinity();
  const Eigen::Index N = sigma.size() / L;
  double budget = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) budget += (Dr * sigma.segment(n * L, L)).cwiseAbs().sum();
  if (budget > alpha + 1e-9 * std::max(1.0, alpha)) return inf;
  double f = 0.0;
  for (size_t j = 0; j < y.size(); ++j) f += 0.5 * (y[j] - B * u[j]).squaredNorm();
  const double J = static_cast<double>(y.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    double v2 = 0.0;
    for (const auto& uj : u) v2 += std::norm(uj[i]);
    if (sigma[i] > 0) f += lambda * (v2 / (2.0 * sigma[i]) + J * sigma[i] / 2.0);
    else if (sigma[i] < 0 || v2 > 0) return inf;
  }
  return f;
}

/// Minimum of the joint objective with u eliminated:
///   V(sigma) = 1/2 sum_j y_j^H (I + B diag(sigma) B^H / lambda)^{-1} y_j + lambda J / 2 sum sigma
/// subject to sigma >= 0 and sum |D^r sigma_n|_1 <= alpha, by a primal log-barrier
/// Newton method on (sigma, t) with -t <= D sigma <= t, sum t <= alpha.
struct BarrierResult {
  double value = 0.0;
  Eigen::VectorXd sigma;
};

inline BarrierResult barrier_reference(const std::vector<Eigen::VectorXcd>& y, const Eigen::MatrixXcd& B,
                                       double lambda, const Eigen::MatrixXd& Dr, Eigen::Index L,
                                       double alpha) {
  const Eigen::Index K = B.cols(), N = K / L, d = B.rows();
  const double J = static_cast<double>(y.size());
  Eigen::MatrixXd Dfull = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index n = 0; n < N; ++n) Dfull.block(n * L, n * L, L, L) = Dr;

  auto V = [&](const Eigen::VectorXd& s, Eigen::VectorXd* g, Eigen::MatrixXd* H) {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(d, d) +
                         B * s.cast<std::complex<double>>().asDiagonal() * B.adjoint() / lambda;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(C);
    double val = lambda * J / 2.0 * s.sum();
    const Eigen::MatrixXcd CiB = ldlt.solve(B);
    const Eigen::MatrixXcd Mm = B.adjoint() * CiB;
    if (g) g->setConstant(K, lambda * J / 2.0);
    if (H) H->setZero(K, K);
    for (const auto& yj : y) {
      const Eigen::VectorXcd c = ldlt.solve(yj);
      val += 0.5 * yj.dot(c).real();
      const Eigen::VectorXcd w = B.adjoint() * c;
      if (g) *g -= w.cwiseAbs2() / (2.0 * lambda);
      if (H) {
        for (Eigen::Index i = 0; i < K; ++i)
          for (Eigen::Index k = 0; k < K; ++k)
            (*H)(i, k) += (std::conj(w[k]) * Mm(k, i) * w[i]).real() / (lambda * lambda);
      }
    }
    return val;
  };

  // z = (sigma, t); constraints: sigma > 0, t - D s > 0, t + D s > 0, alpha - sum t > 0
  const Eigen::Index n = 2 * K;
  Eigen::VectorXd z(n);
  z.head(K).setConstant(1e-2);
  z.tail(K).setConstant(alpha / (2.0 * static_cast<double>(K)));
  auto slack = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& a, Eigen::VectorXd& b, Eigen::VectorXd& c,
                   double& e) {
    const Eigen::VectorXd Ds = Dfull * zz.head(K);
    a = zz.head(K);
    b = zz.tail(K) - Ds;
    c = zz.tail(K) + Ds;
    e = alpha - zz.tail(K).sum();
    return a.minCoeff() > 0 && b.minCoeff() > 0 && c.minCoeff() > 0 && e > 0;
  };
  auto phi_t = [&](const Eigen::VectorXd& zz, double t) {
    Eigen::VectorXd a, b, c;
    double e;
    if (!slack(zz, a, b, c, e)) return std::numeric_limits<double>::infinity();
    return t * V(zz.head(K), nullptr, nullptr) - a.array().log().sum() - b.array().log().sum() -
           c.array().log().sum() - std::log(e);
  };

  const double m = 3.0 * static_cast<double>(K) + 1.0;
  for (double t = 1.0; m / t > 1e-11; t *= 8.0) {
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd gV(K);
      Eigen::MatrixXd HV(K, K);
      V(z.head(K), &gV, &HV);
      Eigen::VectorXd a, b, c;
      double e;
      slack(z, a, b, c, e);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
      grad.head(K) = t * gV;
      H.topLeftCorner(K, K) = t * HV;
      // -log a
      grad.head(K) -= a.cwiseInverse();
      H.topLeftCorner(K, K) += a.cwiseAbs2().cwiseInverse().asDiagonal();
      // -log(t - D s) and -log(t + D s): gradients wrt (s, t)
      Eigen::MatrixXd Jb(K, n), Jc(K, n);
      Jb << -Dfull, Eigen::MatrixXd::Identity(K, K);
      Jc << Dfull, Eigen::MatrixXd::Identity(K, K);
      grad -= Jb.transpose() * b.cwiseInverse() + Jc.transpose() * c.cwiseInverse();
      H += Jb.transpose() * b.cwiseAbs2().cwiseInverse().asDiagonal() * Jb +
           Jc.transpose() * c.cwiseAbs2().cwiseInverse().asDiagonal() * Jc;
      Eigen::VectorXd je = Eigen::VectorXd::Zero(n);
      je.tail(K).setOnes();
      grad += je / e;
      H += je * je.transpose() / (e * e);
      const Eigen::VectorXd step = -H.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (decrement / 2.0 < 1e-14) break;
      double s = 1.0;
      const double f0 = phi_t(z, t);
      while (phi_t(z + s * step, t) > f0 - 0.25 * s * decrement && s > 1e-20) s *= 0.5;
      z += s * step;
    }
  }
  return {V(z.head(K), nullptr, nullptr), z.head(K)};
}

/// FISTA on 1/2 sum_j |y_j - B u_j|^2 + R(u) where prox(U, t) applies the prox
/// of t R to the K x J matrix whose columns are the u_j.
inline Eigen::MatrixXcd fista(const std::vector<Eigen::VectorXcd>& y, const Eigen::MatrixXcd& B,
                              const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&, double)>& prox,
                              int iters) {
  const Eigen::Index J = static_cast<Eigen::Index>(y.size()), K = B.cols();
  Eigen::MatrixXcd Y(B.rows(), J);
  for (Eigen::Index j = 0; j < J; ++j) Y.col(j) = y[static_cast<size_t>(j)];
  const double Lip = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(B.adjoint() * B).eigenvalues().maxCoeff();
  const double step = 1.0 / Lip;
  const Eigen::MatrixXcd BhY = B.adjoint() * Y, BhB = B.adjoint() * B;
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(K, J), Z = U;
  double t = 1.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::MatrixXcd Unew = prox(Z - step * (BhB * Z - BhY), step);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Z = Unew + ((t - 1.0) / tn) * (Unew - U);
    U = Unew;
    t = tn;
  }
  return U;
}

inline Eigen::MatrixXcd soft_entries(const Eigen::MatrixXcd& U, double t) {
  Eigen::MatrixXcd out = U;
  for (Eigen::Index i = 0; i < U.size(); ++i) {
    const double a = std::abs(U(i));
    out(i) = a > t ? U(i) * (1.0 - t / a) : std::complex<double>(0.0);
  }
  return out;
}

inline Eigen::MatrixXcd shrink_rows(const Eigen::MatrixXcd& U, double t) {
  Eigen::MatrixXcd out = U;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double a = U.row(i).norm();
    out.row(i) = a > t ? (U.row(i) * (1.0 - t / a)).eval() : Eigen::RowVectorXcd::Zero(U.cols()).eval();
  }
  return out;
}

}  // namespace oracle

#endif  // SPARSEPSD_TESTS_ORACLES_HPP_
