// Closed-form proximal and projection operators.
//
// phi(v, sigma) = |v|^2 / (2 sigma) + (J / 2) sigma for sigma > 0, 0 at
// (0, 0) and +inf otherwise, with J = v.size(). Its prox has a closed form
// through the positive root of a depressed cubic.
#ifndef SPARSEPSD_PROXOPS_HPP_
#define SPARSEPSD_PROXOPS_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sparsepsd {

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
struct PerspectivePoint {
  ComplexVector<Real> v;
  Real sigma = Real(0);
};

template <typename Derived>
typename Derived::RealScalar phi_value(const Eigen::MatrixBase<Derived>& v,
                                       typename Derived::RealScalar sigma) {
  using Real = typename Derived::RealScalar;
  const Real J = static_cast<Real>(v.size());
  if (sigma > Real(0)) return v.squaredNorm() / (Real(2) * sigma) + J / Real(2) * sigma;
  if (sigma == Real(0) && v.squaredNorm() == Real(0)) return Real(0);
  return std::numeric_limits<Real>::infinity();
}

/// Unique positive root of s^3 + p s - q = 0 for q > 0 (Cardano).
template <typename Real>
Real depressed_cubic_positive_root(Real p, Real q) {
  if (!(q > Real(0))) throw std::invalid_argument("cubic root: q must be positive");
  const Real half_q = q / Real(2);
  const Real dsc = -half_q * half_q - p * p * p / Real(27);
  Real s;
  if (dsc < Real(0)) {
    // cbrt(q/2 + sqrt(-D)) + cbrt(q/2 - sqrt(-D)); the two cube roots multiply
    // to -p/3, which avoids cancellation in the second term.
    const Real a = std::cbrt(half_q + std::sqrt(-dsc));
    s = a - p / (Real(3) * a);
  } else if (dsc == Real(0)) {
    s = Real(2) * std::cbrt(half_q);
  } else {
    s = Real(2) * std::sqrt(-p / Real(3)) * std::cos(std::atan(std::sqrt(dsc) / half_q) / Real(3));
  }
  // One Newton step polishes the last bits; the cubic is increasing at s.
  const Real f = (s * s + p) * s - q;
  const Real df = Real(3) * s * s + p;
  if (df > Real(0)) {
    const Real refined = s - f / df;
    if (refined > Real(0) && std::abs((refined * refined + p) * refined - q) <= std::abs(f)) {
      s = refined;
    }
  }
  return s;
}

/// In-place prox of kappa * phi on (v, sigma); J = v.size().
template <typename Derived>
void prox_perspective_inplace(Eigen::MatrixBase<Derived>& v,
                              typename Derived::RealScalar& sigma,
                              typename Derived::RealScalar kappa) {
  using Real = typename Derived::RealScalar;
  if (!(kappa > Real(0))) throw std::invalid_argument("prox_perspective: kappa must be positive");
  const Real J = static_cast<Real>(v.size());
  const Real vnorm2 = v.squaredNorm();
  if (Real(2) * kappa * sigma + vnorm2 <= J * kappa * kappa) {
    v.setZero();
    sigma = Real(0);
    return;
  }
  if (vnorm2 == Real(0)) {
    // here 2 sigma > J kappa necessarily
    sigma -= kappa * J / Real(2);
    return;
  }
  const Real vnorm = std::sqrt(vnorm2);
  const Real p = Real(2) * sigma / kappa + Real(2) - J;
  const Real s = depressed_cubic_positive_root(p, Real(2) * vnorm / kappa);
  v *= std::max(Real(0), Real(1) - kappa * s / vnorm);
  sigma = std::max(Real(0), sigma + kappa * (s * s - J) / Real(2));
}

template <typename Derived>
PerspectivePoint<typename Derived::RealScalar> prox_perspective(
    const Eigen::MatrixBase<Derived>& v, typename Derived::RealScalar sigma,
    typename Derived::RealScalar kappa) {
  using Real = typename Derived::RealScalar;
  PerspectivePoint<Real> out{v.template cast<std::complex<Real>>(), sigma};
  prox_perspective_inplace(out.v, out.sigma, kappa);
  return out;
}

template <typename Real>
std::complex<Real> soft_threshold_complex(std::complex<Real> u, Real t) {
  const Real mag = std::abs(u);
  if (mag <= t || mag == Real(0)) return {Real(0), Real(0)};
  return u * (Real(1) - t / mag);
}

template <typename Derived>
typename Derived::PlainObject group_shrink(const Eigen::MatrixBase<Derived>& g,
                                           typename Derived::RealScalar t) {
  using Real = typename Derived::RealScalar;
  const Real norm = g.norm();
  if (norm <= t || norm == Real(0)) return Derived::PlainObject::Zero(g.rows(), g.cols());
  return g * (Real(1) - t / norm);
}

namespace detail {

// Threshold theta with sum_i max(a_i - theta, 0) = radius for a >= 0 whose sum
// exceeds radius. Randomized pivoting, expected linear time.
template <typename Real>
Real l1_threshold(std::vector<Real>& a, Real radius) {
  std::minstd_rand rng(static_cast<std::uint32_t>(a.size()) * 2654435761u + 1u);
  Real sum_above = Real(0);
  std::size_t count_above = 0;
  auto first = a.begin();
  auto last = a.end();
  while (first != last) {
    std::uniform_int_distribution<std::ptrdiff_t> pick(0, (last - first) - 1);
    const Real pivot = *(first + pick(rng));
    // [first, mid) >= pivot, [mid, last) < pivot
    auto mid = std::partition(first, last, [pivot](Real x) { return x >= pivot; });
    Real block_sum = Real(0);
    for (auto it = first; it != mid; ++it) block_sum += *it;
    const auto block_count = static_cast<std::size_t>(mid - first);
    if ((sum_above + block_sum) - static_cast<Real>(count_above + block_count) * pivot < radius) {
      sum_above += block_sum;
      count_above += block_count;
      first = mid;
    } else {
      // Drop one copy of the pivot so the range strictly shrinks.
      auto pos = std::find(first, mid, pivot);
      std::iter_swap(pos, mid - 1);
      last = mid - 1;
      // Values equal to the pivot that remain are re-examined next round.
    }
  }
  return (sum_above - radius) / static_cast<Real>(count_above);
}

}  // namespace detail

/// Euclidean projection of the flattened input onto {x : |x|_1 <= alpha}.
template <typename Derived>
typename Derived::PlainObject project_l1_ball(const Eigen::MatrixBase<Derived>& z,
                                              typename Derived::Scalar alpha) {
  using Real = typename Derived::Scalar;
  if (!(alpha >= Real(0))) throw std::invalid_argument("project_l1_ball: alpha must be >= 0");
  typename Derived::PlainObject out = z;
  const Real norm1 = z.cwiseAbs().sum();
  if (norm1 <= alpha) return out;
  if (alpha == Real(0)) {
    out.setZero();
    return out;
  }
  std::vector<Real> mags;
  mags.reserve(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) mags.push_back(std::abs(z(i, j)));
  }
  const Real theta = detail::l1_threshold(mags, alpha);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const Real x = z(i, j);
      const Real shrunk = std::max(std::abs(x) - theta, Real(0));
      out(i, j) = x < Real(0) ? -shrunk : shrunk;
    }
  }
  return out;
}

}  // namespace sparsepsd

#endif  // SPARSEPSD_PROXOPS_HPP_
