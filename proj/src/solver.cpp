#include "sparsepsd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsepsd/proxops.hpp"

namespace sparsepsd {

// ---------------------------------------------------------------------------
// MixingModel

MixingModel MixingModel::pawr(Eigen::MatrixXcd steering, Index bins) {
  if (steering.rows() < 1 || steering.cols() < 1) {
    throw std::invalid_argument("pawr mixing: empty steering matrix");
  }
  MixingModel m;
  m.kind_ = Kind::PAWR;
  m.sources_ = steering.cols();
  m.bins_ = bins;
  m.data_length_ = steering.rows() * bins;
  m.steering_ = std::move(steering);
  return m;
}

MixingModel MixingModel::generic(const std::vector<Eigen::MatrixXcd>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("generic mixing: no blocks");
  MixingModel m;
  m.kind_ = Kind::GenericDense;
  m.sources_ = static_cast<Index>(blocks.size());
  m.bins_ = blocks.front().cols();
  m.data_length_ = blocks.front().rows();
  m.dense_.resize(m.data_length_, m.sources_ * m.bins_);
  for (Index n = 0; n < m.sources_; ++n) {
    const auto& A = blocks[static_cast<std::size_t>(n)];
    if (A.rows() != m.data_length_ || A.cols() != m.bins_) {
      throw std::invalid_argument("generic mixing: blocks differ in shape");
    }
    m.dense_.middleCols(n * m.bins_, m.bins_) = A;
  }
  return m;
}

void MixingModel::factorize(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("mixing: gamma must be nonnegative");
  if (kind_ == Kind::PAWR) {
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(sources_, sources_);
    K.noalias() += gamma * steering_.adjoint() * steering_;
    factor_.compute(K);
  } else {
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(sources_ * bins_, sources_ * bins_);
    K.noalias() += gamma * dense_.adjoint() * dense_;
    factor_.compute(K);
  }
  if (factor_.info() != Eigen::Success) throw std::runtime_error("mixing: factorization failed");
  gamma_ = gamma;
}

void MixingModel::require_factorization(double gamma) const {
  if (!gamma_ || *gamma_ != gamma) {
    throw std::logic_error("mixing: factorization is stale for the requested gamma");
  }
}

Eigen::VectorXcd MixingModel::apply(const RowMatrixXcd& x) const {
  if (x.rows() != sources_ || x.cols() != bins_) throw std::invalid_argument("mixing: shape mismatch");
  if (kind_ == Kind::PAWR) {
    const Index M = steering_.rows();
    Eigen::MatrixXcd Y = steering_ * x;  // M x L
    return Eigen::Map<const Eigen::VectorXcd>(Y.data(), M * bins_);
  }
  return dense_ * Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

RowMatrixXcd MixingModel::adjoint(const Eigen::VectorXcd& y) const {
  if (y.size() != data_length_) throw std::invalid_argument("mixing: data length mismatch");
  if (kind_ == Kind::PAWR) {
    const Index M = steering_.rows();
    Eigen::Map<const Eigen::MatrixXcd> Y(y.data(), M, bins_);
    return steering_.adjoint() * Y;
  }
  Eigen::VectorXcd v = dense_.adjoint() * y;
  return Eigen::Map<const RowMatrixXcd>(v.data(), sources_, bins_);
}

RowMatrixXcd MixingModel::fidelity_step(const RowMatrixXcd& Ahy, const RowMatrixXcd& b,
                                        double gamma) const {
  require_factorization(gamma);
  RowMatrixXcd rhs = b;
  rhs.noalias() += gamma * Ahy;
  if (kind_ == Kind::PAWR) return factor_.solve(rhs);
  Eigen::VectorXcd v = factor_.solve(Eigen::Map<const Eigen::VectorXcd>(rhs.data(), rhs.size()));
  return Eigen::Map<const RowMatrixXcd>(v.data(), sources_, bins_);
}

Eigen::MatrixXcd MixingModel::materialize() const {
  if (kind_ == Kind::GenericDense) return dense_;
  const Index M = steering_.rows();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M * bins_, sources_ * bins_);
  for (Index n = 0; n < sources_; ++n) {
    for (Index l = 0; l < bins_; ++l) A.block(l * M, n * bins_ + l, M, 1) = steering_.col(n);
  }
  return A;
}

Eigen::MatrixXcd data_fidelity_step_pawr(const MixingModel& mixing, const Eigen::VectorXcd& y,
                                         const Eigen::MatrixXcd& Gu_plus_q, double gamma) {
  if (mixing.kind() != MixingModel::Kind::PAWR) {
    throw std::invalid_argument("data_fidelity_step_pawr needs a PAWR mixing model");
  }
  if (Gu_plus_q.rows() != mixing.bins() || Gu_plus_q.cols() != mixing.sources()) {
    throw std::invalid_argument("data_fidelity_step_pawr: expected an L x N matrix");
  }
  const RowMatrixXcd b = Gu_plus_q.transpose();
  return mixing.fidelity_step(mixing.adjoint(y), b, gamma).transpose();
}

// ---------------------------------------------------------------------------
// ADMM

AdmmState AdmmState::zeros(Index trials, Index sources, Index bins) {
  AdmmState s;
  const RowMatrixXcd zc = RowMatrixXcd::Zero(sources, bins);
  const auto J = static_cast<std::size_t>(trials);
  s.u.assign(J, zc);
  s.x.assign(J, zc);
  s.u_tilde.assign(J, zc);
  s.q.assign(J, zc);
  s.r.assign(J, zc);
  const RowMatrixXd zr = RowMatrixXd::Zero(sources, bins);
  s.sigma = s.sigma_tilde = s.eta = s.tau = s.zeta = zr;
  return s;
}

ProposedProblem::ProposedProblem(const ObservationSet& observations, MixingModel mixing,
                                 const SolverConfig& config)
    : observations_(observations),
      mixing_(std::move(mixing)),
      config_(config),
      G_(config.synthesis_kind, mixing_.bins()),
      D_(mixing_.bins(), config.r) {
  config_.validate();
  observations_.validate();
  if (observations_.length() != mixing_.data_length()) {
    throw std::invalid_argument("observation length does not match the mixing model");
  }
  if (mixing_.factorized_gamma() != config_.gamma) mixing_.factorize(config_.gamma);
  for (const auto& y : observations_.y) Ahy_.push_back(mixing_.adjoint(y));
}

double IterationResiduals::primal_relative() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < primal.size(); ++i) worst = std::max(worst, primal[i] / primal_scale[i]);
  return worst;
}

namespace {

double squared_norm(const std::vector<RowMatrixXcd>& blocks) {
  double acc = 0.0;
  for (const auto& b : blocks) acc += b.squaredNorm();
  return acc;
}

double squared_distance(const std::vector<RowMatrixXcd>& a, const std::vector<RowMatrixXcd>& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]).squaredNorm();
  return acc;
}

bool finite(const std::vector<RowMatrixXcd>& blocks) {
  return std::all_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.allFinite(); });
}

}  // namespace

IterationResiduals admm_iterate(AdmmState& s, const ProposedProblem& problem) {
  const auto& G = problem.synthesis();
  const auto& D = problem.difference();
  const auto& cfg = problem.config();
  const auto J = static_cast<std::size_t>(problem.trials());
  const double gamma = cfg.gamma;
  const double kappa = gamma * cfg.lambda;

  // u- and sigma-updates
  for (std::size_t j = 0; j < J; ++j) {
    s.u[j] = G.solve_shifted_gram_rows(1.0, G.adjoint_rows(s.x[j] - s.q[j]) + s.u_tilde[j] - s.r[j]);
  }
  s.sigma = D.solve_identity_plus_gram_rows(D.apply_transpose_rows(s.eta - s.zeta) + s.sigma_tilde - s.tau);
  if (!finite(s.u)) throw DivergenceError("u");
  if (!s.sigma.allFinite()) throw DivergenceError("sigma");

  // x-update
  std::vector<RowMatrixXcd> Gu(J);
  const std::vector<RowMatrixXcd> x_old = s.x;
  for (std::size_t j = 0; j < J; ++j) {
    Gu[j] = G.synthesize_rows(s.u[j]);
    s.x[j] = problem.mixing().fidelity_step(problem.adjoint_data(static_cast<Index>(j)), Gu[j] + s.q[j], gamma);
  }
  if (!finite(s.x)) throw DivergenceError("x");

  // (u~, sigma~) = prox_{kappa phi} per (n, k)
  const std::vector<RowMatrixXcd> ut_old = s.u_tilde;
  const RowMatrixXd st_old = s.sigma_tilde;
  Eigen::VectorXcd v(static_cast<Index>(J));
  for (Index n = 0; n < s.sigma.rows(); ++n) {
    for (Index k = 0; k < s.sigma.cols(); ++k) {
      for (std::size_t j = 0; j < J; ++j) v[static_cast<Index>(j)] = s.u[j](n, k) + s.r[j](n, k);
      double t = s.sigma(n, k) + s.tau(n, k);
      prox_perspective_inplace(v, t, kappa);
      for (std::size_t j = 0; j < J; ++j) s.u_tilde[j](n, k) = v[static_cast<Index>(j)];
      s.sigma_tilde(n, k) = t;
    }
  }
  if (!finite(s.u_tilde)) throw DivergenceError("u_tilde");
  if (!s.sigma_tilde.allFinite()) throw DivergenceError("sigma_tilde");

  // eta = P_{B1^alpha}(D^r sigma + zeta)
  const RowMatrixXd Ds = D.apply_rows(s.sigma);
  const RowMatrixXd eta_old = s.eta;
  s.eta = project_l1_ball(Ds + s.zeta, cfg.alpha);
  if (!s.eta.allFinite()) throw DivergenceError("eta");

  IterationResiduals res;
  double gu2 = 0.0, x2 = 0.0, gux2 = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const RowMatrixXcd diff = Gu[j] - s.x[j];
    gux2 += diff.squaredNorm();
    gu2 += Gu[j].squaredNorm();
    x2 += s.x[j].squaredNorm();
    s.q[j] += diff;
    s.r[j] += s.u[j] - s.u_tilde[j];
  }
  res.primal[0] = std::sqrt(gux2);
  res.primal_scale[0] = std::max({std::sqrt(gu2), std::sqrt(x2), 1.0});
  res.primal[1] = std::sqrt(squared_distance(s.u, s.u_tilde));
  res.primal_scale[1] = std::max({std::sqrt(squared_norm(s.u)), std::sqrt(squared_norm(s.u_tilde)), 1.0});
  res.primal[2] = (s.sigma - s.sigma_tilde).norm();
  res.primal_scale[2] = std::max({s.sigma.norm(), s.sigma_tilde.norm(), 1.0});
  res.primal[3] = (Ds - s.eta).norm();
  res.primal_scale[3] = std::max({Ds.norm(), s.eta.norm(), 1.0});
  s.tau += s.sigma - s.sigma_tilde;
  s.zeta += Ds - s.eta;

  res.dual = std::sqrt(squared_distance(s.x, x_old) + squared_distance(s.u_tilde, ut_old) +
                       (s.sigma_tilde - st_old).squaredNorm() + (s.eta - eta_old).squaredNorm());
  res.dual_scale = std::max(1.0, std::sqrt(x2 + squared_norm(s.u_tilde) + s.sigma_tilde.squaredNorm() +
                                           s.eta.squaredNorm()));
  ++s.iteration;
  return res;
}

// ---------------------------------------------------------------------------
// Objective and solve

RowMatrixXd feasible_sigma(const RowMatrixXd& sigma, const DifferenceOperator& D, double alpha) {
  const double total = D.apply_rows(sigma).cwiseAbs().sum();
  if (total <= alpha) return sigma;
  const double t = alpha / total;
  RowMatrixXd out(sigma.rows(), sigma.cols());
  for (Index n = 0; n < sigma.rows(); ++n) {
    const double mean = sigma.row(n).mean();
    out.row(n) = (mean + t * (sigma.row(n).array() - mean)).matrix();
  }
  return out.cwiseMax(0.0);
}

double objective(const SpectralCoefficients& u, const SigmaField& sigma,
                 const ObservationSet& observations, const MixingModel& mixing,
                 const SynthesisOperator& G, double lambda, const DifferenceOperator& D,
                 double alpha) {
  if (u.trials() != observations.trials() || u.sources() != mixing.sources() ||
      u.bins() != mixing.bins() || sigma.sigma.rows() != u.sources() ||
      sigma.sigma.cols() != u.bins()) {
    throw std::invalid_argument("objective: shape mismatch");
  }
  const double budget = D.apply_rows(sigma.sigma).cwiseAbs().sum();
  if (budget > alpha + 1e-9 * std::max(1.0, alpha)) return std::numeric_limits<double>::infinity();

  double data = 0.0;
  for (Index j = 0; j < u.trials(); ++j) {
    const RowMatrixXcd x = G.synthesize_rows(u.u[static_cast<std::size_t>(j)]);
    data += (observations.y[static_cast<std::size_t>(j)] - mixing.apply(x)).squaredNorm();
  }
  double penalty = 0.0;
  Eigen::VectorXcd v(u.trials());
  for (Index n = 0; n < u.sources(); ++n) {
    for (Index k = 0; k < u.bins(); ++k) {
      for (Index j = 0; j < u.trials(); ++j) v[j] = u(j, n, k);
      penalty += phi_value(v, sigma.sigma(n, k));
    }
  }
  return 0.5 * data + lambda * penalty;
}

SolveDiagnostics drive_admm(const SolverConfig& cfg, const std::function<IterationResiduals()>& step,
                            const std::function<double()>& objective) {
  SolveDiagnostics diag;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const IterationResiduals res = step();
    diag.primal_residuals.push_back(res.primal);
    diag.dual_residuals.push_back(res.dual);
    if (cfg.record_objective) diag.objective.push_back(objective());
    ++diag.iterations;
    if (res.primal_relative() <= cfg.tol_primal && res.dual_relative() <= cfg.tol_dual) {
      diag.converged = true;
      break;
    }
  }
  return diag;
}

SolveResult solve(const ProposedProblem& problem, AdmmState& state) {
  const auto& cfg = problem.config();
  const auto evaluate = [&]() {
    SpectralCoefficients ut;
    ut.u = state.u_tilde;
    SigmaField sf{feasible_sigma(state.sigma_tilde, problem.difference(), cfg.alpha)};
    return objective(ut, sf, problem.observations(), problem.mixing(), problem.synthesis(), cfg.lambda,
                     problem.difference(), cfg.alpha);
  };
  SolveResult result;
  result.diagnostics = drive_admm(cfg, [&] { return admm_iterate(state, problem); }, evaluate);
  result.u_hat.u = state.u_tilde;
  result.sigma_hat.sigma = state.sigma_tilde;
  result.psd.S = state.sigma_tilde.array().square().matrix();
  const auto& obj = result.diagnostics.objective;
  result.final_objective = obj.empty() ? evaluate() : obj.back();
  return result;
}

SolveResult solve(const ObservationSet& observations, MixingModel mixing, const SolverConfig& config) {
  const ProposedProblem problem(observations, std::move(mixing), config);
  AdmmState state = AdmmState::zeros(problem.trials(), problem.mixing().sources(), problem.mixing().bins());
  return solve(problem, state);
}

SolveResult solve(const ObservationSet& observations, const Scenario& geometry, const SolverConfig& config) {
  return solve(observations, MixingModel::pawr(steering_matrix(geometry.theta, geometry.radar), geometry.bins()),
               config);
}

SolverConfig default_tuning(Index bins, Index trials, SynthesisKind kind, Index elements, Index sources) {
  struct Row {
    Index L, J;
    SynthesisKind kind;
    double lambda_per_ratio, alpha_per_source;
  };
  static constexpr Row kTable[] = {
      {32, 1, SynthesisKind::DFT, 0.02, 60.0},   {32, 1, SynthesisKind::WindowedDFT, 0.01, 60.0},
      {128, 1, SynthesisKind::DFT, 0.05, 20.0},  {128, 1, SynthesisKind::WindowedDFT, 0.03, 20.0},
      {32, 2, SynthesisKind::DFT, 0.03, 60.0},   {32, 2, SynthesisKind::WindowedDFT, 0.02, 60.0},
      {128, 2, SynthesisKind::DFT, 0.04, 20.0},  {128, 2, SynthesisKind::WindowedDFT, 0.03, 20.0},
  };
  for (const auto& row : kTable) {
    if (row.L == bins && row.J == trials && row.kind == kind) {
      SolverConfig cfg;
      const double ratio = static_cast<double>(elements) / static_cast<double>(sources);
      cfg.lambda = row.lambda_per_ratio * ratio;
      cfg.alpha = row.alpha_per_source * static_cast<double>(sources);
      cfg.r = 2;
      cfg.gamma = kPresetGamma;
      cfg.max_iter = kPresetMaxIter;
      cfg.synthesis_kind = kind;
      return cfg;
    }
  }
  throw MissingDefaultError("no preset for L=" + std::to_string(bins) + ", J=" + std::to_string(trials) +
                            ", synthesis=" + to_string(kind) + "; pass --lambda and --alpha explicitly");
}

}  // namespace sparsepsd
