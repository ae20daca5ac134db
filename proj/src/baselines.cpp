#include "sparsepsd/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "sparsepsd/proxops.hpp"

namespace sparsepsd {

PsdEstimate periodogram_avg(const SpectralCoefficients& u) {
  PsdEstimate out;
  if (u.trials() == 0) return out;
  out.S = RowMatrixXd::Zero(u.sources(), u.bins());
  for (const auto& uj : u.u) out.S += uj.cwiseAbs2();
  out.S /= static_cast<double>(u.trials());
  return out;
}

PsdEstimate daniell_smooth(const PsdEstimate& S, Index radius) {
  const Index L = S.bins();
  if (radius < 0) throw std::invalid_argument("daniell_smooth: radius must be >= 0");
  if (2 * radius + 1 > L) throw std::invalid_argument("daniell_smooth: window exceeds the number of bins");
  PsdEstimate out;
  out.S = RowMatrixXd::Zero(S.sources(), L);
  for (Index k = 0; k < L; ++k) {
    for (Index d = -radius; d <= radius; ++d) out.S.col(k) += S.S.col(((k + d) % L + L) % L);
  }
  out.S /= static_cast<double>(2 * radius + 1);
  return out;
}

// ---------------------------------------------------------------------------
// psi oracles

std::vector<Index> BlockPartition::block(Index m) const {
  const Index h = size();
  const Index first = starts[static_cast<std::size_t>(m)];
  const Index next = starts[static_cast<std::size_t>((m + 1) % h)];
  Index len = ((next - first) % bins + bins) % bins;
  if (len == 0) len = bins;
  std::vector<Index> out;
  for (Index i = 0; i < len; ++i) out.push_back((first + i) % bins);
  return out;
}

void BlockPartition::validate() const {
  if (bins < 1 || starts.empty()) throw std::invalid_argument("partition: empty");
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i] < 0 || starts[i] >= bins) throw std::invalid_argument("partition: start out of range");
    if (i > 0 && starts[i] <= starts[i - 1]) throw std::invalid_argument("partition: starts not increasing");
  }
}

namespace {

constexpr Index kMaxOracleBins = 10;

void check_oracle_input(const Eigen::MatrixXcd& u, Index max_blocks) {
  if (u.cols() < 1 || u.rows() < 1) throw std::invalid_argument("psi: empty input");
  if (u.cols() > kMaxOracleBins) throw std::invalid_argument("psi: L too large for enumeration");
  if (max_blocks < 1 || max_blocks > u.cols()) throw std::invalid_argument("psi: need 1 <= H <= L");
}

}  // namespace

std::vector<BlockPartition> enumerate_circular_partitions(Index bins, Index max_blocks) {
  if (bins < 1 || bins > kMaxOracleBins) throw std::invalid_argument("partitions: L out of range");
  std::vector<BlockPartition> out;
  out.push_back({bins, {0}});
  for (Index h = 2; h <= std::min(max_blocks, bins); ++h) {
    // all h-subsets of {0..L-1} in lexicographic order
    std::vector<Index> idx(static_cast<std::size_t>(h));
    for (Index i = 0; i < h; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      out.push_back({bins, idx});
      Index i = h - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == bins - h + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (Index k = i + 1; k < h; ++k) idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
  }
  return out;
}

double psi_bruteforce(const Eigen::MatrixXcd& u, Index max_blocks) {
  check_oracle_input(u, max_blocks);
  const double J = static_cast<double>(u.rows());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& part : enumerate_circular_partitions(u.cols(), max_blocks)) {
    double value = 0.0;
    for (Index m = 0; m < part.size(); ++m) {
      const auto bins = part.block(m);
      double energy = 0.0;
      for (Index k : bins) energy += u.col(k).squaredNorm();
      value += std::sqrt(J * static_cast<double>(bins.size())) * std::sqrt(energy);
    }
    best = std::min(best, value);
  }
  return best;
}

double psi_sigma_form(const Eigen::MatrixXcd& u, Index max_blocks) {
  check_oracle_input(u, max_blocks);
  const Index L = u.cols();
  const double J = static_cast<double>(u.rows());
  double best = std::numeric_limits<double>::infinity();
  // Bit g of the mask allows (D sigma)_g = sigma[g+1] - sigma[g] to be nonzero.
  for (unsigned mask = 0; mask < (1u << L); ++mask) {
    const Index jumps = std::popcount(mask);
    if (jumps > max_blocks) continue;
    Eigen::VectorXd sigma(L);
    if (jumps <= 1) {
      // one jump alone is impossible on a circle: sigma is constant
      sigma.setConstant(std::sqrt(u.squaredNorm() / (J * static_cast<double>(L))));
    } else {
      Index start = 0;
      while (!((mask >> ((start + L - 1) % L)) & 1u)) ++start;
      for (Index done = 0; done < L;) {
        Index len = 1;
        while (!((mask >> ((start + len - 1) % L)) & 1u)) ++len;
        double energy = 0.0;
        for (Index i = 0; i < len; ++i) energy += u.col((start + i) % L).squaredNorm();
        const double level = std::sqrt(energy / (J * static_cast<double>(len)));
        for (Index i = 0; i < len; ++i) sigma[(start + i) % L] = level;
        start = (start + len) % L;
        done += len;
      }
    }
    double value = 0.0;
    for (Index k = 0; k < L; ++k) value += phi_value(u.col(k), sigma[k]);
    best = std::min(best, value);
  }
  return best;
}

// ---------------------------------------------------------------------------
// configuration

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::MMSE: return "mmse";
    case BaselineMethod::L1: return "l1";
    case BaselineMethod::LatentGroupLasso: return "mixed";
  }
  return "unknown";
}

BaselineMethod parse_baseline_method(const std::string& name) {
  if (name == "mmse") return BaselineMethod::MMSE;
  if (name == "l1") return BaselineMethod::L1;
  if (name == "mixed" || name == "lgl") return BaselineMethod::LatentGroupLasso;
  throw std::invalid_argument("unknown baseline method '" + name + "' (expected mmse, l1 or mixed)");
}

void BaselineConfig::validate() const {
  if (block < 1) throw std::invalid_argument("baseline: block size must be >= 1");
  if (smoothing_radius < 0) throw std::invalid_argument("baseline: smoothing radius must be >= 0");
  if (method == BaselineMethod::MMSE) {
    if (!(noise_std >= 0.0)) throw std::invalid_argument("baseline: noise_std must be >= 0");
    if (refinement_passes < 0) throw std::invalid_argument("baseline: refinement passes must be >= 0");
  } else {
    admm().validate();
  }
}

SolverConfig BaselineConfig::admm() const {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.gamma = gamma;
  cfg.max_iter = max_iter;
  cfg.tol_primal = tol_primal;
  cfg.tol_dual = tol_dual;
  cfg.synthesis_kind = synthesis_kind;
  cfg.record_objective = record_objective;
  return cfg;
}

BaselineConfig default_baseline_config(BaselineMethod method, Index bins, Index trials,
                                       SynthesisKind kind, Index elements, Index sources,
                                       double noise_std) {
  struct Row {
    Index L, J;
    SynthesisKind kind;
    Index mmse_R;
    double l1_lambda;
    Index l1_R;
    double lgl_lambda;
    Index lgl_B, lgl_R;
  };
  constexpr auto D = SynthesisKind::DFT;
  constexpr auto W = SynthesisKind::WindowedDFT;
  static constexpr Row kTable[] = {
      {32, 1, D, 1, 0.003, 1, 0.03, 7, 1},    {32, 1, W, 1, 0.003, 1, 0.02, 9, 1},
      {128, 1, D, 5, 0.005, 4, 0.05, 36, 4},  {128, 1, W, 5, 0.003, 5, 0.02, 36, 4},
      {32, 2, D, 1, 0.01, 1, 0.02, 7, 1},     {32, 2, W, 1, 0.006, 1, 0.01, 6, 1},
      {128, 2, D, 4, 0.005, 4, 0.02, 36, 3},  {128, 2, W, 4, 0.004, 4, 0.02, 36, 3},
  };
  for (const auto& row : kTable) {
    if (row.L != bins || row.J != trials || row.kind != kind) continue;
    BaselineConfig cfg;
    cfg.method = method;
    cfg.synthesis_kind = kind;
    cfg.noise_std = noise_std;
    cfg.gamma = kPresetGamma;
    cfg.max_iter = kPresetMaxIter;
    const double ratio = static_cast<double>(elements) / static_cast<double>(sources);
    switch (method) {
      case BaselineMethod::MMSE:
        cfg.smoothing_radius = row.mmse_R;
        break;
      case BaselineMethod::L1:
        cfg.lambda = row.l1_lambda * ratio;
        cfg.smoothing_radius = row.l1_R;
        break;
      case BaselineMethod::LatentGroupLasso:
        cfg.lambda = row.lgl_lambda * ratio;
        cfg.block = row.lgl_B;
        cfg.smoothing_radius = row.lgl_R;
        break;
    }
    return cfg;
  }
  throw MissingDefaultError("no " + to_string(method) + " preset for L=" + std::to_string(bins) +
                            ", J=" + std::to_string(trials) + ", synthesis=" + to_string(kind));
}

// ---------------------------------------------------------------------------
// MMSE beamformer

RowMatrixXcd wiener_unmix(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& steering,
                          const Eigen::VectorXd& power, double noise_std) {
  const Index N = steering.cols();
  if (Y.rows() != steering.rows()) throw std::invalid_argument("wiener_unmix: row mismatch");
  if (power.size() != N) throw std::invalid_argument("wiener_unmix: power length mismatch");
  std::vector<Index> active;
  for (Index n = 0; n < N; ++n) {
    if (power[n] > 0.0) active.push_back(n);
  }
  RowMatrixXcd X = RowMatrixXcd::Zero(N, Y.cols());
  if (active.empty()) return X;
  const auto na = static_cast<Index>(active.size());
  Eigen::MatrixXcd Sa(steering.rows(), na);
  for (Index i = 0; i < na; ++i) Sa.col(i) = steering.col(active[static_cast<std::size_t>(i)]);
  Eigen::MatrixXcd K = Sa.adjoint() * Sa;
  const double s2 = noise_std * noise_std;
  for (Index i = 0; i < na; ++i) K(i, i) += s2 / power[active[static_cast<std::size_t>(i)]];
  Eigen::LLT<Eigen::MatrixXcd> llt(K);
  if (llt.info() != Eigen::Success) throw std::runtime_error("mmse: singular system");
  const Eigen::MatrixXcd Xa = llt.solve(Sa.adjoint() * Y);
  if (!Xa.allFinite()) throw std::runtime_error("mmse: singular system");
  for (Index i = 0; i < na; ++i) X.row(active[static_cast<std::size_t>(i)]) = Xa.row(i);
  return X;
}

std::vector<RowMatrixXcd> mmse_unmix(const ObservationSet& observations, const Eigen::MatrixXcd& steering,
                                     double noise_std, int refinement_passes) {
  observations.validate();
  const Index M = steering.rows();
  const Index N = steering.cols();
  if (M < 1) throw std::invalid_argument("mmse: M must be >= 1");
  if (observations.length() % M != 0) throw std::invalid_argument("mmse: data length not a multiple of M");
  const Index L = observations.length() / M;
  const auto J = static_cast<std::size_t>(observations.trials());
  std::vector<Eigen::Map<const Eigen::MatrixXcd>> Y;
  for (const auto& y : observations.y) Y.emplace_back(y.data(), M, L);

  const double count = static_cast<double>(J) * static_cast<double>(L);
  Eigen::VectorXd power = Eigen::VectorXd::Zero(N);
  for (std::size_t j = 0; j < J; ++j) {
    power += (steering.adjoint() * Y[j]).cwiseAbs2().rowwise().sum() / (static_cast<double>(M) * M);
  }
  power /= count;

  std::vector<RowMatrixXcd> X(J);
  for (int pass = 0; pass <= refinement_passes; ++pass) {
    for (std::size_t j = 0; j < J; ++j) X[j] = wiener_unmix(Y[j], steering, power, noise_std);
    if (pass == refinement_passes) break;
    power.setZero();
    for (std::size_t j = 0; j < J; ++j) power += X[j].cwiseAbs2().rowwise().sum();
    power /= count;
  }
  return X;
}

SpectralCoefficients mmse_beamformer(const ObservationSet& observations, const Eigen::MatrixXcd& steering,
                                     double noise_std, const SynthesisOperator& G, int refinement_passes) {
  SpectralCoefficients out;
  for (auto& x : mmse_unmix(observations, steering, noise_std, refinement_passes)) {
    if (x.cols() != G.bins()) throw std::invalid_argument("mmse: synthesis size mismatch");
    out.u.push_back(G.analyze_rows(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// l1 and latent group lasso, both on the solver's ADMM driver

namespace {

double data_misfit(const std::vector<RowMatrixXcd>& u, const ObservationSet& observations,
                   const MixingModel& mixing, const SynthesisOperator& G) {
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    acc += (observations.y[j] - mixing.apply(G.synthesize_rows(u[j]))).squaredNorm();
  }
  return 0.5 * acc;
}

void check_problem(const ObservationSet& observations, const MixingModel& mixing, const SynthesisOperator& G) {
  observations.validate();
  if (observations.length() != mixing.data_length()) {
    throw std::invalid_argument("observation length does not match the mixing model");
  }
  if (G.bins() != mixing.bins()) throw std::invalid_argument("synthesis size does not match the mixing model");
}

double rel(double a, double b) { return std::max({a, b, 1.0}); }

}  // namespace

double l1_objective(const SpectralCoefficients& u, const ObservationSet& observations,
                    const MixingModel& mixing, const SynthesisOperator& G, double lambda) {
  double penalty = 0.0;
  for (const auto& uj : u.u) penalty += uj.cwiseAbs().sum();
  return data_misfit(u.u, observations, mixing, G) + lambda * penalty;
}

BaselineResult l1_estimator(const ObservationSet& observations, MixingModel mixing,
                            const SynthesisOperator& G, const SolverConfig& config) {
  config.validate();
  check_problem(observations, mixing, G);
  const double gamma = config.gamma;
  const double t = gamma * config.lambda;
  if (mixing.factorized_gamma() != gamma) mixing.factorize(gamma);
  const auto J = static_cast<std::size_t>(observations.trials());
  const RowMatrixXcd zero = RowMatrixXcd::Zero(mixing.sources(), mixing.bins());
  std::vector<RowMatrixXcd> Ahy, u(J, zero), x(J, zero), ut(J, zero), q(J, zero), r(J, zero);
  for (const auto& y : observations.y) Ahy.push_back(mixing.adjoint(y));

  const auto step = [&]() {
    IterationResiduals res;
    double gux = 0, gu = 0, xx = 0, uu = 0, uut = 0, utt = 0, dx = 0;
    for (std::size_t j = 0; j < J; ++j) {
      u[j] = G.solve_shifted_gram_rows(1.0, G.adjoint_rows(x[j] - q[j]) + ut[j] - r[j]);
      if (!u[j].allFinite()) throw DivergenceError("u");
      const RowMatrixXcd Gu = G.synthesize_rows(u[j]);
      const RowMatrixXcd x_old = std::move(x[j]);
      x[j] = mixing.fidelity_step(Ahy[j], Gu + q[j], gamma);
      if (!x[j].allFinite()) throw DivergenceError("x");
      const RowMatrixXcd ut_old = ut[j];
      ut[j] = (u[j] + r[j]).unaryExpr([t](Complex z) { return soft_threshold_complex(z, t); });
      q[j] += Gu - x[j];
      r[j] += u[j] - ut[j];
      gux += (Gu - x[j]).squaredNorm();
      gu += Gu.squaredNorm();
      xx += x[j].squaredNorm();
      uu += u[j].squaredNorm();
      uut += (u[j] - ut[j]).squaredNorm();
      utt += ut[j].squaredNorm();
      dx += (x[j] - x_old).squaredNorm() + (ut[j] - ut_old).squaredNorm();
    }
    res.primal = {std::sqrt(gux), std::sqrt(uut), 0.0, 0.0};
    res.primal_scale = {rel(std::sqrt(gu), std::sqrt(xx)), rel(std::sqrt(uu), std::sqrt(utt)), 1.0, 1.0};
    res.dual = std::sqrt(dx);
    res.dual_scale = std::max(1.0, std::sqrt(xx + utt));
    return res;
  };
  const auto evaluate = [&]() {
    SpectralCoefficients s;
    s.u = ut;
    return l1_objective(s, observations, mixing, G, config.lambda);
  };

  BaselineResult result;
  result.diagnostics = drive_admm(config, step, evaluate);
  result.u.u = ut;
  result.final_objective = result.diagnostics.objective.empty() ? evaluate() : result.diagnostics.objective.back();
  return result;
}

RowMatrixXcd latent_expand(const RowMatrixXcd& v, Index bins, Index block) {
  if (v.cols() != bins * block) throw std::invalid_argument("latent_expand: shape mismatch");
  RowMatrixXcd u = RowMatrixXcd::Zero(v.rows(), bins);
  for (Index b = 0; b < bins; ++b) {
    for (Index o = 0; o < block; ++o) u.col((b + o) % bins) += v.col(b * block + o);
  }
  return u;
}

RowMatrixXcd latent_gather(const RowMatrixXcd& u, Index block) {
  const Index L = u.cols();
  RowMatrixXcd v(u.rows(), L * block);
  for (Index b = 0; b < L; ++b) {
    for (Index o = 0; o < block; ++o) v.col(b * block + o) = u.col((b + o) % L);
  }
  return v;
}

double latent_group_lasso_objective(const std::vector<RowMatrixXcd>& v, Index block,
                                    const ObservationSet& observations, const MixingModel& mixing,
                                    const SynthesisOperator& G, double lambda) {
  const Index L = mixing.bins();
  std::vector<RowMatrixXcd> u;
  for (const auto& vj : v) u.push_back(latent_expand(vj, L, block));
  const double weight = std::sqrt(static_cast<double>(v.size()) * static_cast<double>(block));
  double penalty = 0.0;
  for (Index n = 0; n < mixing.sources(); ++n) {
    for (Index b = 0; b < L; ++b) {
      double energy = 0.0;
      for (const auto& vj : v) energy += vj.row(n).segment(b * block, block).squaredNorm();
      penalty += std::sqrt(energy);
    }
  }
  return data_misfit(u, observations, mixing, G) + lambda * weight * penalty;
}

BaselineResult latent_group_lasso(const ObservationSet& observations, MixingModel mixing,
                                  const SynthesisOperator& G, const SolverConfig& config, Index block) {
  config.validate();
  check_problem(observations, mixing, G);
  const Index L = mixing.bins();
  const Index N = mixing.sources();
  if (block < 1 || block > L) throw std::invalid_argument("latent_group_lasso: need 1 <= B <= L");
  const double gamma = config.gamma;
  if (mixing.factorized_gamma() != gamma) mixing.factorize(gamma);
  const auto J = static_cast<std::size_t>(observations.trials());
  const double Bd = static_cast<double>(block);
  const double threshold = gamma * config.lambda * std::sqrt(static_cast<double>(J) * Bd);

  const RowMatrixXcd zu = RowMatrixXcd::Zero(N, L);
  const RowMatrixXcd zv = RowMatrixXcd::Zero(N, L * block);
  std::vector<RowMatrixXcd> Ahy, u(J, zu), x(J, zu), q(J, zu), s(J, zu);
  std::vector<RowMatrixXcd> v(J, zv), vt(J, zv), r(J, zv);
  for (const auto& y : observations.y) Ahy.push_back(mixing.adjoint(y));

  const auto step = [&]() {
    IterationResiduals res;
    double gux = 0, gu = 0, xx = 0, vvt = 0, vv = 0, vtt = 0, uev = 0, uu = 0, dx = 0;
    std::vector<RowMatrixXcd> Gu(J);
    for (std::size_t j = 0; j < J; ++j) {
      // joint (u, v) minimization through E E^H = B I
      const RowMatrixXcd c1 = G.adjoint_rows(x[j] - q[j]) - s[j];
      const RowMatrixXcd c2 = vt[j] - r[j] + latent_gather(s[j], block);
      u[j] = G.solve_shifted_gram_rows(1.0 / (1.0 + Bd), c1 + latent_expand(c2, L, block) / (1.0 + Bd));
      const RowMatrixXcd w = c2 + latent_gather(u[j], block);
      v[j] = w - latent_gather(latent_expand(w, L, block), block) / (1.0 + Bd);
      if (!u[j].allFinite()) throw DivergenceError("u");
      if (!v[j].allFinite()) throw DivergenceError("v");
      Gu[j] = G.synthesize_rows(u[j]);
      const RowMatrixXcd x_old = std::move(x[j]);
      x[j] = mixing.fidelity_step(Ahy[j], Gu[j] + q[j], gamma);
      if (!x[j].allFinite()) throw DivergenceError("x");
      dx += (x[j] - x_old).squaredNorm();
    }
    // group shrinkage of each latent block jointly over trials
    const std::vector<RowMatrixXcd> vt_old = vt;
    Eigen::VectorXcd g(static_cast<Index>(J) * block);
    for (Index n = 0; n < N; ++n) {
      for (Index b = 0; b < L; ++b) {
        for (std::size_t j = 0; j < J; ++j) {
          g.segment(static_cast<Index>(j) * block, block) =
              (v[j].row(n).segment(b * block, block) + r[j].row(n).segment(b * block, block)).transpose();
        }
        const Eigen::VectorXcd shrunk = group_shrink(g, threshold);
        for (std::size_t j = 0; j < J; ++j) {
          vt[j].row(n).segment(b * block, block) = shrunk.segment(static_cast<Index>(j) * block, block).transpose();
        }
      }
    }
    for (std::size_t j = 0; j < J; ++j) {
      const RowMatrixXcd Ev = latent_expand(v[j], L, block);
      q[j] += Gu[j] - x[j];
      r[j] += v[j] - vt[j];
      s[j] += u[j] - Ev;
      gux += (Gu[j] - x[j]).squaredNorm();
      gu += Gu[j].squaredNorm();
      xx += x[j].squaredNorm();
      vvt += (v[j] - vt[j]).squaredNorm();
      vv += v[j].squaredNorm();
      vtt += vt[j].squaredNorm();
      uev += (u[j] - Ev).squaredNorm();
      uu += u[j].squaredNorm();
      dx += (vt[j] - vt_old[j]).squaredNorm();
    }
    res.primal = {std::sqrt(gux), std::sqrt(vvt), std::sqrt(uev), 0.0};
    res.primal_scale = {rel(std::sqrt(gu), std::sqrt(xx)), rel(std::sqrt(vv), std::sqrt(vtt)), rel(std::sqrt(uu), 0.0),
                        1.0};
    res.dual = std::sqrt(dx);
    res.dual_scale = std::max(1.0, std::sqrt(xx + vtt));
    return res;
  };
  const auto evaluate = [&]() {
    return latent_group_lasso_objective(vt, block, observations, mixing, G, config.lambda);
  };

  BaselineResult result;
  result.diagnostics = drive_admm(config, step, evaluate);
  for (const auto& vj : vt) result.u.u.push_back(latent_expand(vj, L, block));
  result.final_objective = result.diagnostics.objective.empty() ? evaluate() : result.diagnostics.objective.back();
  return result;
}

BaselineRun run_baseline(const ObservationSet& observations, const Scenario& geometry,
                         const BaselineConfig& config) {
  config.validate();
  const Eigen::MatrixXcd steering = steering_matrix(geometry.theta, geometry.radar);
  const SynthesisOperator G(config.synthesis_kind, geometry.bins());
  BaselineRun run;
  if (config.method == BaselineMethod::MMSE) {
    run.psd = periodogram_avg(mmse_beamformer(observations, steering, config.noise_std, G, config.refinement_passes));
    return run;
  }
  const MixingModel mixing = MixingModel::pawr(steering, geometry.bins());
  const BaselineResult res = config.method == BaselineMethod::L1
                                 ? l1_estimator(observations, mixing, G, config.admm())
                                 : latent_group_lasso(observations, mixing, G, config.admm(), config.block);
  run.psd = periodogram_avg(res.u);
  run.diagnostics = res.diagnostics;
  run.final_objective = res.final_objective;
  return run;
}

}  // namespace sparsepsd
