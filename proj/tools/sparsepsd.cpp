// sparsepsd command-line front end.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsepsd/baselines.hpp"
#include "sparsepsd/harness.hpp"
#include "sparsepsd/simulator.hpp"
#include "sparsepsd/solver.hpp"
#include "sparsepsd/tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sparsepsd;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<Index> trials;
  std::string out;
  std::optional<Index> bins;
  std::optional<Index> snapshots;  // J
  std::optional<std::string> synthesis;
  std::optional<double> lambda, alpha, gamma, tol;
  std::optional<int> r, max_iter;
};

void add_tuning_flags(CLI::App* app, Common& c) {
  app->add_option("--synthesis", c.synthesis, "Synthesis operator")->check(CLI::IsMember({"dft", "wdft"}));
  app->add_option("--lambda", c.lambda, "Regularization weight");
  app->add_option("--gamma", c.gamma, "ADMM step size");
  app->add_option("--max-iter", c.max_iter, "ADMM iteration cap");
  app->add_option("--tol", c.tol, "Primal and dual stopping tolerance");
}

struct LoadedData {
  Scenario scenario;
  ObservationSet observations;
};

LoadedData load_data(const std::string& dir) {
  LoadedData d;
  d.scenario = scenario_from_json(read_text_file(fs::path(dir) / "scenario.json"));
  d.observations = observation_set(read_binary(fs::path(dir) / "observations.bin"));
  d.observations.validate();
  if (d.observations.length() != d.scenario.radar.elements * d.scenario.bins()) {
    throw std::runtime_error("observations do not match scenario.json");
  }
  return d;
}

json residual_trace(const SolveDiagnostics& diag) {
  json j = json::array();
  for (const auto& r : diag.primal_residuals) j.push_back({r[0], r[1], r[2], r[3]});
  return j;
}

int cmd_simulate(const std::string& config_path, const Common& c) {
  ScenarioConfig cfg;
  if (!config_path.empty()) cfg = scenario_config_from_json(read_text_file(config_path));
  if (c.bins) cfg.bins = *c.bins;
  if (c.snapshots) cfg.trials = *c.snapshots;
  const Scenario scenario = make_scenario(cfg, c.seed.value_or(1));
  const SimulationOutput sim = simulate(scenario);
  const fs::path out(c.out);
  fs::create_directories(out);
  write_text_file(out / "scenario.json", scenario_to_json(scenario));
  write_binary(out / "observations.bin", to_tensor(sim.observations));
  write_binary(out / "truth_psd.bin", to_tensor(sim.truth.S_star));
  write_csv(out / "truth_psd.csv", to_tensor(sim.truth.S_star));
  write_binary(out / "realizations.bin", to_tensor(sim.realizations));
  std::cout << "wrote " << sim.observations.trials() << " observation vector(s) of length "
            << sim.observations.length() << " to " << out.string() << "\n";
  return 0;
}

int cmd_solve(const std::string& data_dir, const Common& c) {
  const LoadedData d = load_data(data_dir);
  const Index L = d.scenario.bins();
  const Index J = d.observations.trials();
  const auto kind = parse_synthesis_kind(c.synthesis.value_or("dft"));
  SolverConfig cfg;
  cfg.gamma = kPresetGamma;
  cfg.max_iter = kPresetMaxIter;
  if (!(c.lambda && c.alpha)) {
    cfg = default_tuning(L, J, kind, d.scenario.radar.elements, d.scenario.sources());
  }
  cfg.synthesis_kind = kind;
  if (c.lambda) cfg.lambda = *c.lambda;
  if (c.alpha) cfg.alpha = *c.alpha;
  if (c.gamma) cfg.gamma = *c.gamma;
  if (c.r) cfg.r = *c.r;
  if (c.max_iter) cfg.max_iter = *c.max_iter;
  if (c.tol) cfg.tol_primal = cfg.tol_dual = *c.tol;
  const SolveResult res = solve(d.observations, d.scenario, cfg);

  const fs::path out(c.out);
  fs::create_directories(out);
  write_binary(out / "psd.bin", to_tensor(res.psd));
  write_csv(out / "psd.csv", to_tensor(res.psd));
  write_binary(out / "sigma.bin", to_tensor(res.sigma_hat));
  write_binary(out / "u.bin", to_tensor(res.u_hat));
  const json diag = {{"lambda", cfg.lambda},
                     {"alpha", cfg.alpha},
                     {"gamma", cfg.gamma},
                     {"r", cfg.r},
                     {"synthesis", to_string(cfg.synthesis_kind)},
                     {"max_iter", cfg.max_iter},
                     {"tol", cfg.tol_primal},
                     {"iterations", res.diagnostics.iterations},
                     {"converged", res.diagnostics.converged},
                     {"final_objective", res.final_objective},
                     {"objective", res.diagnostics.objective},
                     {"primal_residuals", residual_trace(res.diagnostics)},
                     {"dual_residuals", res.diagnostics.dual_residuals}};
  write_text_file(out / "diagnostics.json", diag.dump(2) + "\n");
  std::cout << "proposed: " << res.diagnostics.iterations << " iterations, "
            << (res.diagnostics.converged ? "converged" : "iteration cap reached") << ", objective "
            << format_double(res.final_objective) << "\n";
  return res.diagnostics.converged ? 0 : 3;
}

int cmd_baseline(const std::string& data_dir, const std::string& method, std::optional<Index> block,
                 std::optional<Index> radius, const Common& c) {
  const LoadedData d = load_data(data_dir);
  const auto kind = parse_synthesis_kind(c.synthesis.value_or("dft"));
  const BaselineMethod m = parse_baseline_method(method);
  BaselineConfig cfg;
  const bool explicit_params = (m == BaselineMethod::MMSE || c.lambda) && radius &&
                               (m != BaselineMethod::LatentGroupLasso || block);
  if (!explicit_params) {
    cfg = default_baseline_config(m, d.scenario.bins(), d.observations.trials(), kind, d.scenario.radar.elements,
                                  d.scenario.sources(), d.scenario.radar.noise_std);
  } else {
    cfg.method = m;
    cfg.noise_std = d.scenario.radar.noise_std;
    cfg.gamma = kPresetGamma;
    cfg.max_iter = kPresetMaxIter;
  }
  cfg.synthesis_kind = kind;
  if (c.lambda) cfg.lambda = *c.lambda;
  if (block) cfg.block = *block;
  if (radius) cfg.smoothing_radius = *radius;
  if (c.gamma) cfg.gamma = *c.gamma;
  if (c.max_iter) cfg.max_iter = *c.max_iter;
  if (c.tol) cfg.tol_primal = cfg.tol_dual = *c.tol;

  const BaselineRun run = run_baseline(d.observations, d.scenario, cfg);
  const PsdEstimate& raw = run.psd;
  const PsdEstimate smooth = daniell_smooth(raw, cfg.smoothing_radius);
  const fs::path out(c.out);
  fs::create_directories(out);
  write_binary(out / "psd.bin", to_tensor(raw));
  write_binary(out / "psd_smooth.bin", to_tensor(smooth));
  write_csv(out / "psd.csv", to_tensor(raw));
  write_csv(out / "psd_smooth.csv", to_tensor(smooth));
  json diag = {{"method", to_string(m)},
               {"synthesis", to_string(cfg.synthesis_kind)},
               {"R", cfg.smoothing_radius}};
  if (m == BaselineMethod::MMSE) {
    diag["noise_std"] = cfg.noise_std;
    diag["refinement_passes"] = cfg.refinement_passes;
  } else {
    diag["lambda"] = cfg.lambda;
    diag["gamma"] = cfg.gamma;
    diag["max_iter"] = cfg.max_iter;
    diag["tol"] = cfg.tol_primal;
    if (m == BaselineMethod::LatentGroupLasso) diag["B"] = cfg.block;
    diag["iterations"] = run.diagnostics.iterations;
    diag["converged"] = run.diagnostics.converged;
    diag["final_objective"] = run.final_objective;
    diag["primal_residuals"] = residual_trace(run.diagnostics);
    diag["dual_residuals"] = run.diagnostics.dual_residuals;
  }
  write_text_file(out / "diagnostics.json", diag.dump(2) + "\n");
  std::cout << to_string(m) << ": wrote raw and R=" << cfg.smoothing_radius << " smoothed PSDs to "
            << out.string() << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::vector<std::string>& methods, const Common& c) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = experiment_config_from_json(read_text_file(config_path));
  } else {
    cfg.methods = default_methods();
  }
  if (!methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : methods) cfg.methods.push_back({m, {}, {}, {}, {}});
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (cfg.output_dir.empty()) cfg.output_dir = "bench_out";
  if (c.bins) cfg.scenario.bins = *c.bins;
  if (c.snapshots) cfg.scenario.trials = *c.snapshots;
  if (c.synthesis) cfg.synthesis_kind = parse_synthesis_kind(*c.synthesis);
  if (c.gamma) cfg.gamma = *c.gamma;
  if (c.r) cfg.r = *c.r;
  if (c.max_iter) cfg.max_iter = *c.max_iter;
  if (c.tol) cfg.tol = *c.tol;
  if (c.lambda || c.alpha) {
    for (auto& m : cfg.methods) {
      if (m.id == "proposed") {
        if (c.lambda) m.lambda = c.lambda;
        if (c.alpha) m.alpha = c.alpha;
      }
    }
  }
  const ExperimentResult res = run_experiment(cfg);
  std::cout << "method            NMAE      trials\n";
  for (const auto& row : res.rows) {
    std::string name = row.method;
    name.resize(16, ' ');
    std::cout << name << "  " << (row.failed ? std::string("failed") : format_double(row.nmae)) << "  "
              << row.per_trial.size() << (row.failed ? "  " + row.error : "") << "\n";
  }
  std::cout << "results in " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_defaults(const Common& c, Index elements, Index sources) {
  const Index Ls[] = {32, 128};
  const Index Js[] = {1, 2};
  const SynthesisKind kinds[] = {SynthesisKind::DFT, SynthesisKind::WindowedDFT};
  const double noise = RadarParams{}.noise_std;
  json rows = json::array();
  for (Index J : Js) {
    for (Index L : Ls) {
      for (auto kind : kinds) {
        if (c.bins && *c.bins != L) continue;
        if (c.snapshots && *c.snapshots != J) continue;
        if (c.synthesis && parse_synthesis_kind(*c.synthesis) != kind) continue;
        const SolverConfig p = default_tuning(L, J, kind, elements, sources);
        const auto mmse = default_baseline_config(BaselineMethod::MMSE, L, J, kind, elements, sources, noise);
        const auto l1 = default_baseline_config(BaselineMethod::L1, L, J, kind, elements, sources, noise);
        const auto lgl =
            default_baseline_config(BaselineMethod::LatentGroupLasso, L, J, kind, elements, sources, noise);
        rows.push_back({{"L", L},
                        {"J", J},
                        {"synthesis", to_string(kind)},
                        {"proposed", {{"lambda", p.lambda}, {"alpha", p.alpha}, {"r", p.r}, {"gamma", p.gamma}}},
                        {"mmse", {{"R", mmse.smoothing_radius}}},
                        {"l1", {{"lambda", l1.lambda}, {"R", l1.smoothing_radius}}},
                        {"mixed", {{"lambda", lgl.lambda}, {"B", lgl.block}, {"R", lgl.smoothing_radius}}}});
      }
    }
  }
  if (rows.empty()) {
    throw MissingDefaultError("no presets for the requested (L, J, synthesis); presets exist for L in {32, 128}, "
                              "J in {1, 2}");
  }
  std::cout << json({{"M", elements}, {"N", sources}, {"presets", rows}}).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-sparse PSD estimation for phased-array radar data"};
  app.require_subcommand(1);
  Common c;

  std::string config_path, data_dir, method;
  std::vector<std::string> methods;
  std::optional<Index> block, radius;
  Index elements = RadarParams{}.elements;
  Index sources = ScenarioConfig{}.sources;

  auto* sim = app.add_subcommand("simulate", "Draw a scenario and write its observations");
  sim->add_option("--config", config_path, "Scenario JSON")->check(CLI::ExistingFile);
  sim->add_option("--seed", c.seed, "Master seed");
  sim->add_option("--L", c.bins, "Frequency bins");
  sim->add_option("--J", c.snapshots, "Independent snapshot sets");
  sim->add_option("--out", c.out, "Output directory")->required();

  auto* sol = app.add_subcommand("solve", "Run the block-sparse estimator on simulated data");
  sol->add_option("--data", data_dir, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);
  sol->add_option("--out", c.out, "Output directory")->required();
  add_tuning_flags(sol, c);
  sol->add_option("--alpha", c.alpha, "Smoothness budget");
  sol->add_option("--r", c.r, "Difference order");

  auto* base = app.add_subcommand("baseline", "Run a comparison estimator on simulated data");
  base->add_option("--method", method, "mmse, l1 or mixed")->required();
  base->add_option("--data", data_dir, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);
  base->add_option("--out", c.out, "Output directory")->required();
  base->add_option("--block", block, "Latent block length B (mixed)");
  base->add_option("--radius", radius, "Daniell smoothing half-width R");
  add_tuning_flags(base, c);

  auto* bench = app.add_subcommand("bench", "Monte-Carlo comparison of estimators");
  bench->add_option("--config", config_path, "Experiment JSON")->check(CLI::ExistingFile);
  bench->add_option("--method", methods, "Methods to run (repeatable)");
  bench->add_option("--seed", c.seed, "Master seed");
  bench->add_option("--trials", c.trials, "Monte-Carlo trials");
  bench->add_option("--out", c.out, "Output directory");
  bench->add_option("--L", c.bins, "Frequency bins");
  bench->add_option("--J", c.snapshots, "Independent snapshot sets");
  add_tuning_flags(bench, c);
  bench->add_option("--alpha", c.alpha, "Smoothness budget (proposed)");
  bench->add_option("--r", c.r, "Difference order");

  auto* defs = app.add_subcommand("defaults", "Print the tuning presets");
  defs->add_option("--L", c.bins, "Only this L");
  defs->add_option("--J", c.snapshots, "Only this J");
  defs->add_option("--synthesis", c.synthesis, "Only this synthesis")->check(CLI::IsMember({"dft", "wdft"}));
  defs->add_option("--M", elements, "Array elements");
  defs->add_option("--N", sources, "Angular sources");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(config_path, c);
    if (sol->parsed()) return cmd_solve(data_dir, c);
    if (base->parsed()) return cmd_baseline(data_dir, method, block, radius, c);
    if (bench->parsed()) return cmd_bench(config_path, methods, c);
    if (defs->parsed()) return cmd_defaults(c, elements, sources);
  } catch (const MissingDefaultError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
