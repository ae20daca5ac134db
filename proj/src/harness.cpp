#include "sparsepsd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sparsepsd/tensor_io.hpp"

namespace sparsepsd {

using nlohmann::json;

double nmae(const PsdEstimate& truth, const PsdEstimate& estimate) {
  if (truth.S.rows() != estimate.S.rows() || truth.S.cols() != estimate.S.cols()) {
    throw std::invalid_argument("nmae: shape mismatch");
  }
  const double denom = truth.S.sum();
  if (!(denom > 0.0)) throw std::domain_error("nmae: true PSD sums to zero");
  return (truth.S - estimate.S).cwiseAbs().sum() / denom;
}

PsdMoments psd_moments(const Eigen::VectorXd& S, const FrequencyGrid& grid, double T, double lambda_cw) {
  if (S.size() != grid.size()) throw std::invalid_argument("psd_moments: length mismatch");
  PsdMoments m;
  const double total = S.sum();
  m.power = total / static_cast<double>(S.size());
  if (!(total > 0.0)) {
    m.power = 0.0;
    return m;
  }
  m.q = S / total;
  m.mean_velocity = lambda_cw / 2.0 * m.q.dot(grid.frequencies()) / T;
  return m;
}

// ---------------------------------------------------------------------------
// configuration

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (methods.empty()) throw std::invalid_argument("experiment: no methods");
  std::vector<std::string> ids;
  for (const auto& m : methods) {
    if (m.id != "true" && m.id != "proposed") parse_baseline_method(m.id);
    ids.push_back(m.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("experiment: method ids must be unique");
  }
  if (threads < 0) throw std::invalid_argument("experiment: threads must be >= 0");
}

std::vector<MethodSpec> default_methods() {
  return {{"true", {}, {}, {}, {}}, {"proposed", {}, {}, {}, {}}, {"mmse", {}, {}, {}, {}},
          {"l1", {}, {}, {}, {}},   {"mixed", {}, {}, {}, {}}};
}

std::uint64_t trial_seed(std::uint64_t master, Index trial) {
  return substream_seed(master, static_cast<std::uint64_t>(trial));
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPARSEPSD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

// A method as it actually runs inside the experiment.
struct ResolvedMethod {
  std::string id;
  bool is_truth = false;
  bool is_proposed = false;
  SolverConfig solver;
  BaselineConfig baseline;
  std::vector<std::string> rows;  // row ids this method produces
  std::string echo;
};

ResolvedMethod resolve(const MethodSpec& spec, const ExperimentConfig& cfg) {
  const Index L = cfg.scenario.bins;
  const Index J = cfg.scenario.trials;
  const Index M = cfg.scenario.radar.elements;
  const Index N = cfg.scenario.sources;
  const auto kind = cfg.synthesis_kind;
  ResolvedMethod r;
  r.id = spec.id;
  std::ostringstream echo;
  if (spec.id == "true") {
    r.is_truth = true;
    r.rows = {"true"};
    echo << "oracle";
  } else if (spec.id == "proposed") {
    r.is_proposed = true;
    const bool explicit_params = spec.lambda && spec.alpha;
    if (!explicit_params) r.solver = default_tuning(L, J, kind, M, N);
    r.solver.synthesis_kind = kind;
    if (spec.lambda) r.solver.lambda = *spec.lambda;
    if (spec.alpha) r.solver.alpha = *spec.alpha;
    r.solver.gamma = cfg.gamma;
    r.solver.r = cfg.r;
    r.solver.max_iter = cfg.max_iter;
    r.solver.tol_primal = r.solver.tol_dual = cfg.tol;
    r.solver.record_objective = false;
    r.solver.validate();
    r.rows = {"proposed"};
    echo << "lambda=" << format_double(r.solver.lambda) << ";alpha=" << format_double(r.solver.alpha)
         << ";r=" << r.solver.r << ";gamma=" << format_double(r.solver.gamma)
         << ";synthesis=" << to_string(kind) << ";max_iter=" << r.solver.max_iter
         << ";tol=" << format_double(cfg.tol);
  } else {
    const BaselineMethod method = parse_baseline_method(spec.id);
    const bool needs_lambda = method != BaselineMethod::MMSE;
    const bool covered = (!needs_lambda || spec.lambda) && spec.smoothing_radius &&
                         (method != BaselineMethod::LatentGroupLasso || spec.block);
    if (!covered) {
      r.baseline = default_baseline_config(method, L, J, kind, M, N, cfg.scenario.radar.noise_std);
    } else {
      r.baseline.method = method;
      r.baseline.noise_std = cfg.scenario.radar.noise_std;
    }
    r.baseline.synthesis_kind = kind;
    if (spec.lambda) r.baseline.lambda = *spec.lambda;
    if (spec.block) r.baseline.block = *spec.block;
    if (spec.smoothing_radius) r.baseline.smoothing_radius = *spec.smoothing_radius;
    r.baseline.gamma = cfg.gamma;
    r.baseline.max_iter = cfg.max_iter;
    r.baseline.tol_primal = r.baseline.tol_dual = cfg.tol;
    r.baseline.validate();
    r.rows = {spec.id, spec.id + "+smooth"};
    echo << "synthesis=" << to_string(kind) << ";R=" << r.baseline.smoothing_radius;
    if (method == BaselineMethod::MMSE) {
      echo << ";noise_std=" << format_double(r.baseline.noise_std)
           << ";passes=" << r.baseline.refinement_passes;
    } else {
      echo << ";lambda=" << format_double(r.baseline.lambda) << ";gamma=" << format_double(cfg.gamma)
           << ";max_iter=" << cfg.max_iter << ";tol=" << format_double(cfg.tol);
      if (method == BaselineMethod::LatentGroupLasso) echo << ";B=" << r.baseline.block;
    }
  }
  r.echo = echo.str();
  return r;
}

std::string file_stem(const std::string& row) {
  std::string s = row;
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

void write_gnuplot_script(const std::filesystem::path& dir, const std::vector<std::string>& rows,
                          const ScenarioConfig& sc) {
  std::ostringstream gp;
  gp << "# Heatmaps of the first trial: rows are angles, columns frequency bins.\n"
     << "# Matrices hold linear PSD values; render with `gnuplot heatmaps.gp`.\n"
     << "set terminal pngcairo size 640,480\n"
     << "set xlabel 'frequency bin'\nset ylabel 'angle index'\n"
     << "set xrange [-0.5:" << sc.bins - 0.5 << "]\nset yrange [-0.5:" << sc.sources - 0.5 << "]\n"
     << "set logscale cb\nset cbrange [1e-3:*]\n";
  for (const auto& row : rows) {
    const auto stem = file_stem(row);
    gp << "set output '" << stem << ".png'\nset title '" << row << "'\n"
       << "plot '< grep -v \"^#\" " << stem << ".csv' matrix with image notitle\n";
  }
  write_text_file(dir / "heatmaps.gp", gp.str());
}

}  // namespace

// ---------------------------------------------------------------------------
// experiment

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<ResolvedMethod> methods;
  for (const auto& spec : config.methods) methods.push_back(resolve(spec, config));

  std::vector<std::string> row_ids;
  std::map<std::string, std::string> echo;
  for (const auto& m : methods) {
    for (const auto& row : m.rows) {
      row_ids.push_back(row);
      echo[row] = m.echo;
    }
  }
  const auto R = row_ids.size();
  const auto T = static_cast<std::size_t>(config.trials);
  std::vector<double> values(R * T, 0.0);
  std::vector<std::string> errors(R * T);
  std::vector<double> seconds(R * T, 0.0);

  const bool persist = !config.output_dir.empty();
  if (persist) {
    std::filesystem::create_directories(config.output_dir);
    if (config.write_tensors) std::filesystem::create_directories(config.output_dir / "psd");
    if (config.emit_plots) std::filesystem::create_directories(config.output_dir / "plots");
  }

  const auto run_trial = [&](std::size_t t) {
    const std::uint64_t seed = trial_seed(config.seed, static_cast<Index>(t));
    const Scenario scenario = make_scenario(config.scenario, seed);
    const SimulationOutput sim = simulate(scenario);
    const auto& truth = sim.truth.S_star;
    std::size_t row = 0;
    const auto record = [&](const std::string& id, const PsdEstimate& psd, double secs) {
      const std::size_t slot = row * T + t;
      values[slot] = nmae(truth, psd);
      seconds[slot] = secs;
      if (persist && config.write_tensors) {
        write_binary(config.output_dir / "psd" / (file_stem(id) + "_trial" + std::to_string(t) + ".bin"),
                     to_tensor(psd));
      }
      if (persist && config.emit_plots && t == 0) {
        write_csv(config.output_dir / "plots" / (file_stem(id) + ".csv"), to_tensor(psd));
      }
      ++row;
    };
    for (const auto& m : methods) {
      const std::size_t first_row = row;
      const auto start = std::chrono::steady_clock::now();
      try {
        if (m.is_truth) {
          record("true", truth, 0.0);
        } else if (m.is_proposed) {
          const SolveResult res = solve(sim.observations, scenario, m.solver);
          const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
          record(m.id, res.psd, dt.count());
        } else {
          const PsdEstimate raw = run_baseline(sim.observations, scenario, m.baseline).psd;
          const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
          record(m.id, raw, dt.count());
          record(m.id + "+smooth", daniell_smooth(raw, m.baseline.smoothing_radius), dt.count());
        }
      } catch (const std::exception& e) {
        for (std::size_t k = first_row; k < first_row + m.rows.size(); ++k) {
          values[k * T + t] = std::numeric_limits<double>::quiet_NaN();
          errors[k * T + t] = sanitize(e.what());
        }
        row = first_row + m.rows.size();
      }
    }
    if (persist && config.emit_plots && t == 0) {
      write_csv(config.output_dir / "plots" / "angles_deg.csv",
                to_tensor(RowMatrixXd((scenario.theta * (180.0 / kPi)).transpose())));
    }
  };

  const int workers = std::min<int>(resolve_thread_count(config.threads), static_cast<int>(T));
  if (workers <= 1) {
    for (std::size_t t = 0; t < T; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr fatal;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t t = next++; t < T; t = next++) {
          try {
            run_trial(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!fatal) fatal = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (fatal) std::rethrow_exception(fatal);
  }

  ExperimentResult result;
  for (std::size_t k = 0; k < R; ++k) {
    MetricsRow row;
    row.method = row_ids[k];
    row.config = echo[row.method];
    row.per_trial.assign(values.begin() + static_cast<std::ptrdiff_t>(k * T),
                         values.begin() + static_cast<std::ptrdiff_t>((k + 1) * T));
    for (std::size_t t = 0; t < T; ++t) {
      row.wall_seconds += seconds[k * T + t];
      if (!errors[k * T + t].empty() && !row.failed) {
        row.failed = true;
        row.error = "trial " + std::to_string(t) + ": " + errors[k * T + t];
      }
    }
    row.nmae = row.failed ? std::numeric_limits<double>::quiet_NaN()
                          : std::accumulate(row.per_trial.begin(), row.per_trial.end(), 0.0) /
                                static_cast<double>(T);
    result.rows.push_back(std::move(row));
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const MetricsRow& a, const MetricsRow& b) { return a.method < b.method; });

  if (persist) {
    write_metrics(config.output_dir, result.rows);
    if (config.emit_plots) {
      std::vector<std::string> sorted_ids = row_ids;
      std::sort(sorted_ids.begin(), sorted_ids.end());
      write_gnuplot_script(config.output_dir / "plots", sorted_ids, config.scenario);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// metrics files

namespace {

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

void write_metrics(const std::filesystem::path& dir, const std::vector<MetricsRow>& rows) {
  std::filesystem::create_directories(dir);
  std::ostringstream metrics, trials, timing;
  metrics << "method,trials,nmae,failed,config,error\n";
  trials << "method,trial,nmae\n";
  timing << "method,wall_seconds\n";
  for (const auto& r : rows) {
    metrics << r.method << ',' << r.per_trial.size() << ',' << format_double(r.nmae) << ','
            << (r.failed ? 1 : 0) << ',' << sanitize(r.config) << ',' << sanitize(r.error) << '\n';
    for (std::size_t t = 0; t < r.per_trial.size(); ++t) {
      trials << r.method << ',' << t << ',' << format_double(r.per_trial[t]) << '\n';
    }
    timing << r.method << ',' << format_double(r.wall_seconds) << '\n';
  }
  write_text_file(dir / "metrics.csv", metrics.str());
  write_text_file(dir / "trials.csv", trials.str());
  write_text_file(dir / "timing.csv", timing.str());
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& dir) {
  std::vector<MetricsRow> rows;
  std::map<std::string, std::size_t> index;
  for (const auto& f : read_csv_rows(dir / "metrics.csv")) {
    if (f.size() != 6) throw std::runtime_error("metrics.csv: expected 6 fields");
    MetricsRow r;
    r.method = f[0];
    r.nmae = parse_double(f[2]);
    r.failed = f[3] == "1";
    r.config = f[4];
    r.error = f[5];
    r.per_trial.assign(std::stoul(f[1]), 0.0);
    index[r.method] = rows.size();
    rows.push_back(std::move(r));
  }
  for (const auto& f : read_csv_rows(dir / "trials.csv")) {
    if (f.size() != 3) throw std::runtime_error("trials.csv: expected 3 fields");
    auto& r = rows.at(index.at(f[0]));
    r.per_trial.at(std::stoul(f[1])) = parse_double(f[2]);
  }
  const auto timing = dir / "timing.csv";
  if (std::filesystem::exists(timing)) {
    for (const auto& f : read_csv_rows(timing)) {
      if (f.size() != 2) throw std::runtime_error("timing.csv: expected 2 fields");
      rows.at(index.at(f[0])).wall_seconds = parse_double(f[1]);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
  }
}

RadarParams radar_from(const json& j) {
  check_keys(j, {"elements", "lambda_cw", "delta", "T", "noise_std"}, "radar");
  RadarParams r;
  take(j, "elements", r.elements);
  take(j, "lambda_cw", r.lambda_cw);
  take(j, "delta", r.delta);
  take(j, "T", r.T);
  take(j, "noise_std", r.noise_std);
  r.validate();
  return r;
}

json radar_to(const RadarParams& r) {
  return {{"elements", r.elements}, {"lambda_cw", r.lambda_cw}, {"delta", r.delta}, {"T", r.T},
          {"noise_std", r.noise_std}};
}

ScenarioConfig scenario_config_from(const json& j) {
  check_keys(j,
             {"sources", "theta_min_deg", "theta_max_deg", "bins", "trials", "radar", "peak_power_db",
              "dynamic_range_db", "gap_start", "gap_end", "powers", "v0", "velocity_width_min",
              "velocity_width_max"},
             "scenario");
  ScenarioConfig c;
  take(j, "sources", c.sources);
  take(j, "theta_min_deg", c.theta_min_deg);
  take(j, "theta_max_deg", c.theta_max_deg);
  take(j, "bins", c.bins);
  take(j, "trials", c.trials);
  if (j.contains("radar")) c.radar = radar_from(j.at("radar"));
  take(j, "peak_power_db", c.peak_power_db);
  take(j, "dynamic_range_db", c.dynamic_range_db);
  take(j, "gap_start", c.gap_start);
  take(j, "gap_end", c.gap_end);
  take(j, "powers", c.powers);
  take(j, "v0", c.v0);
  take(j, "velocity_width_min", c.velocity_width_min);
  take(j, "velocity_width_max", c.velocity_width_max);
  return c;
}

json scenario_config_to(const ScenarioConfig& c) {
  json j = {{"sources", c.sources},
            {"theta_min_deg", c.theta_min_deg},
            {"theta_max_deg", c.theta_max_deg},
            {"bins", c.bins},
            {"trials", c.trials},
            {"radar", radar_to(c.radar)},
            {"peak_power_db", c.peak_power_db},
            {"dynamic_range_db", c.dynamic_range_db},
            {"gap_start", c.gap_start},
            {"gap_end", c.gap_end},
            {"v0", c.v0},
            {"velocity_width_min", c.velocity_width_min},
            {"velocity_width_max", c.velocity_width_max}};
  if (!c.powers.empty()) j["powers"] = c.powers;
  return j;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

ScenarioConfig scenario_config_from_json(const std::string& text) {
  return scenario_config_from(json::parse(text));
}

std::string scenario_config_to_json(const ScenarioConfig& config) {
  return scenario_config_to(config).dump(2) + "\n";
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_keys(j,
             {"scenario", "methods", "trials", "seed", "synthesis", "gamma", "r", "max_iter", "tol", "out",
              "emit_plots", "write_tensors", "threads"},
             "experiment");
  ExperimentConfig c;
  if (j.contains("scenario")) c.scenario = scenario_config_from(j.at("scenario"));
  if (j.contains("methods")) {
    for (const auto& m : j.at("methods")) {
      MethodSpec spec;
      if (m.is_string()) {
        spec.id = m.get<std::string>();
      } else {
        check_keys(m, {"id", "lambda", "alpha", "block", "smoothing_radius"}, "method");
        spec.id = m.at("id").get<std::string>();
        if (m.contains("lambda")) spec.lambda = m.at("lambda").get<double>();
        if (m.contains("alpha")) spec.alpha = m.at("alpha").get<double>();
        if (m.contains("block")) spec.block = m.at("block").get<Index>();
        if (m.contains("smoothing_radius")) spec.smoothing_radius = m.at("smoothing_radius").get<Index>();
      }
      c.methods.push_back(std::move(spec));
    }
  } else {
    c.methods = default_methods();
  }
  take(j, "trials", c.trials);
  take(j, "seed", c.seed);
  if (j.contains("synthesis")) c.synthesis_kind = parse_synthesis_kind(j.at("synthesis").get<std::string>());
  take(j, "gamma", c.gamma);
  take(j, "r", c.r);
  take(j, "max_iter", c.max_iter);
  take(j, "tol", c.tol);
  if (j.contains("out")) c.output_dir = j.at("out").get<std::string>();
  take(j, "emit_plots", c.emit_plots);
  take(j, "write_tensors", c.write_tensors);
  take(j, "threads", c.threads);
  return c;
}

std::string scenario_to_json(const Scenario& s) {
  const json j = {{"theta", to_std(s.theta)},
                  {"power", to_std(s.power)},
                  {"mean_doppler", to_std(s.mean_doppler)},
                  {"doppler_width", to_std(s.doppler_width)},
                  {"radar", radar_to(s.radar)},
                  {"bins", s.bins()},
                  {"trials", s.trials},
                  {"seed", s.rng_seed}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_keys(j, {"theta", "power", "mean_doppler", "doppler_width", "radar", "bins", "trials", "seed"},
             "scenario");
  Scenario s;
  s.theta = to_eigen(j.at("theta").get<std::vector<double>>());
  s.power = to_eigen(j.at("power").get<std::vector<double>>());
  s.mean_doppler = to_eigen(j.at("mean_doppler").get<std::vector<double>>());
  s.doppler_width = to_eigen(j.at("doppler_width").get<std::vector<double>>());
  s.radar = radar_from(j.at("radar"));
  s.grid = FrequencyGrid(j.at("bins").get<Index>());
  take(j, "trials", s.trials);
  take(j, "seed", s.rng_seed);
  s.validate();
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace sparsepsd
