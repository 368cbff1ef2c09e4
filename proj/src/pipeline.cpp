#include "stpnrca/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <set>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "stpnrca/rng.hpp"
#include "stpnrca/var_baseline.hpp"

namespace stpnrca::pipeline {

using io::json;

Eigen::MatrixXd pack_bit_rows(const std::vector<BinaryPatternVector>& bits) {
  if (bits.empty()) throw std::invalid_argument("pack_bit_rows: no windows");
  const auto width = static_cast<Eigen::Index>(bits.front().bits.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(bits.size()), width);
  for (std::size_t w = 0; w < bits.size(); ++w) {
    for (Eigen::Index i = 0; i < width; ++i) {
      m(static_cast<Eigen::Index>(w), i) = bits[w].bits[static_cast<std::size_t>(i)];
    }
  }
  return m;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const int workers = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string case_name(int id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "case%02d", id);
  return buf;
}

int window_count(int series_len, const StpnConfig& stpn) {
  return (series_len - stpn.window) / stpn.stride + 1;
}

std::vector<GraphMode> build_modes(const ExperimentConfig& config) {
  const auto& g = config.generator;
  RecipeParams params;
  params.radius_target = g.radius_target;
  params.noise_variance = g.noise_variance;

  std::vector<GraphMode> modes;
  if (!g.recipe_file.empty()) {
    modes = io::load_recipes(g.recipe_file);
  } else if (g.family == "5node") {
    modes = build_five_node_modes(g.recipe_seed, params);
  } else if (g.family == "30node") {
    modes = {build_thirty_node_mode(g.recipe_seed, g.out_degree, params)};
  } else {
    throw std::invalid_argument("unknown generator family: " + g.family);
  }
  // node-delay experiments use a single nominal mode
  if (g.anomaly == "node-delay" && modes.size() > 1) modes.resize(1);
  return modes;
}

json index_to_json(const DatasetIndex& index) {
  json j;
  j["family"] = index.family;
  j["n"] = index.n;
  j["p"] = index.p;
  j["nominal"] = index.nominal;
  j["holdout"] = index.holdout;
  json cases = json::array();
  for (const CaseEntry& c : index.cases) {
    json broken = json::array();
    for (const Edge& e : c.broken) broken.push_back(json::array({e.from, e.to}));
    cases.push_back({{"name", c.name},
                     {"kind", c.kind},
                     {"mode_id", c.mode_id},
                     {"broken", std::move(broken)},
                     {"fault_node", c.fault_node}});
  }
  j["cases"] = std::move(cases);
  return j;
}

}  // namespace

DatasetIndex load_index(const fs::path& dir) {
  const json j = io::read_json(dir / "datasets" / "index.json");
  DatasetIndex index;
  index.family = j.at("family").get<std::string>();
  index.n = j.at("n").get<int>();
  index.p = j.at("p").get<int>();
  index.nominal = j.at("nominal").get<std::vector<std::string>>();
  index.holdout = j.at("holdout").get<std::vector<std::string>>();
  for (const auto& c : j.at("cases")) {
    CaseEntry entry;
    entry.name = c.at("name").get<std::string>();
    entry.kind = c.at("kind").get<std::string>();
    entry.mode_id = c.at("mode_id").get<std::string>();
    for (const auto& e : c.at("broken")) {
      entry.broken.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    }
    entry.fault_node = c.at("fault_node").get<int>();
    index.cases.push_back(std::move(entry));
  }
  return index;
}

void generate(const ExperimentConfig& config, const fs::path& dir) {
  const std::string hash = config_hash(config);
  fs::create_directories(dir);
  json cfg = config_to_json(config);
  cfg["config_hash"] = hash;
  io::write_json_atomic(dir / "config.json", cfg);

  const std::vector<GraphMode> modes = build_modes(config);
  io::save_recipes(dir / "recipes.json", modes);

  DatasetIndex index;
  index.family = config.generator.family;
  index.n = modes.front().model.n;
  index.p = modes.front().model.p;

  for (std::size_t m = 0; m < modes.size(); ++m) {
    SyntheticDataset ds = simulate_var(modes[m].model, config.generator.train_length,
                                       config.generator.burn_in, derive_seed(config.seed, 100 + m));
    ds.meta.mode_id = modes[m].mode_id;
    io::save_dataset(dir / "datasets" / "nominal" / modes[m].mode_id, ds, hash);
    index.nominal.push_back(modes[m].mode_id);
  }

  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (int r = 0; r < config.generator.holdout_per_mode; ++r) {
      SyntheticDataset ds =
          simulate_var(modes[m].model, config.generator.test_length, config.generator.burn_in,
                       derive_seed(config.seed, 300 + 64 * m + static_cast<std::size_t>(r)));
      ds.meta.mode_id = modes[m].mode_id;
      const std::string name = modes[m].mode_id + "_h" + std::to_string(r);
      io::save_dataset(dir / "datasets" / "holdout" / name, ds, hash);
      index.holdout.push_back(name);
    }
  }

  if (config.generator.anomaly == "pattern-break") {
    const auto suite = build_pattern_case_suite(modes, derive_seed(config.seed, 5));
    for (const PatternCase& pc : suite) {
      const GraphMode& mode = modes[static_cast<std::size_t>(pc.mode_index)];
      const VarModel broken_model = make_pattern_anomaly(mode, pc.broken);
      SyntheticDataset ds =
          simulate_var(broken_model, config.generator.test_length, config.generator.burn_in,
                       derive_seed(config.seed, 500 + static_cast<std::size_t>(pc.case_id)));
      ds.meta.mode_id = mode.mode_id;
      ds.meta.anomaly.kind = AnomalyKind::pattern_break;
      ds.meta.anomaly.broken_patterns = pc.broken;
      ds.truth.anomalous_patterns = pc.broken;

      CaseEntry entry;
      entry.name = case_name(pc.case_id);
      entry.kind = "pattern-break";
      entry.mode_id = mode.mode_id;
      entry.broken = pc.broken;
      io::save_dataset(dir / "datasets" / "cases" / entry.name, ds, hash);
      index.cases.push_back(std::move(entry));
    }
  } else if (config.generator.anomaly == "node-delay") {
    const GraphMode& mode = modes.front();
    for (int node = 0; node < mode.model.n; ++node) {
      SyntheticDataset base = simulate_var(
          mode.model, config.generator.test_length + config.generator.delay,
          config.generator.burn_in, derive_seed(config.seed, 500 + static_cast<std::size_t>(node)));
      base.meta.mode_id = mode.mode_id;
      SyntheticDataset ds = make_node_delay_anomaly(base, node, config.generator.delay);

      CaseEntry entry;
      entry.name = case_name(node);
      entry.kind = "node-delay";
      entry.mode_id = mode.mode_id;
      entry.fault_node = node;
      io::save_dataset(dir / "datasets" / "cases" / entry.name, ds, hash);
      index.cases.push_back(std::move(entry));
    }
  } else {
    throw std::invalid_argument("unknown anomaly kind: " + config.generator.anomaly);
  }

  io::write_json_atomic(dir / "datasets" / "index.json", index_to_json(index));
}

namespace {

struct FittedFeatures {
  std::vector<PartitionScheme> schemes;
  Eigen::MatrixXd thresholds;
};

FittedFeatures fit_feature_config(const ExperimentConfig& config, const fs::path& dir,
                                  const DatasetIndex& index,
                                  std::vector<std::vector<PatternGraph>>* nominal_graphs) {
  // partitions from pooled nominal training data only; frozen for test data
  Eigen::MatrixXd pooled;
  std::vector<Eigen::MatrixXd> nominal_series;
  for (const std::string& mode : index.nominal) {
    nominal_series.push_back(
        io::read_series_csv(dir / "datasets" / "nominal" / mode / "series.csv"));
  }
  Eigen::Index rows = 0;
  for (const auto& s : nominal_series) rows += s.rows();
  pooled.resize(rows, nominal_series.front().cols());
  Eigen::Index at = 0;
  for (const auto& s : nominal_series) {
    pooled.middleRows(at, s.rows()) = s;
    at += s.rows();
  }

  FittedFeatures fitted;
  fitted.schemes = fit_partitions(pooled, config.stpn.alphabet, PartitionKind::mep);

  std::vector<PatternGraph> pooled_graphs;
  for (std::size_t m = 0; m < nominal_series.size(); ++m) {
    auto graphs = extract_windows(nominal_series[m], fitted.schemes, config.stpn);
    pooled_graphs.insert(pooled_graphs.end(), graphs.begin(), graphs.end());
    if (nominal_graphs) nominal_graphs->push_back(std::move(graphs));
  }

  if (config.threshold.policy == "global") {
    const auto n = static_cast<Eigen::Index>(index.n);
    fitted.thresholds = Eigen::MatrixXd::Constant(n, n, config.threshold.global);
  } else if (config.threshold.policy == "2means") {
    fitted.thresholds = fit_thresholds(pooled_graphs, config.threshold.global,
                                       config.threshold.min_separation);
  } else {
    throw std::invalid_argument("unknown threshold policy: " + config.threshold.policy);
  }
  return fitted;
}

void write_feature_file(const ExperimentConfig& config, const FittedFeatures& fitted,
                        const std::vector<PatternGraph>& graphs, const fs::path& path,
                        const std::string& hash) {
  io::FeatureFile file;
  file.config = config.stpn;
  file.schemes = fitted.schemes;
  file.thresholds = fitted.thresholds;
  file.graphs = graphs;
  file.config_hash = hash;
  for (const PatternGraph& g : graphs) file.bits.push_back(binarize(g, fitted.thresholds));
  io::save_features(path, file);
}

}  // namespace

void extract(const ExperimentConfig& config, const fs::path& dir) {
  const std::string hash = config_hash(config);
  const DatasetIndex index = load_index(dir);

  std::vector<std::vector<PatternGraph>> nominal_graphs;
  const FittedFeatures fitted = fit_feature_config(config, dir, index, &nominal_graphs);

  json feature_config;
  feature_config["stpn"] = {{"alphabet", config.stpn.alphabet},
                            {"depth", config.stpn.depth},
                            {"window", config.stpn.window},
                            {"stride", config.stpn.stride},
                            {"flattening", "source-major"}};
  feature_config["thresholds"] = io::matrix_to_json(fitted.thresholds);
  feature_config["config_hash"] = hash;
  io::write_json_atomic(dir / "features" / "config.json", feature_config);

  for (std::size_t m = 0; m < index.nominal.size(); ++m) {
    write_feature_file(config, fitted, nominal_graphs[m],
                       dir / "features" / "nominal" / (index.nominal[m] + ".json"), hash);
  }

  const auto extract_group = [&](const std::string& group, const std::vector<std::string>& names) {
    parallel_for(static_cast<int>(names.size()), config.jobs, [&](int i) {
      const auto& name = names[static_cast<std::size_t>(i)];
      const Eigen::MatrixXd series =
          io::read_series_csv(dir / "datasets" / group / name / "series.csv");
      write_feature_file(config, fitted, extract_windows(series, fitted.schemes, config.stpn),
                         dir / "features" / group / (name + ".json"), hash);
    });
  };
  extract_group("holdout", index.holdout);
  std::vector<std::string> case_names;
  for (const CaseEntry& c : index.cases) case_names.push_back(c.name);
  extract_group("cases", case_names);
}

void train_rbm_step(const ExperimentConfig& config, const fs::path& dir) {
  const std::string hash = config_hash(config);
  const DatasetIndex index = load_index(dir);

  std::vector<BinaryPatternVector> bits;
  std::vector<std::string> labels;
  for (const std::string& mode : index.nominal) {
    const io::FeatureFile file =
        io::load_features(dir / "features" / "nominal" / (mode + ".json"));
    for (const auto& v : file.bits) {
      bits.push_back(v);
      labels.push_back(mode);
    }
  }
  const Eigen::MatrixXd vectors = pack_bit_rows(bits);

  RbmTrainConfig train_config = config.rbm;
  RbmModel model = train_rbm(vectors, train_config);
  FreeEnergyReference reference =
      nominal_reference(model, vectors, labels, config.detect.bins, config.detect.range_margin);

  // per-mode free-energy pools for the stratified bootstrap
  std::map<std::string, std::vector<double>> pools;
  const Eigen::VectorXd f = free_energies(model, vectors);
  for (Eigen::Index i = 0; i < f.size(); ++i) pools[labels[static_cast<std::size_t>(i)]].push_back(f(i));
  std::vector<std::vector<double>> per_mode;
  per_mode.reserve(pools.size());
  for (auto& [mode, values] : pools) per_mode.push_back(std::move(values));

  reference.kld_threshold = calibrate_kld_threshold(
      reference, per_mode, window_count(config.generator.test_length, config.stpn),
      config.detect.bootstrap, config.detect.quantile, derive_seed(config.seed, 777));

  io::save_rbm(dir / "models" / "rbm.json", model, reference, hash);
}

DetectionResult detect_step(const ExperimentConfig& config, const fs::path& dir,
                            const std::string& features_rel) {
  auto [model, reference] = io::load_rbm(dir / "models" / "rbm.json");
  const io::FeatureFile file = io::load_features(dir / features_rel);
  const double threshold =
      config.detect.threshold >= 0 ? config.detect.threshold : reference.kld_threshold;
  const DetectionResult result = detect(model, reference, pack_bit_rows(file.bits), threshold);

  double mean_f = 0.0;
  for (double v : result.free_energy) mean_f += v;
  mean_f /= static_cast<double>(result.free_energy.size());

  const std::string stem = fs::path(features_rel).stem().string();
  json report;
  report["input"] = features_rel;
  report["anomalous"] = result.anomalous;
  report["kld_score"] = result.kld_score;
  report["threshold"] = result.threshold;
  report["windows"] = result.free_energy.size();
  report["mean_free_energy"] = mean_f;
  report["nominal_mean_free_energy"] = reference.pooled_mean;
  report["config_hash"] = config_hash(config);
  io::write_json_atomic(dir / "reports" / "detect" / (stem + ".json"), report);
  return result;
}

io::json rca_s3_step(const ExperimentConfig& config, const fs::path& dir,
                     const std::string& name) {
  auto [model, reference] = io::load_rbm(dir / "models" / "rbm.json");
  const io::FeatureFile file = io::load_features(dir / "features" / "cases" / (name + ".json"));
  const Eigen::MatrixXd vectors = pack_bit_rows(file.bits);
  const int n = static_cast<int>(file.thresholds.rows());

  json out;
  out["method"] = "s3";
  out["case"] = name;
  out["config_hash"] = config_hash(config);
  out["batch"] = config.s3.batch_mode;

  std::vector<FlipStep> case_flips;
  if (config.s3.batch_mode) {
    const RootCauseReport report = s3_search_batch(model, vectors, reference, config.s3);
    case_flips = report.flips;
    out["report"] = io::report_to_json(report, n, -1);
  } else {
    json windows = json::array();
    // majority vote across windows forms the per-case pattern set
    std::map<int, int> votes;
    std::map<int, double> importance;
    for (Eigen::Index w = 0; w < vectors.rows(); ++w) {
      const RootCauseReport report =
          s3_search(model, vectors.row(w).transpose(), reference, config.s3);
      windows.push_back(io::report_to_json(report, n, static_cast<int>(w)));
      for (const FlipStep& step : report.flips) {
        votes[step.pattern] += 1;
        importance[step.pattern] += step.delta_f;
      }
    }
    out["windows"] = std::move(windows);
    for (const auto& [pattern, count] : votes) {
      if (2 * count > vectors.rows()) {
        case_flips.push_back({pattern, importance[pattern] / static_cast<double>(count)});
      }
    }
  }

  json case_patterns = json::array();
  json flips = json::array();
  for (const FlipStep& step : case_flips) {
    const Edge e = pattern_of_index(step.pattern, n);
    case_patterns.push_back(json::array({e.from, e.to}));
    flips.push_back({{"pattern", json::array({e.from, e.to})}, {"deltaF", step.delta_f}});
  }
  out["case_patterns"] = std::move(case_patterns);
  out["case_flips"] = std::move(flips);
  io::write_json_atomic(dir / "reports" / "s3" / (name + ".json"), out);
  return out;
}

void a3_gen_step(const ExperimentConfig& config, const fs::path& dir) {
  const DatasetIndex index = load_index(dir);
  std::vector<BinaryPatternVector> bits;
  for (const std::string& mode : index.nominal) {
    const io::FeatureFile file =
        io::load_features(dir / "features" / "nominal" / (mode + ".json"));
    bits.insert(bits.end(), file.bits.begin(), file.bits.end());
  }
  const FlipCorpus corpus = generate_flip_corpus(pack_bit_rows(bits), config.a3.corpus);
  io::save_corpus(dir / "models" / "a3_corpus.bin", corpus);
}

void a3_train_step(const ExperimentConfig& config, const fs::path& dir) {
  const FlipCorpus corpus = io::load_corpus(dir / "models" / "a3_corpus.bin");
  const MlpModel model = train_mlp(corpus, config.a3.mlp);
  io::save_mlp(dir / "models" / "a3.json", model, config_hash(config));
}

io::json a3_infer_step(const ExperimentConfig& config, const fs::path& dir,
                       const std::string& name) {
  const MlpModel model = io::load_mlp(dir / "models" / "a3.json");
  const io::FeatureFile file = io::load_features(dir / "features" / "cases" / (name + ".json"));
  const Eigen::MatrixXd vectors = pack_bit_rows(file.bits);
  const int n = static_cast<int>(file.thresholds.rows());

  json out;
  out["method"] = "a3";
  out["case"] = name;
  out["config_hash"] = config_hash(config);
  json windows = json::array();
  for (Eigen::Index w = 0; w < vectors.rows(); ++w) {
    const auto label = infer(model, vectors.row(w).transpose(), config.a3.threshold);
    json patterns = json::array();
    for (int idx : anomalous_patterns(label)) {
      const Edge e = pattern_of_index(idx, n);
      patterns.push_back(json::array({e.from, e.to}));
    }
    windows.push_back({{"window", static_cast<int>(w)}, {"anomalous", std::move(patterns)}});
  }
  out["windows"] = std::move(windows);
  io::write_json_atomic(dir / "reports" / "a3" / (name + ".json"), out);
  return out;
}

namespace {

int var_lag(const ExperimentConfig& config, const DatasetIndex& index) {
  return config.var.lag > 0 ? config.var.lag : index.p;
}

}  // namespace

void var_fit_nominal_step(const ExperimentConfig& config, const fs::path& dir) {
  const DatasetIndex index = load_index(dir);
  const Eigen::MatrixXd series =
      io::read_series_csv(dir / "datasets" / "nominal" / index.nominal.front() / "series.csv");
  const VarFit fit = fit_var(series, var_lag(config, index));
  io::save_var_fit(dir / "reports" / "var" / "nominal_fit.json", fit, config_hash(config));
}

io::json var_rca_step(const ExperimentConfig& config, const fs::path& dir,
                      const std::string& name) {
  const DatasetIndex index = load_index(dir);
  const VarFit nominal = io::load_var_fit(dir / "reports" / "var" / "nominal_fit.json");
  const Eigen::MatrixXd series =
      io::read_series_csv(dir / "datasets" / "cases" / name / "series.csv");
  const VarFit anomalous = fit_var(series, var_lag(config, index));
  const std::vector<Edge> failed = var_rca(nominal, anomalous, config.var.ratio);

  json out;
  out["method"] = "var";
  out["case"] = name;
  out["config_hash"] = config_hash(config);
  out["ratio"] = config.var.ratio;
  json patterns = json::array();
  for (const Edge& e : failed) patterns.push_back(json::array({e.from, e.to}));
  out["case_patterns"] = std::move(patterns);
  out["delta"] = io::matrix_to_json(coefficient_delta(nominal, anomalous));
  io::write_json_atomic(dir / "reports" / "var" / (name + ".json"), out);
  return out;
}

namespace {

std::vector<int> json_patterns_to_indices(const json& patterns, int n) {
  std::vector<int> out;
  for (const auto& p : patterns) {
    out.push_back(pattern_index({p.at(0).get<int>(), p.at(1).get<int>()}, n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint8_t> flags_from_set(const std::vector<int>& set, int width) {
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(width), 0);
  for (int idx : set) flags[static_cast<std::size_t>(idx)] = 1;
  return flags;
}

// Per-window predicted pattern sets from an S3 or A3 case report.
std::vector<std::vector<int>> window_sets_from_report(const json& report, int n,
                                                      int window_total) {
  std::vector<std::vector<int>> sets;
  if (report.contains("windows")) {
    for (const auto& w : report.at("windows")) {
      std::vector<int> set;
      if (w.contains("flips")) {
        for (const auto& f : w.at("flips")) {
          const auto& p = f.at("pattern");
          set.push_back(pattern_index({p.at(0).get<int>(), p.at(1).get<int>()}, n));
        }
      } else {
        set = json_patterns_to_indices(w.at("anomalous"), n);
      }
      std::sort(set.begin(), set.end());
      sets.push_back(std::move(set));
    }
  } else {
    // batch report: the case-level set stands for every window
    const std::vector<int> set = json_patterns_to_indices(report.at("case_patterns"), n);
    sets.assign(static_cast<std::size_t>(window_total), set);
  }
  return sets;
}

DetectionSummary detection_summary(const fs::path& dir, const DatasetIndex& index) {
  DetectionSummary summary;
  const fs::path detect_dir = dir / "reports" / "detect";
  for (const CaseEntry& entry : index.cases) {
    const fs::path path = detect_dir / (entry.name + ".json");
    if (!fs::exists(path)) continue;
    const json r = io::read_json(path);
    summary.cases_total += 1;
    summary.cases_flagged += r.at("anomalous").get<bool>() ? 1 : 0;
    summary.case_mean_f.push_back(r.at("mean_free_energy").get<double>());
    summary.nominal_mean_f = r.at("nominal_mean_free_energy").get<double>();
    summary.threshold = r.at("threshold").get<double>();
  }
  for (const std::string& name : index.holdout) {
    const fs::path path = detect_dir / (name + ".json");
    if (!fs::exists(path)) continue;
    const json r = io::read_json(path);
    summary.holdout_total += 1;
    summary.holdout_flagged += r.at("anomalous").get<bool>() ? 1 : 0;
  }
  return summary;
}

}  // namespace

EvalResult evaluate(const ExperimentConfig& config, const fs::path& dir) {
  const DatasetIndex index = load_index(dir);
  const int n = index.n;
  const int width = n * n;
  const std::string hash = config_hash(config);

  EvalResult result;
  result.detection = detection_summary(dir, index);

  const bool pattern_cases =
      !index.cases.empty() && index.cases.front().kind == "pattern-break";

  json eval_json;
  eval_json["config_hash"] = hash;
  eval_json["detection"] = {{"cases_total", result.detection.cases_total},
                            {"cases_flagged", result.detection.cases_flagged},
                            {"holdout_total", result.detection.holdout_total},
                            {"holdout_flagged", result.detection.holdout_flagged},
                            {"threshold", result.detection.threshold},
                            {"nominal_mean_free_energy", result.detection.nominal_mean_f},
                            {"case_mean_free_energy", result.detection.case_mean_f}};

  if (pattern_cases) {
    Table1Result t1;
    std::vector<std::vector<std::uint8_t>> truth_flags, s3_flags, a3_flags;
    std::vector<std::vector<int>> truth_sets, s3_sets, a3_sets;

    for (const CaseEntry& entry : index.cases) {
      std::vector<int> truth;
      for (const Edge& e : entry.broken) truth.push_back(pattern_index(e, n));
      std::sort(truth.begin(), truth.end());

      const json s3_report = io::read_json(dir / "reports" / "s3" / (entry.name + ".json"));
      const io::FeatureFile features =
          io::load_features(dir / "features" / "cases" / (entry.name + ".json"));
      const int windows = static_cast<int>(features.bits.size());
      const auto s3_windows = window_sets_from_report(s3_report, n, windows);

      const fs::path a3_path = dir / "reports" / "a3" / (entry.name + ".json");
      std::vector<std::vector<int>> a3_windows;
      if (fs::exists(a3_path)) {
        a3_windows = window_sets_from_report(io::read_json(a3_path), n, windows);
      }

      for (int w = 0; w < windows; ++w) {
        truth_flags.push_back(flags_from_set(truth, width));
        truth_sets.push_back(truth);
        s3_flags.push_back(flags_from_set(s3_windows[static_cast<std::size_t>(w)], width));
        s3_sets.push_back(s3_windows[static_cast<std::size_t>(w)]);
        if (!a3_windows.empty()) {
          a3_flags.push_back(flags_from_set(a3_windows[static_cast<std::size_t>(w)], width));
          a3_sets.push_back(a3_windows[static_cast<std::size_t>(w)]);
        }
      }
    }

    t1.test_windows = static_cast<long>(truth_flags.size());
    t1.alpha1_s3 = alpha1(truth_flags, s3_flags);
    t1.alpha2_s3 = alpha2(truth_sets, s3_sets);
    if (!a3_flags.empty()) {
      t1.alpha1_a3 = alpha1(truth_flags, a3_flags);
      t1.alpha2_a3 = alpha2(truth_sets, a3_sets);
    }

    for (const std::string& mode : index.nominal) {
      const io::FeatureFile file =
          io::load_features(dir / "features" / "nominal" / (mode + ".json"));
      t1.training_windows += static_cast<long>(file.bits.size());
    }
    const fs::path corpus_path = dir / "models" / "a3_corpus.bin";
    if (fs::exists(corpus_path)) {
      t1.corpus_samples = io::load_corpus(corpus_path).inputs.rows();
    }

    std::vector<Table1Row> rows;
    rows.push_back({"S3", t1.training_windows, t1.test_windows, t1.alpha1_s3, t1.alpha2_s3, true});
    if (!a3_flags.empty()) {
      rows.push_back({"A3", t1.corpus_samples, t1.test_windows, t1.alpha1_a3, t1.alpha2_a3, true});
    }
    t1.table_text = render_table1(rows);

    eval_json["table1"] = {{"alpha1_s3", t1.alpha1_s3},
                           {"alpha2_s3", t1.alpha2_s3},
                           {"alpha1_a3", t1.alpha1_a3},
                           {"alpha2_a3", t1.alpha2_a3},
                           {"training_windows", t1.training_windows},
                           {"corpus_samples", t1.corpus_samples},
                           {"test_windows", t1.test_windows}};
    io::write_text_atomic(dir / "eval" / "table1.txt", t1.table_text);
    result.table1 = std::move(t1);
  } else if (!index.cases.empty()) {
    Table2Result t2;
    std::vector<EpsilonCounts> s3_cases, var_cases;
    json heat = json::array();
    const auto recipes = io::load_recipes(dir / "recipes.json");

    for (const CaseEntry& entry : index.cases) {
      t2.cases += 1;
      const json s3_report = io::read_json(dir / "reports" / "s3" / (entry.name + ".json"));
      const std::vector<int> s3_set = json_patterns_to_indices(s3_report.at("case_patterns"), n);
      s3_cases.push_back(epsilon_node(s3_set, entry.fault_node, n));

      std::vector<FlipStep> flips;
      for (const auto& f : s3_report.at("case_flips")) {
        const auto& p = f.at("pattern");
        flips.push_back({pattern_index({p.at(0).get<int>(), p.at(1).get<int>()}, n),
                         f.at("deltaF").get<double>()});
      }
      if (!flips.empty()) {
        const NodeAttribution attribution = attribute_node(flips, n);
        t2.attribution_correct += attribution.ranking.front().node == entry.fault_node;
        t2.explains_all += attribution.explains_all;
      }

      std::vector<int> var_set;
      const fs::path var_path = dir / "reports" / "var" / (entry.name + ".json");
      if (fs::exists(var_path)) {
        const json var_report = io::read_json(var_path);
        var_set = json_patterns_to_indices(var_report.at("case_patterns"), n);
        var_cases.push_back(epsilon_node(var_set, entry.fault_node, n));
      }

      // truth mask: nominal patterns incident to the fault node
      std::vector<int> incident;
      for (const Edge& e : recipes.front().edges) {
        if (e.from == entry.fault_node || e.to == entry.fault_node) {
          incident.push_back(pattern_index(e, n));
        }
      }
      const HeatGrid grid = make_heat_grid(n, incident, s3_set);
      const HeatGrid var_grid = make_heat_grid(n, incident, var_set);
      heat.push_back({{"case", entry.name},
                      {"fault_node", entry.fault_node},
                      {"n", n},
                      {"truth", grid.truth},
                      {"s3", grid.predicted},
                      {"var", var_grid.predicted}});
    }

    t2.s3_counts = epsilon_total(s3_cases);
    t2.var_counts = epsilon_total(var_cases);

    std::vector<Table2Row> rows = {{"S3", t2.s3_counts}};
    if (!var_cases.empty()) rows.push_back({"VAR", t2.var_counts});
    std::ostringstream label;
    label << "Dataset (" << n << " nodes, " << t2.cases << " node-delay cases)";
    t2.table_text = render_table2(label.str(), rows);

    eval_json["table2"] = {{"s3", {{"discovered", t2.s3_counts.discovered},
                                   {"incorrect", t2.s3_counts.incorrect},
                                   {"epsilon", t2.s3_counts.ratio()}}},
                           {"var", {{"discovered", t2.var_counts.discovered},
                                    {"incorrect", t2.var_counts.incorrect},
                                    {"epsilon", t2.var_counts.ratio()}}},
                           {"cases", t2.cases},
                           {"attribution_correct", t2.attribution_correct},
                           {"explains_all", t2.explains_all}};
    io::write_text_atomic(dir / "eval" / "table2.txt", t2.table_text);
    io::write_json_atomic(dir / "eval" / "heatgrids.json", heat);
    result.table2 = std::move(t2);
  }

  io::write_json_atomic(dir / "eval" / "summary.json", eval_json);
  return result;
}

EvalResult run_table1(const ExperimentConfig& config, const fs::path& dir) {
  generate(config, dir);
  extract(config, dir);
  train_rbm_step(config, dir);
  a3_gen_step(config, dir);
  a3_train_step(config, dir);

  const DatasetIndex index = load_index(dir);
  parallel_for(static_cast<int>(index.cases.size()), config.jobs, [&](int i) {
    const std::string& name = index.cases[static_cast<std::size_t>(i)].name;
    detect_step(config, dir, "features/cases/" + name + ".json");
    rca_s3_step(config, dir, name);
    a3_infer_step(config, dir, name);
  });
  parallel_for(static_cast<int>(index.holdout.size()), config.jobs, [&](int i) {
    detect_step(config, dir,
                "features/holdout/" + index.holdout[static_cast<std::size_t>(i)] + ".json");
  });
  return evaluate(config, dir);
}

EvalResult run_table2(const ExperimentConfig& config, const fs::path& dir) {
  generate(config, dir);
  extract(config, dir);
  train_rbm_step(config, dir);
  var_fit_nominal_step(config, dir);

  const DatasetIndex index = load_index(dir);
  parallel_for(static_cast<int>(index.cases.size()), config.jobs, [&](int i) {
    const std::string& name = index.cases[static_cast<std::size_t>(i)].name;
    detect_step(config, dir, "features/cases/" + name + ".json");
    rca_s3_step(config, dir, name);
    var_rca_step(config, dir, name);
  });
  parallel_for(static_cast<int>(index.holdout.size()), config.jobs, [&](int i) {
    detect_step(config, dir,
                "features/holdout/" + index.holdout[static_cast<std::size_t>(i)] + ".json");
  });
  return evaluate(config, dir);
}

}  // namespace stpnrca::pipeline
