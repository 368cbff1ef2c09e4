#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>

#include "stpnrca/config.hpp"
#include "stpnrca/io.hpp"
#include "stpnrca/pipeline.hpp"
#include "stpnrca/var_baseline.hpp"

namespace fs = std::filesystem;
using namespace stpnrca;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config JSON");
  cmd->add_option("--preset", opts.preset, "built-in preset (table1, table2-5node, table2-30node)");
  cmd->add_option("--dir,--out", opts.dir, "experiment directory");
  cmd->add_option("--seed", opts.seed, "override the experiment seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--jobs", opts.jobs, "max parallel cases");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig config;
  if (!opts.config_path.empty()) {
    config = load_config(opts.config_path);
  } else if (!opts.preset.empty()) {
    config = preset_config(opts.preset);
  } else if (fs::exists(fs::path(opts.dir) / "config.json")) {
    config = config_from_json(io::read_json(fs::path(opts.dir) / "config.json"));
  }
  if (opts.seed_set) config.seed = opts.seed;
  if (opts.jobs > 0) config.jobs = opts.jobs;
  return config;
}

void print_eval(const pipeline::EvalResult& result) {
  if (result.table1) std::cout << result.table1->table_text;
  if (result.table2) std::cout << result.table2->table_text;
  std::cerr << "detection: " << result.detection.cases_flagged << "/"
            << result.detection.cases_total << " cases flagged, "
            << result.detection.holdout_flagged << "/" << result.detection.holdout_total
            << " nominal holdouts flagged\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root-cause analysis toolkit for multivariate time series "
               "(symbolic-dynamics features, RBM free energy, greedy state "
               "switching, multi-label classification, VAR baseline)"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string feature_rel;
  std::string case_sel = "all";
  std::string series_path, nominal_fit, anomalous_fit, out_file;
  std::string dataset_choice = "5node";
  int lag = 0;
  double ratio = 0.4;

  auto* gen = app.add_subcommand("gen", "generate synthetic datasets with ground truth");
  add_common(gen, opts);

  auto* extract_cmd = app.add_subcommand("extract", "extract windowed causality features");
  add_common(extract_cmd, opts);

  auto* train_rbm_cmd = app.add_subcommand("train-rbm", "train the nominal free-energy model");
  add_common(train_rbm_cmd, opts);

  auto* detect_cmd = app.add_subcommand("detect", "score one feature file (exit 3 on anomaly)");
  add_common(detect_cmd, opts);
  detect_cmd->add_option("--features", feature_rel, "feature file, relative to the directory")
      ->required();

  auto* s3_cmd = app.add_subcommand("rca-s3", "sequential state switching root-cause search");
  add_common(s3_cmd, opts);
  s3_cmd->add_option("--case", case_sel, "case name or 'all'");

  auto* a3_gen_cmd = app.add_subcommand("a3-gen", "build the flip-injection training corpus");
  add_common(a3_gen_cmd, opts);

  auto* a3_train_cmd = app.add_subcommand("a3-train", "train the multi-label classifier");
  add_common(a3_train_cmd, opts);

  auto* a3_infer_cmd = app.add_subcommand("a3-infer", "classify case windows");
  add_common(a3_infer_cmd, opts);
  a3_infer_cmd->add_option("--case", case_sel, "case name or 'all'");

  auto* var_fit_cmd = app.add_subcommand("var-fit", "least-squares autoregression fit");
  add_common(var_fit_cmd, opts);
  var_fit_cmd->add_option("--series", series_path, "a series.csv to fit standalone");
  var_fit_cmd->add_option("--lag", lag, "lag order (0: from metadata / AIC)");
  var_fit_cmd->add_option("--out-file", out_file, "fit JSON path (standalone mode)");

  auto* var_rca_cmd = app.add_subcommand("var-rca", "coefficient-change root-cause baseline");
  add_common(var_rca_cmd, opts);
  var_rca_cmd->add_option("--case", case_sel, "case name or 'all'");
  var_rca_cmd->add_option("--nominal", nominal_fit, "nominal fit JSON (standalone mode)");
  var_rca_cmd->add_option("--anomalous", anomalous_fit, "anomalous fit JSON (standalone mode)");
  var_rca_cmd->add_option("--ratio", ratio, "relative change threshold");
  var_rca_cmd->add_option("--out-file", out_file, "report path (standalone mode)");

  auto* eval_cmd = app.add_subcommand("eval", "score reports against ground truth");
  add_common(eval_cmd, opts);

  auto* table1_cmd =
      app.add_subcommand("repro-table1", "end-to-end pattern-anomaly experiment");
  add_common(table1_cmd, opts);

  auto* table2_cmd =
      app.add_subcommand("repro-table2", "end-to-end node-fault comparison experiment");
  add_common(table2_cmd, opts);
  table2_cmd->add_option("--dataset", dataset_choice, "5node or 30node");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // unknown flags / bad arguments
  }

  try {
    const fs::path dir = opts.dir;

    const auto cases_of = [&](const ExperimentConfig& config) {
      std::vector<std::string> names;
      for (const auto& c : pipeline::load_index(dir).cases) {
        if (case_sel == "all" || case_sel == c.name) names.push_back(c.name);
      }
      if (names.empty()) throw std::invalid_argument("no matching case: " + case_sel);
      (void)config;
      return names;
    };

    if (*gen) {
      pipeline::generate(resolve_config(opts), dir);
    } else if (*extract_cmd) {
      pipeline::extract(resolve_config(opts), dir);
    } else if (*train_rbm_cmd) {
      pipeline::train_rbm_step(resolve_config(opts), dir);
    } else if (*detect_cmd) {
      const auto result = pipeline::detect_step(resolve_config(opts), dir, feature_rel);
      std::cerr << "kld=" << result.kld_score << " threshold=" << result.threshold
                << (result.anomalous ? " ANOMALOUS" : " nominal") << "\n";
      return result.anomalous ? 3 : 0;
    } else if (*s3_cmd) {
      const auto config = resolve_config(opts);
      for (const auto& name : cases_of(config)) pipeline::rca_s3_step(config, dir, name);
    } else if (*a3_gen_cmd) {
      pipeline::a3_gen_step(resolve_config(opts), dir);
    } else if (*a3_train_cmd) {
      pipeline::a3_train_step(resolve_config(opts), dir);
    } else if (*a3_infer_cmd) {
      const auto config = resolve_config(opts);
      for (const auto& name : cases_of(config)) pipeline::a3_infer_step(config, dir, name);
    } else if (*var_fit_cmd) {
      if (!series_path.empty()) {
        const Eigen::MatrixXd series = io::read_series_csv(series_path);
        const int p = lag > 0 ? lag : select_lag_aic(series);
        const VarFit fit = fit_var(series, p);
        io::save_var_fit(out_file.empty() ? series_path + ".fit.json" : out_file, fit);
      } else {
        pipeline::var_fit_nominal_step(resolve_config(opts), dir);
      }
    } else if (*var_rca_cmd) {
      if (!nominal_fit.empty() || !anomalous_fit.empty()) {
        const VarFit nom = io::load_var_fit(nominal_fit);
        const VarFit ano = io::load_var_fit(anomalous_fit);
        io::json out;
        out["method"] = "var";
        out["ratio"] = ratio;
        io::json patterns = io::json::array();
        for (const Edge& e : var_rca(nom, ano, ratio)) {
          patterns.push_back(io::json::array({e.from, e.to}));
        }
        out["case_patterns"] = std::move(patterns);
        io::write_json_atomic(out_file.empty() ? "var_rca.json" : out_file, out);
      } else {
        auto config = resolve_config(opts);
        config.var.ratio = ratio;
        for (const auto& name : cases_of(config)) pipeline::var_rca_step(config, dir, name);
      }
    } else if (*eval_cmd) {
      print_eval(pipeline::evaluate(resolve_config(opts), dir));
    } else if (*table1_cmd) {
      CommonOpts o = opts;
      if (o.config_path.empty() && o.preset.empty()) o.preset = "table1";
      print_eval(pipeline::run_table1(resolve_config(o), dir));
    } else if (*table2_cmd) {
      CommonOpts o = opts;
      if (o.config_path.empty() && o.preset.empty()) {
        o.preset = dataset_choice == "30node" ? "table2-30node" : "table2-5node";
      }
      print_eval(pipeline::run_table2(resolve_config(o), dir));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
