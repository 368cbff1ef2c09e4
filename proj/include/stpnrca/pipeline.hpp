#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stpnrca/config.hpp"
#include "stpnrca/eval.hpp"
#include "stpnrca/io.hpp"

namespace stpnrca::pipeline {

namespace fs = std::filesystem;

/// Pack binarized windows as rows of a real matrix (RBM/MLP input layout).
Eigen::MatrixXd pack_bit_rows(const std::vector<BinaryPatternVector>& bits);

/// Run fn(0..count-1), at most `jobs` at a time. Results must be written to
/// per-index slots; the call order is unspecified beyond that.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

/// One case of an experiment dataset tree (datasets/index.json entry).
struct CaseEntry {
  std::string name;
  std::string kind;  // "pattern-break" or "node-delay"
  std::string mode_id;
  std::vector<Edge> broken;
  int fault_node = -1;
};

struct DatasetIndex {
  std::string family;
  int n = 0;
  int p = 0;
  std::vector<std::string> nominal;  // mode ids
  std::vector<std::string> holdout;  // run names
  std::vector<CaseEntry> cases;
};

DatasetIndex load_index(const fs::path& dir);

// Pipeline steps; each reads its inputs from and writes its outputs under the
// experiment directory, so the CLI subcommands compose.
void generate(const ExperimentConfig& config, const fs::path& dir);
void extract(const ExperimentConfig& config, const fs::path& dir);
void train_rbm_step(const ExperimentConfig& config, const fs::path& dir);
DetectionResult detect_step(const ExperimentConfig& config, const fs::path& dir,
                            const std::string& features_rel);
io::json rca_s3_step(const ExperimentConfig& config, const fs::path& dir,
                     const std::string& case_name);
void a3_gen_step(const ExperimentConfig& config, const fs::path& dir);
void a3_train_step(const ExperimentConfig& config, const fs::path& dir);
io::json a3_infer_step(const ExperimentConfig& config, const fs::path& dir,
                       const std::string& case_name);
void var_fit_nominal_step(const ExperimentConfig& config, const fs::path& dir);
io::json var_rca_step(const ExperimentConfig& config, const fs::path& dir,
                      const std::string& case_name);

struct Table1Result {
  double alpha1_s3 = 0.0;
  double alpha2_s3 = 0.0;
  double alpha1_a3 = 0.0;
  double alpha2_a3 = 0.0;
  long training_windows = 0;
  long corpus_samples = 0;
  long test_windows = 0;
  std::string table_text;
};

struct Table2Result {
  EpsilonCounts s3_counts;
  EpsilonCounts var_counts;
  int cases = 0;
  int attribution_correct = 0;  // S3 top-ranked node equals the fault node
  int explains_all = 0;
  std::string table_text;
};

struct DetectionSummary {
  int cases_total = 0;
  int cases_flagged = 0;
  int holdout_total = 0;
  int holdout_flagged = 0;
  double nominal_mean_f = 0.0;
  std::vector<double> case_mean_f;  // per case, index order
  double threshold = 0.0;
};

/// Scores whatever reports exist under the experiment directory against the
/// dataset truths and writes eval/ tables. Pattern-break cases produce the
/// accuracy table, node-delay cases the comparison table.
struct EvalResult {
  std::optional<Table1Result> table1;
  std::optional<Table2Result> table2;
  DetectionSummary detection;
};
EvalResult evaluate(const ExperimentConfig& config, const fs::path& dir);

/// End-to-end pipelines behind `repro-table1` / `repro-table2`.
EvalResult run_table1(const ExperimentConfig& config, const fs::path& dir);
EvalResult run_table2(const ExperimentConfig& config, const fs::path& dir);

}  // namespace stpnrca::pipeline
