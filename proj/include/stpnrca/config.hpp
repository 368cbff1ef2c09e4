#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "stpnrca/a3.hpp"
#include "stpnrca/io.hpp"
#include "stpnrca/rbm.hpp"
#include "stpnrca/s3.hpp"
#include "stpnrca/stpn.hpp"

namespace stpnrca {

struct GeneratorConfig {
  std::string family = "5node";          // "5node" (6 modes, p=2) or "30node" (p=1)
  std::string anomaly = "pattern-break"; // case kind: "pattern-break" or "node-delay"
  std::string recipe_file;               // optional recipe JSON; empty: built-in recipe
  std::uint64_t recipe_seed = 11;
  int train_length = 12000;
  int test_length = 6000;
  int burn_in = 1000;
  int delay = 20;       // node-delay anomaly, samples
  int out_degree = 2;   // 30-node family cross edges per node
  double radius_target = 0.9;
  double noise_variance = 1.0;
  int holdout_per_mode = 7;  // nominal held-out runs for detector evaluation
};

struct ThresholdPolicy {
  std::string policy = "2means";  // "2means" or "global"
  double global = 0.1;
  double min_separation = 0.05;
};

struct DetectConfig {
  int bins = 50;
  double range_margin = 0.2;
  int bootstrap = 500;
  double quantile = 0.99;
  double threshold = -1.0;  // < 0: calibrate from nominal bootstrap
};

struct A3Config {
  FlipCorpusConfig corpus;
  MlpConfig mlp;
  double threshold = 0.5;
};

struct VarConfig {
  int lag = 0;  // 0: generator lag from metadata, else AIC
  double ratio = 0.4;
};

/// One experiment, one JSON document. CLI flags override individual fields.
struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  GeneratorConfig generator;
  StpnConfig stpn;
  ThresholdPolicy threshold;
  RbmTrainConfig rbm;
  DetectConfig detect;
  S3Config s3;
  A3Config a3;
  VarConfig var;
  int jobs = 1;
};

io::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const io::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Hash stamped into every artifact the experiment writes.
std::string config_hash(const ExperimentConfig& config);

/// Built-in experiment presets ("table1", "table2-5node", "table2-30node").
ExperimentConfig preset_config(const std::string& name);

}  // namespace stpnrca
