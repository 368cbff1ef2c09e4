#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "stpnrca/a3.hpp"
#include "stpnrca/rbm.hpp"
#include "stpnrca/s3.hpp"
#include "stpnrca/stpn.hpp"
#include "stpnrca/synthgen.hpp"
#include "stpnrca/var_baseline.hpp"

namespace stpnrca::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

/// Write via a temp file + rename so failures leave no partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json_atomic(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// FNV-1a of a string; used to stamp artifacts with their config hash.
std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(const std::string& text);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

// dataset directory: series.csv (header t,x1..xn) + meta.json
void save_dataset(const std::filesystem::path& dir, const SyntheticDataset& ds,
                  const std::string& config_hash = {});
SyntheticDataset load_dataset(const std::filesystem::path& dir);
void write_series_csv(const std::filesystem::path& path, const Eigen::MatrixXd& series);
Eigen::MatrixXd read_series_csv(const std::filesystem::path& path);

json var_model_to_json(const VarModel& model);
VarModel var_model_from_json(const json& j);

// mode recipe file: n, p, per-edge coefficient values, noise covariance
void save_recipes(const std::filesystem::path& path, const std::vector<GraphMode>& modes);
std::vector<GraphMode> load_recipes(const std::filesystem::path& path);

struct FeatureFile {
  StpnConfig config;
  std::vector<PartitionScheme> schemes;
  Eigen::MatrixXd thresholds;
  std::vector<PatternGraph> graphs;
  std::vector<BinaryPatternVector> bits;
  std::string config_hash;
};
void save_features(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile load_features(const std::filesystem::path& path);

void save_rbm(const std::filesystem::path& path, const RbmModel& model,
              const FreeEnergyReference& reference, const std::string& config_hash = {});
std::pair<RbmModel, FreeEnergyReference> load_rbm(const std::filesystem::path& path);

void save_mlp(const std::filesystem::path& path, const MlpModel& model,
              const std::string& config_hash = {});
MlpModel load_mlp(const std::filesystem::path& path);

// corpus file: binary matrices with a small header
void save_corpus(const std::filesystem::path& path, const FlipCorpus& corpus);
FlipCorpus load_corpus(const std::filesystem::path& path);

void save_var_fit(const std::filesystem::path& path, const VarFit& fit,
                  const std::string& config_hash = {});
VarFit load_var_fit(const std::filesystem::path& path);

/// Root-cause report entry; `method` is "s3", "a3" or "var".
json report_to_json(const RootCauseReport& report, int n, int window_id,
                    const std::string& method = "s3");

}  // namespace stpnrca::io
