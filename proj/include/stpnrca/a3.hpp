#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace stpnrca {

using ByteMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct FlipCorpusConfig {
  int k_min = 1;                // flips per corrupted sample, uniform in [k_min, k_max]
  int k_max = 4;
  double clean_fraction = 0.2;  // share of unmodified samples with all-ones labels
  int samples_per_vector = 26;
  std::uint64_t seed = 7;
};

/// Training pairs for the anomaly-association classifier. Labels use the
/// indicator convention: 1 = normal pattern, 0 = anomalous pattern, so the
/// zero positions of a label are exactly where the input differs from its
/// source nominal vector.
struct FlipCorpus {
  int width = 0;       // L
  ByteMatrix inputs;   // rows = samples
  ByteMatrix labels;
  FlipCorpusConfig config;
};

/// Corrupt randomly chosen nominal vectors with k distinct random bit flips
/// (either direction) and emit the matching indicator labels; a
/// clean_fraction of samples passes through unmodified. Deterministic under
/// config.seed. Sample count = samples_per_vector * rows(nominal).
FlipCorpus generate_flip_corpus(const Eigen::MatrixXd& nominal, const FlipCorpusConfig& config);

struct MlpConfig {
  std::vector<int> hidden = {500, 500, 500};
  double learning_rate = 0.1;
  int batch_size = 10;
  int max_epochs = 200;
  int patience = 10;                  // early stopping, epochs without improvement
  double validation_fraction = 0.25;  // train/validation split of the corpus
  std::uint64_t seed = 1;
};

/// Feedforward multi-label classifier: rectifier hidden layers, per-element
/// logistic outputs. Input and output width both equal the pattern count.
struct MlpModel {
  std::vector<int> layer_sizes;          // [L, hidden..., L]
  std::vector<Eigen::MatrixXd> weights;  // layer l: out x in
  std::vector<Eigen::VectorXd> biases;
  MlpConfig train_config;
  double best_validation_loss = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
};

/// Output probabilities for a batch (columns = samples).
Eigen::MatrixXd mlp_forward(const MlpModel& model, const Eigen::MatrixXd& x);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
  double loss = 0.0;  // mean per-element cross-entropy
};

/// Backprop of the mean per-element cross-entropy over a batch.
MlpGradients mlp_backprop(const MlpModel& model, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y);

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// SGD with early stopping on validation cross-entropy; the best-validation
/// checkpoint is returned. Deterministic under config.seed. Throws
/// std::runtime_error on divergence (non-finite loss).
MlpModel train_mlp(const FlipCorpus& corpus, const MlpConfig& config);

/// Indicator label: per-element probability >= threshold reads as 1 (normal).
std::vector<std::uint8_t> infer(const MlpModel& model, const Eigen::VectorXd& v,
                                double threshold = 0.5);

/// Positions carrying 0 in an indicator label.
std::vector<int> anomalous_patterns(const std::vector<std::uint8_t>& label);

}  // namespace stpnrca
