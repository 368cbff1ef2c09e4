#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace stpnrca {

struct RbmTrainConfig {
  int n_hidden = 0;  // 0: use n_visible
  int epochs = 50;
  double learning_rate = 0.05;
  int cd_steps = 1;
  int batch_size = 10;
  double init_sigma = 0.01;
  std::uint64_t seed = 1;
};

/// Binary-binary RBM. W is hidden x visible; b are visible biases, c hidden.
struct RbmModel {
  int n_visible = 0;
  int n_hidden = 0;
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  RbmTrainConfig train_config;
  double final_recon_error = 0.0;
};

/// E(v, h) = -h'Wv - b'v - c'h.
double energy(const RbmModel& model, const Eigen::VectorXd& v, const Eigen::VectorXd& h);

/// F(v) = -b'v - sum_j softplus(c_j + (Wv)_j); equals -log sum_h exp(-E(v,h)).
double free_energy(const RbmModel& model, const Eigen::VectorXd& v);

/// Free energy of every row of `vectors` (rows = samples).
Eigen::VectorXd free_energies(const RbmModel& model, const Eigen::MatrixXd& vectors);

/// CD-k stochastic gradient training on binary row vectors. Deterministic
/// under config.seed. Throws std::runtime_error if the parameters go
/// non-finite.
RbmModel train_rbm(const Eigen::MatrixXd& vectors, const RbmTrainConfig& config);

struct Histogram {
  std::vector<double> edges;   // bins + 1 ascending edges
  std::vector<double> counts;  // per-bin counts; out-of-range values clamp to end bins
};

Histogram make_histogram(const std::vector<double>& values, int bins, double range_margin);
std::vector<double> histogram_counts(const std::vector<double>& values,
                                     const std::vector<double>& edges);

/// KLD(test || reference) over shared bins with add-one smoothing; >= 0.
double kld(const std::vector<double>& test_counts, const std::vector<double>& ref_counts);

/// Nominal free-energy statistics. f_tilde is the minimum of the per-mode
/// means (a vector must reach the best nominal basin); sigma is the standard
/// deviation within that mode. The pooled histogram backs the KLD detector.
struct FreeEnergyReference {
  std::vector<std::string> mode_ids;
  std::vector<double> mode_mean;
  std::vector<double> mode_std;
  double f_tilde = 0.0;
  double sigma = 0.0;
  double pooled_mean = 0.0;  // mean free energy over all nominal windows
  Histogram hist;
  double kld_threshold = 0.0;  // calibrated detection threshold
};

/// Per-mode stats + pooled histogram over nominal vectors. `mode_of[i]` names
/// the mode of row i; pass a single-element grouping (or empty strings) when
/// there is only one mode.
FreeEnergyReference nominal_reference(const RbmModel& model, const Eigen::MatrixXd& vectors,
                                      const std::vector<std::string>& mode_of,
                                      int bins = 50, double range_margin = 0.2);

/// Detection threshold calibrated as the `quantile` of nominal-vs-nominal
/// bootstrap KLD: each replicate draws `window_count` free energies with
/// replacement from a single mode's nominal pool (modes cycled), so the
/// threshold covers the gap between any one mode and the pooled histogram.
double calibrate_kld_threshold(const FreeEnergyReference& reference,
                               const std::vector<std::vector<double>>& per_mode_f,
                               int window_count, int replicates, double quantile,
                               std::uint64_t seed);

struct DetectionResult {
  bool anomalous = false;
  double kld_score = 0.0;
  double threshold = 0.0;
  std::vector<double> free_energy;  // per test vector
};

/// KLD between the test free-energy histogram and the nominal histogram;
/// anomalous iff the score exceeds the threshold.
DetectionResult detect(const RbmModel& model, const FreeEnergyReference& reference,
                       const Eigen::MatrixXd& test_vectors, double threshold);

}  // namespace stpnrca
