#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stpnrca {

/// Directed pattern/edge from -> to. For a VAR model the edge (from=j, to=i)
/// lives in the coefficients A[k](i, j).
struct Edge {
  int from = 0;
  int to = 0;

  friend bool operator==(const Edge& a, const Edge& b) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) = default;
};

/// Lag-order-p vector autoregression: y_t = sum_k A[k] y_{t-k-1} + noise.
struct VarModel {
  int n = 0;                         // node count
  int p = 0;                         // lag order
  std::vector<Eigen::MatrixXd> A;    // p matrices, A[k](i, j): node j at lag k+1 -> node i
  Eigen::MatrixXd noise_cov;         // n x n symmetric PSD
  std::uint64_t seed = 0;            // default generation seed

  /// Companion matrix of size (n*p) x (n*p).
  Eigen::MatrixXd companion() const;
};

/// Spectral radius of the companion matrix; < 1 means stationary.
double check_stationarity(const VarModel& model);

/// Throws std::invalid_argument naming the radius when the model is not stationary
/// or noise_cov is not symmetric PSD.
void validate_model(const VarModel& model);

/// One nominal operating mode: a directed graph realized as a VAR model.
/// Self loops are regular edges (from == to).
struct GraphMode {
  std::string mode_id;
  std::vector<Edge> edges;
  VarModel model;  // realized coefficients; every edge has >= 1 nonzero lag

  bool has_edge(const Edge& e) const;
};

enum class AnomalyKind { none, pattern_break, node_delay };

struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::none;
  std::vector<Edge> broken_patterns;  // pattern_break
  int node = -1;                      // node_delay
  int delay = 0;                      // samples, >= 1
};

struct DatasetTruth {
  std::vector<Edge> anomalous_patterns;
  int fault_node = -1;  // -1 unless a node fault
};

struct DatasetMeta {
  VarModel model;
  AnomalySpec anomaly;
  std::uint64_t seed = 0;
  int burn_in = 0;
  std::string mode_id;
};

struct SyntheticDataset {
  Eigen::MatrixXd series;  // T x n, row = time step
  DatasetMeta meta;
  DatasetTruth truth;
};

/// Simulate `length` samples after discarding `burn_in`. Noise is i.i.d.
/// Gaussian with covariance model.noise_cov. Bit-identical for identical
/// (model, length, burn_in, seed).
SyntheticDataset simulate_var(const VarModel& model, int length, int burn_in,
                              std::uint64_t seed);

/// Copy of the mode's realized model with A[k](to, from) = 0 for all k on each
/// broken edge; everything else bitwise unchanged. Patterns must be edges of
/// the mode.
VarModel make_pattern_anomaly(const GraphMode& mode, const std::vector<Edge>& patterns);

/// Replace one channel by its own copy shifted `delay` samples later. The head
/// of the shifted channel comes from the re-simulated burn-in continuation and
/// all channels are trimmed to the common valid length T - delay. Truth records
/// the fault node.
SyntheticDataset make_node_delay_anomaly(const SyntheticDataset& data, int node, int delay);

struct RecipeParams {
  double coef_lo = 0.3;       // cross/self lag-1 coefficient magnitude range
  double coef_hi = 0.6;
  double lag2_lo = 0.1;       // lag-2 magnitudes (p >= 2 only)
  double lag2_hi = 0.3;
  double radius_target = 0.9; // rescale until companion radius <= this (must be <= 0.95)
  double noise_variance = 1.0;
};

/// The six 5-node nominal modes (p = 2). Topologies are fixed; coefficient
/// values are drawn from `params` under `seed`. Mode 1 contains the cycles
/// 1->2->5->1, 1->2->3->1, 2->3->2 plus self loops on every node.
std::vector<GraphMode> build_five_node_modes(std::uint64_t seed,
                                             const RecipeParams& params = {});

/// Sparse 30-node mode (p = 1): self loop on every node plus `out_degree`
/// outgoing cross edges per node.
GraphMode build_thirty_node_mode(std::uint64_t seed, int out_degree = 2,
                                 const RecipeParams& params = {});

/// The 30-case pattern-break suite over a mode family: 5 one-pattern,
/// 10 two-pattern, 10 three-pattern and 5 four-pattern cases, assigned to the
/// modes round-robin, break sets drawn from the mode's cross edges under seed.
struct PatternCase {
  int case_id = 0;
  int mode_index = 0;
  std::vector<Edge> broken;
};
std::vector<PatternCase> build_pattern_case_suite(const std::vector<GraphMode>& modes,
                                                  std::uint64_t seed);

}  // namespace stpnrca
