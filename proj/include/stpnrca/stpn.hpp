#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace stpnrca {

enum class PartitionKind { mep, uniform };

/// Per-channel discretization: `boundaries` are strictly increasing cut
/// points; symbol(x) = number of boundaries <= x, so a sample equal to a
/// boundary falls in the bin to its right and symbols lie in 0..alphabet-1.
struct PartitionScheme {
  PartitionKind kind = PartitionKind::mep;
  int alphabet = 0;
  std::vector<double> boundaries;  // at most alphabet-1 entries
};

using SymbolSequence = std::vector<int>;

/// MEP: equal-frequency boundaries (empirical quantiles). Uniform: equal-width
/// boundaries over [min, max]. Rejects constant channels.
PartitionScheme fit_partition(const Eigen::VectorXd& channel, int alphabet_size,
                              PartitionKind kind);

int symbolize_sample(double x, const PartitionScheme& scheme);
SymbolSequence symbolize(const Eigen::VectorXd& channel, const PartitionScheme& scheme);

/// xD-Markov machine a -> b: states are the D-length symbol words of S^a that
/// were observed; row i of `pi` is the Laplace-smoothed distribution of the
/// next S^b symbol given state i.
struct XMarkovMachine {
  int depth = 1;
  int alphabet_a = 0;
  int alphabet_b = 0;
  std::vector<int> state_ids;       // observed word codes, ascending; word code =
                                    // sum_d sym[t-d] * |Sigma_a|^d (recent symbol first)
  std::vector<long> state_counts;   // occurrences per retained state (pre-smoothing)
  Eigen::MatrixXd counts;           // |Q| x |Sigma_b| raw transition counts
  Eigen::MatrixXd pi;               // row-stochastic smoothed matrix
};

XMarkovMachine estimate_machine(const SymbolSequence& sa, const SymbolSequence& sb,
                                int alphabet_a, int alphabet_b, int depth);

/// Causality weight: normalized mutual information I(Q^a; Sigma^b) / H(Sigma^b)
/// computed from the machine's state frequencies and pi, clamped to [0, 1].
/// H(Sigma^b) = 0 yields 0.
double compute_lambda(const XMarkovMachine& machine);

/// n x n matrix of lambda values for one window; (a, b) is the pattern a -> b,
/// so the diagonal holds the atomic patterns.
struct PatternGraph {
  Eigen::MatrixXd lambda;
  int window_start = 0;
  int window_len = 0;
};

/// Length n^2 bit vector, row-major (source-major): bit index = a * n + b.
struct BinaryPatternVector {
  std::vector<std::uint8_t> bits;
  int window_start = 0;
  int window_len = 0;
};

struct StpnConfig {
  int alphabet = 3;
  int depth = 1;
  int window = 200;
  int stride = 100;
};

/// One PatternGraph per window; all n^2 machines estimated per window from the
/// pre-symbolized channels. Window count = floor((T - window) / stride) + 1.
std::vector<PatternGraph> extract_windows(const Eigen::MatrixXd& series,
                                          const std::vector<PartitionScheme>& schemes,
                                          const StpnConfig& config);

/// bit = 1 iff lambda >= threshold.
BinaryPatternVector binarize(const PatternGraph& graph, const Eigen::MatrixXd& thresholds);

/// Per-pattern thresholds from nominal training windows: midpoint of a 2-means
/// split of the pattern's lambda values, falling back to `global_fallback`
/// when the cluster separation is below `min_separation`.
Eigen::MatrixXd fit_thresholds(const std::vector<PatternGraph>& training_windows,
                               double global_fallback = 0.1,
                               double min_separation = 0.05);

/// Fit one partition per channel on nominal training data (column-wise).
std::vector<PartitionScheme> fit_partitions(const Eigen::MatrixXd& series, int alphabet,
                                            PartitionKind kind);

}  // namespace stpnrca
