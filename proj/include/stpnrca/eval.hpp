#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stpnrca/s3.hpp"
#include "stpnrca/synthgen.hpp"

namespace stpnrca {

/// Flattened pattern index, source-major: edge (a -> b) lives at a * n + b.
inline int pattern_index(const Edge& e, int n) { return e.from * n + e.to; }
inline Edge pattern_of_index(int idx, int n) { return {idx / n, idx % n}; }

/// Pattern-by-pattern accuracy over all windows: the fraction of (window,
/// pattern) cells where the predicted anomalous/nominal state matches truth.
/// Rows are windows, entries are anomalous flags over the n^2 patterns.
double alpha1(const std::vector<std::vector<std::uint8_t>>& truth,
              const std::vector<std::vector<std::uint8_t>>& predicted);

/// Relaxed metric: fraction of windows whose true anomalous set is contained
/// in the predicted set. Sets are pattern indices.
double alpha2(const std::vector<std::vector<int>>& truth_sets,
              const std::vector<std::vector<int>>& predicted_sets);

struct EpsilonCounts {
  long discovered = 0;
  long incorrect = 0;
  bool no_discovery = false;

  double ratio() const {
    return discovered > 0 ? static_cast<double>(incorrect) / static_cast<double>(discovered)
                          : 0.0;
  }
};

/// Incorrectly discovered patterns for a node-fault case: predictions not
/// incident to the fault node (the node's self pattern counts as incident).
EpsilonCounts epsilon_node(const std::vector<int>& predicted, int fault_node, int n);

/// Incorrectly discovered patterns for a pattern-fault case: predictions
/// outside the true broken set.
EpsilonCounts epsilon_pattern(const std::vector<int>& predicted, const std::vector<int>& truth);

EpsilonCounts epsilon_total(const std::vector<EpsilonCounts>& per_case);

struct NodeScore {
  int node = 0;
  int incident = 0;      // failed patterns touching the node as source or target
  double delta_sum = 0;  // summed flip importance, tie-break
};

struct NodeAttribution {
  std::vector<NodeScore> ranking;  // descending by (incident, delta_sum), then node id
  bool explains_all = false;       // top node is incident to every failed pattern
};

/// Rank nodes by how many failed patterns they can explain.
NodeAttribution attribute_node(const std::vector<FlipStep>& failed, int n);

struct Table1Row {
  std::string method;
  long training_samples = 0;
  long testing_samples = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool has_alpha2 = false;
};

struct Table2Row {
  std::string method;
  EpsilonCounts counts;
};

std::string render_table1(const std::vector<Table1Row>& rows);
std::string render_table2(const std::string& dataset_label, const std::vector<Table2Row>& rows);

/// Pattern-matrix of flags (true/predicted) for one case, for external
/// plotting of heat grids.
struct HeatGrid {
  int n = 0;
  std::vector<std::uint8_t> truth;      // n*n, source-major
  std::vector<std::uint8_t> predicted;  // n*n
};

HeatGrid make_heat_grid(int n, const std::vector<int>& truth_patterns,
                        const std::vector<int>& predicted_patterns);

}  // namespace stpnrca
