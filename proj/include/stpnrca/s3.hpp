#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stpnrca/rbm.hpp"

namespace stpnrca {

struct S3Config {
  double eps_improve = 1e-6;  // stop when no flip lowers F by more than this
  double kappa = 2.0;         // stop at F <= f_tilde + kappa * sigma
  int budget = 0;             // max flips; 0 means n_visible
  bool batch_mode = false;    // minimize the window-mean free energy instead
};

struct FlipStep {
  int pattern = 0;     // flattened index, source-major
  double delta_f = 0;  // free-energy decrease the flip achieved (> 0)
};

/// Greedy flip trajectory. stopped_by is one of "nominal" (reached the
/// reference basin), "no_improving_flip", "budget".
struct RootCauseReport {
  std::vector<FlipStep> flips;
  double f_start = 0.0;
  double f_end = 0.0;
  double f_tilde = 0.0;
  std::string stopped_by;

  std::vector<int> pattern_set() const;
};

/// Free energy of v with the bits in flip_set replaced by 1 - bit.
double switched_free_energy(const RbmModel& model, const Eigen::VectorXd& v,
                            const std::vector<int>& flip_set);

/// Sequential state switching: flip one pattern at a time, always the one
/// whose switch yields the lowest free energy, until no single flip improves
/// by more than eps_improve, the nominal reference level is reached, or the
/// flip budget is exhausted. Ties break toward the lowest pattern index.
RootCauseReport s3_search(const RbmModel& model, const Eigen::VectorXd& v,
                          const FreeEnergyReference& reference, const S3Config& config);

/// Batch variant: the same flip set is applied to every row of `vectors` and
/// the mean free energy over the batch is minimized. Robust against
/// per-window noise when a persistent anomaly spans many windows.
RootCauseReport s3_search_batch(const RbmModel& model, const Eigen::MatrixXd& vectors,
                                const FreeEnergyReference& reference, const S3Config& config);

struct OracleResult {
  std::vector<int> flip_set;  // ascending
  double f_value = 0.0;
};

/// Exhaustive minimizer of the switched free energy over all flip subsets of
/// size <= max_size (max_size = 0: the full lattice, n_visible <= 20 required).
/// Ties prefer smaller sets, then lexicographic order.
OracleResult exhaustive_oracle(const RbmModel& model, const Eigen::VectorXd& v,
                               int max_size = 0);

}  // namespace stpnrca
