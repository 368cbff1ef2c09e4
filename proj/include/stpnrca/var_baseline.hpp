#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stpnrca/synthgen.hpp"

namespace stpnrca {

struct VarFit {
  int n = 0;
  int p = 0;
  std::vector<Eigen::MatrixXd> A;  // estimated lag matrices, same layout as VarModel
  Eigen::VectorXd intercept;
  Eigen::MatrixXd resid_cov;
  long sample_count = 0;  // regression rows used
};

/// Per-equation ordinary least squares on lagged regressors plus intercept.
/// Rejects rank-deficient regressor matrices with a condition-number
/// diagnostic.
VarFit fit_var(const Eigen::MatrixXd& series, int p);

/// Smallest-AIC lag order over p in [1, p_max].
int select_lag_aic(const Eigen::MatrixXd& series, int p_max = 5);

/// deltaA(i, j) = sum_k |A_ano[k](i,j) - A_nom[k](i,j)| — the per-pattern
/// coefficient change, lags aggregated by absolute sum.
Eigen::MatrixXd coefficient_delta(const VarFit& nominal, const VarFit& anomalous);

/// Failed patterns j -> i with deltaA(i, j) strictly above ratio * max(deltaA).
/// An all-zero delta yields the empty set.
std::vector<Edge> var_rca(const VarFit& nominal, const VarFit& anomalous, double ratio = 0.4);

}  // namespace stpnrca
