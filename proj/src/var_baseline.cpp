#include "stpnrca/var_baseline.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stpnrca {

VarFit fit_var(const Eigen::MatrixXd& series, int p) {
  const auto t_len = series.rows();
  const auto n = series.cols();
  if (p < 1) throw std::invalid_argument("fit_var: lag order must be >= 1");
  if (t_len <= n * p + 10) throw std::invalid_argument("fit_var: series too short");
  if (!series.allFinite()) throw std::invalid_argument("fit_var: non-finite series");

  const auto rows = t_len - p;
  const auto cols = n * p + 1;
  Eigen::MatrixXd x(rows, cols);
  Eigen::MatrixXd y(rows, n);
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (int k = 0; k < p; ++k) {
      x.block(t, k * n, 1, n) = series.row(t + p - k - 1);
    }
    x(t, cols - 1) = 1.0;
    y.row(t) = series.row(t + p);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < cols) {
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double cond = diag.maxCoeff() / std::max(diag.minCoeff(), 1e-300);
    std::ostringstream msg;
    msg << "fit_var: singular regressor matrix (rank " << qr.rank() << " of " << cols
        << ", condition estimate " << cond << ")";
    throw std::invalid_argument(msg.str());
  }
  const Eigen::MatrixXd beta = qr.solve(y);  // cols x n

  VarFit fit;
  fit.n = static_cast<int>(n);
  fit.p = p;
  fit.sample_count = rows;
  fit.A.reserve(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    fit.A.push_back(beta.block(k * n, 0, n, n).transpose());
  }
  fit.intercept = beta.row(cols - 1).transpose();

  const Eigen::MatrixXd resid = y - x * beta;
  const auto dof = std::max<Eigen::Index>(rows - cols, 1);
  fit.resid_cov = resid.transpose() * resid / static_cast<double>(dof);
  return fit;
}

int select_lag_aic(const Eigen::MatrixXd& series, int p_max) {
  const auto n = series.cols();
  int best_p = 1;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    const VarFit fit = fit_var(series, p);
    // ML residual covariance for the information criterion
    const double scale =
        static_cast<double>(fit.sample_count - (n * p + 1)) / static_cast<double>(fit.sample_count);
    const double logdet = std::log((fit.resid_cov * scale).determinant());
    const double aic = logdet + 2.0 * static_cast<double>(p * n * n + n) /
                                    static_cast<double>(fit.sample_count);
    if (aic < best_aic) {
      best_aic = aic;
      best_p = p;
    }
  }
  return best_p;
}

Eigen::MatrixXd coefficient_delta(const VarFit& nominal, const VarFit& anomalous) {
  if (nominal.n != anomalous.n || nominal.p != anomalous.p) {
    throw std::invalid_argument("coefficient_delta: fits have different shapes");
  }
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(nominal.n, nominal.n);
  for (int k = 0; k < nominal.p; ++k) {
    delta += (anomalous.A[static_cast<std::size_t>(k)] - nominal.A[static_cast<std::size_t>(k)])
                 .cwiseAbs();
  }
  return delta;
}

std::vector<Edge> var_rca(const VarFit& nominal, const VarFit& anomalous, double ratio) {
  const Eigen::MatrixXd delta = coefficient_delta(nominal, anomalous);
  const double max_delta = delta.maxCoeff();
  std::vector<Edge> failed;
  if (max_delta <= 0.0) return failed;
  for (Eigen::Index j = 0; j < delta.cols(); ++j) {
    for (Eigen::Index i = 0; i < delta.rows(); ++i) {
      if (delta(i, j) > ratio * max_delta) {
        failed.push_back({static_cast<int>(j), static_cast<int>(i)});
      }
    }
  }
  std::sort(failed.begin(), failed.end());
  return failed;
}

}  // namespace stpnrca
