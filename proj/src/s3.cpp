#include "stpnrca/s3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stpnrca {

namespace {

// Stable softplus over an array expression.
template <typename Derived>
auto softplus_array(const Eigen::ArrayBase<Derived>& z) {
  return z.max(0.0) + (1.0 + (-z.abs()).exp()).log();
}

}  // namespace

std::vector<int> RootCauseReport::pattern_set() const {
  std::vector<int> out;
  out.reserve(flips.size());
  for (const FlipStep& s : flips) out.push_back(s.pattern);
  std::sort(out.begin(), out.end());
  return out;
}

double switched_free_energy(const RbmModel& model, const Eigen::VectorXd& v,
                            const std::vector<int>& flip_set) {
  Eigen::VectorXd flipped = v;
  for (int i : flip_set) {
    if (i < 0 || i >= model.n_visible) {
      throw std::invalid_argument("switched_free_energy: pattern index out of range");
    }
    flipped(i) = 1.0 - flipped(i);
  }
  return free_energy(model, flipped);
}

namespace {

// Shared greedy core. `vs` holds one window per column (visible x windows);
// the objective is the column-mean free energy. The single-window search is
// the one-column case.
RootCauseReport greedy_search(const RbmModel& model, Eigen::MatrixXd vs,
                              const FreeEnergyReference& reference, const S3Config& config) {
  const int n_vis = model.n_visible;
  const auto n_win = vs.cols();
  const int budget = config.budget > 0 ? std::min(config.budget, n_vis) : n_vis;
  const double target = reference.f_tilde + config.kappa * reference.sigma;

  // Incremental state: hidden activations and visible-bias terms per window.
  Eigen::MatrixXd act = (model.w * vs).colwise() + model.c;  // hidden x windows
  Eigen::RowVectorXd lin = model.b.transpose() * vs;         // 1 x windows
  const auto mean_f = [&]() {
    const double soft = softplus_array(act.array()).sum();
    return (-lin.sum() - soft) / static_cast<double>(n_win);
  };

  RootCauseReport report;
  report.f_tilde = reference.f_tilde;
  double f_cur = mean_f();
  report.f_start = f_cur;
  report.f_end = f_cur;

  if (f_cur <= target) {
    report.stopped_by = "nominal";
    return report;
  }

  std::vector<bool> flipped(static_cast<std::size_t>(n_vis), false);
  Eigen::MatrixXd trial(act.rows(), act.cols());
  while (true) {
    // Evaluate every remaining single flip on top of the accepted set.
    int best = -1;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_vis; ++i) {
      if (flipped[static_cast<std::size_t>(i)]) continue;
      // delta per window: +1 where bit is 0, -1 where bit is 1
      const Eigen::RowVectorXd delta =
          Eigen::RowVectorXd::Ones(n_win) - 2.0 * vs.row(i);
      trial = act + model.w.col(i) * delta;
      const double soft = softplus_array(trial.array()).sum();
      const double lin_i = lin.sum() + model.b(i) * delta.sum();
      const double f_i = (-lin_i - soft) / static_cast<double>(n_win);
      if (f_i < best_f) {
        best_f = f_i;
        best = i;
      }
    }

    if (best < 0 || f_cur - best_f <= config.eps_improve) {
      report.stopped_by = "no_improving_flip";
      break;
    }

    // accept the flip
    const Eigen::RowVectorXd delta = Eigen::RowVectorXd::Ones(n_win) - 2.0 * vs.row(best);
    act += model.w.col(best) * delta;
    lin += model.b(best) * delta;
    vs.row(best) += delta;
    flipped[static_cast<std::size_t>(best)] = true;
    report.flips.push_back({best, f_cur - best_f});
    f_cur = best_f;
    report.f_end = f_cur;

    if (f_cur <= target) {
      report.stopped_by = "nominal";
      break;
    }
    if (static_cast<int>(report.flips.size()) >= budget) {
      report.stopped_by = "budget";
      break;
    }
  }
  return report;
}

}  // namespace

RootCauseReport s3_search(const RbmModel& model, const Eigen::VectorXd& v,
                          const FreeEnergyReference& reference, const S3Config& config) {
  if (v.size() != model.n_visible) throw std::invalid_argument("s3_search: length mismatch");
  return greedy_search(model, v, reference, config);
}

RootCauseReport s3_search_batch(const RbmModel& model, const Eigen::MatrixXd& vectors,
                                const FreeEnergyReference& reference, const S3Config& config) {
  if (vectors.rows() == 0) throw std::invalid_argument("s3_search_batch: no windows");
  if (vectors.cols() != model.n_visible) {
    throw std::invalid_argument("s3_search_batch: width mismatch");
  }
  return greedy_search(model, vectors.transpose(), reference, config);
}

namespace {

// Visit all ascending index combinations of the given cardinality, in
// lexicographic order.
template <typename Visit>
void for_each_combination(int n, int card, std::vector<int>& set, int next, Visit&& visit) {
  if (static_cast<int>(set.size()) == card) {
    visit(set);
    return;
  }
  for (int i = next; i <= n - (card - static_cast<int>(set.size())); ++i) {
    set.push_back(i);
    for_each_combination(n, card, set, i + 1, visit);
    set.pop_back();
  }
}

}  // namespace

OracleResult exhaustive_oracle(const RbmModel& model, const Eigen::VectorXd& v, int max_size) {
  const int n_vis = model.n_visible;
  if (max_size <= 0 && n_vis > 20) {
    throw std::invalid_argument("exhaustive_oracle: lattice too large without max_size");
  }
  const int size_cap = max_size > 0 ? std::min(max_size, n_vis) : n_vis;

  OracleResult best;
  best.f_value = std::numeric_limits<double>::infinity();
  // Cardinality ascending, lexicographic within: strict improvement makes the
  // smallest then lexicographically-first set win exact ties.
  std::vector<int> set;
  for (int card = 0; card <= size_cap; ++card) {
    for_each_combination(n_vis, card, set, 0, [&](const std::vector<int>& s) {
      const double f = switched_free_energy(model, v, s);
      if (f < best.f_value) {
        best.f_value = f;
        best.flip_set = s;
      }
    });
  }
  return best;
}

}  // namespace stpnrca
