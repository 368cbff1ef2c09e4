#include "stpnrca/synthgen.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stpnrca/rng.hpp"

namespace stpnrca {

Eigen::MatrixXd VarModel::companion() const {
  const int np = n * p;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(np, np);
  for (int k = 0; k < p; ++k) {
    c.block(0, k * n, n, n) = A[static_cast<std::size_t>(k)];
  }
  for (int k = 1; k < p; ++k) {
    c.block(k * n, (k - 1) * n, n, n) = Eigen::MatrixXd::Identity(n, n);
  }
  return c;
}

double check_stationarity(const VarModel& model) {
  if (model.n <= 0 || model.p <= 0 || model.A.size() != static_cast<std::size_t>(model.p)) {
    throw std::invalid_argument("check_stationarity: malformed model");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(model.companion(), /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void validate_model(const VarModel& model) {
  const double radius = check_stationarity(model);
  if (!(radius < 1.0)) {
    std::ostringstream msg;
    msg << "non-stationary VAR model: companion spectral radius " << radius << " >= 1";
    throw std::invalid_argument(msg.str());
  }
  if (model.noise_cov.rows() != model.n || model.noise_cov.cols() != model.n) {
    throw std::invalid_argument("noise_cov shape does not match node count");
  }
  if (!model.noise_cov.isApprox(model.noise_cov.transpose(), 1e-12)) {
    throw std::invalid_argument("noise_cov is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.noise_cov);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("noise_cov has negative eigenvalues");
  }
}

namespace {

// PSD square root. Handles the noise_cov = 0 case, where Cholesky would fail.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Core recursion shared by simulate_var and the burn-in replay in
// make_node_delay_anomaly. Emits burn_in + length rows.
Eigen::MatrixXd run_var(const VarModel& model, int length, int burn_in, std::uint64_t seed) {
  const int n = model.n;
  const int p = model.p;
  const int total = burn_in + length;
  const Eigen::MatrixXd chol = psd_sqrt(model.noise_cov);
  Rng rng(seed);

  Eigen::MatrixXd out(total, n);
  Eigen::VectorXd noise(n);
  for (int t = 0; t < total; ++t) {
    for (int i = 0; i < n; ++i) noise(i) = rng.gaussian();
    Eigen::VectorXd x = chol * noise;
    for (int k = 0; k < p && k < t; ++k) {
      x += model.A[static_cast<std::size_t>(k)] * out.row(t - k - 1).transpose();
    }
    out.row(t) = x.transpose();
  }
  return out;
}

}  // namespace

SyntheticDataset simulate_var(const VarModel& model, int length, int burn_in,
                              std::uint64_t seed) {
  if (length <= 0) throw std::invalid_argument("simulate_var: length must be positive");
  if (burn_in < 0) throw std::invalid_argument("simulate_var: burn_in must be >= 0");
  validate_model(model);

  Eigen::MatrixXd full = run_var(model, length, burn_in, seed);

  SyntheticDataset ds;
  ds.series = full.bottomRows(length);
  ds.meta.model = model;
  ds.meta.seed = seed;
  ds.meta.burn_in = burn_in;
  if (!ds.series.allFinite()) {
    throw std::runtime_error("simulate_var: produced non-finite values");
  }
  return ds;
}

bool GraphMode::has_edge(const Edge& e) const {
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

VarModel make_pattern_anomaly(const GraphMode& mode, const std::vector<Edge>& patterns) {
  for (const Edge& e : patterns) {
    if (!mode.has_edge(e)) {
      std::ostringstream msg;
      msg << "make_pattern_anomaly: pattern " << e.from << "->" << e.to
          << " is not an edge of mode " << mode.mode_id;
      throw std::invalid_argument(msg.str());
    }
  }
  VarModel broken = mode.model;
  for (const Edge& e : patterns) {
    for (auto& a : broken.A) a(e.to, e.from) = 0.0;
  }
  return broken;
}

SyntheticDataset make_node_delay_anomaly(const SyntheticDataset& data, int node, int delay) {
  const int t_len = static_cast<int>(data.series.rows());
  const int n = static_cast<int>(data.series.cols());
  if (node < 0 || node >= n) throw std::invalid_argument("make_node_delay_anomaly: bad node");
  if (delay < 1 || delay >= t_len) {
    throw std::invalid_argument("make_node_delay_anomaly: delay must be in [1, T)");
  }
  if (delay > data.meta.burn_in) {
    throw std::invalid_argument("make_node_delay_anomaly: delay exceeds burn-in history");
  }

  // Recover the burn-in tail so the shifted channel has a continuous past.
  Eigen::MatrixXd full =
      run_var(data.meta.model, t_len, data.meta.burn_in, data.meta.seed);

  const int out_len = t_len - delay;
  SyntheticDataset out;
  out.series = data.series.topRows(out_len);
  // Channel `node` at output time t is the channel's own value delay samples
  // earlier; index into `full` shifted by burn_in.
  for (int t = 0; t < out_len; ++t) {
    out.series(t, node) = full(data.meta.burn_in + t - delay, node);
  }
  out.meta = data.meta;
  out.meta.anomaly.kind = AnomalyKind::node_delay;
  out.meta.anomaly.node = node;
  out.meta.anomaly.delay = delay;
  out.truth.fault_node = node;
  return out;
}

namespace {

// Rescale coefficients until the companion radius drops to the target.
// Scaling A[k] by g^k scales every companion eigenvalue by exactly g, so one
// step lands on target up to eigensolver accuracy; iterate to be safe.
void stabilize(VarModel& model, double radius_target) {
  for (int iter = 0; iter < 64; ++iter) {
    const double radius = check_stationarity(model);
    if (radius <= radius_target) return;
    const double g = radius_target / radius;
    for (int k = 0; k < model.p; ++k) {
      model.A[static_cast<std::size_t>(k)] *= std::pow(g, k + 1);
    }
  }
  throw std::runtime_error("stabilize: failed to reach target spectral radius");
}

GraphMode realize_mode(const std::string& mode_id, int n, int p,
                       const std::vector<Edge>& cross_edges, Rng& rng,
                       const RecipeParams& params) {
  GraphMode mode;
  mode.mode_id = mode_id;
  mode.model.n = n;
  mode.model.p = p;
  mode.model.noise_cov =
      Eigen::MatrixXd::Identity(n, n) * params.noise_variance;
  mode.model.A.assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(n, n));

  for (int i = 0; i < n; ++i) mode.edges.push_back({i, i});
  mode.edges.insert(mode.edges.end(), cross_edges.begin(), cross_edges.end());

  for (const Edge& e : mode.edges) {
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    mode.model.A[0](e.to, e.from) = sign * rng.uniform(params.coef_lo, params.coef_hi);
    if (p >= 2) {
      const double sign2 = rng.bernoulli(0.5) ? 1.0 : -1.0;
      mode.model.A[1](e.to, e.from) = sign2 * rng.uniform(params.lag2_lo, params.lag2_hi);
    }
  }
  stabilize(mode.model, params.radius_target);
  return mode;
}

}  // namespace

std::vector<GraphMode> build_five_node_modes(std::uint64_t seed, const RecipeParams& params) {
  // Fixed topologies, node indices 0-based. Mode 1 carries the cycles
  // 1->2->5->1, 1->2->3->1, 2->3->2 (1-based labels). No mode's edge set is a
  // subset of another's, so breaking patterns can never turn one mode into
  // another.
  const std::vector<std::vector<Edge>> cross = {
      {{0, 1}, {1, 2}, {1, 4}, {2, 0}, {2, 1}, {4, 0}},
      {{0, 2}, {2, 3}, {3, 0}, {1, 4}, {4, 1}, {0, 4}},
      {{1, 0}, {0, 3}, {3, 1}, {2, 4}, {4, 2}, {3, 4}},
      {{0, 1}, {1, 3}, {3, 2}, {2, 0}, {4, 3}, {1, 0}},
      {{4, 0}, {0, 2}, {2, 4}, {1, 3}, {3, 1}, {4, 3}},
      {{3, 0}, {0, 4}, {4, 3}, {1, 2}, {2, 1}, {3, 2}},
  };
  std::vector<GraphMode> modes;
  for (std::size_t m = 0; m < cross.size(); ++m) {
    Rng rng(derive_seed(seed, m));
    modes.push_back(realize_mode("mode" + std::to_string(m + 1), 5, 2, cross[m], rng, params));
  }
  // Guard the no-subset property of the recipe.
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = 0; b < modes.size(); ++b) {
      if (a == b) continue;
      const std::set<Edge> ea(modes[a].edges.begin(), modes[a].edges.end());
      const std::set<Edge> eb(modes[b].edges.begin(), modes[b].edges.end());
      if (std::includes(eb.begin(), eb.end(), ea.begin(), ea.end())) {
        throw std::logic_error("five-node recipe: mode edge sets must not nest");
      }
    }
  }
  return modes;
}

GraphMode build_thirty_node_mode(std::uint64_t seed, int out_degree,
                                 const RecipeParams& params) {
  const int n = 30;
  Rng rng(derive_seed(seed, 1000));
  std::set<Edge> cross;
  for (int i = 0; i < n; ++i) {
    while (true) {
      int added = 0;
      for (const Edge& e : cross) added += (e.from == i);
      if (added >= out_degree) break;
      const int j = static_cast<int>(rng.index(n));
      if (j == i) continue;
      cross.insert({i, j});
    }
  }
  return realize_mode("mode30", n, 1, {cross.begin(), cross.end()}, rng, params);
}

std::vector<PatternCase> build_pattern_case_suite(const std::vector<GraphMode>& modes,
                                                  std::uint64_t seed) {
  // 5 + 10 + 10 + 5 cases with 1..4 broken patterns.
  const std::vector<int> sizes = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
                                  3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4};
  std::vector<PatternCase> cases;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const int mode_index = static_cast<int>(c % modes.size());
    const GraphMode& mode = modes[static_cast<std::size_t>(mode_index)];
    std::vector<Edge> cross;
    for (const Edge& e : mode.edges) {
      if (e.from != e.to) cross.push_back(e);
    }
    const std::size_t k = static_cast<std::size_t>(sizes[c]);
    if (k > cross.size()) throw std::logic_error("case suite: mode has too few cross edges");
    Rng rng(derive_seed(seed, 2000 + c));
    PatternCase pc;
    pc.case_id = static_cast<int>(c);
    pc.mode_index = mode_index;
    for (std::size_t idx : rng.sample_without_replacement(cross.size(), k)) {
      pc.broken.push_back(cross[idx]);
    }
    std::sort(pc.broken.begin(), pc.broken.end());
    cases.push_back(std::move(pc));
  }
  return cases;
}

}  // namespace stpnrca
