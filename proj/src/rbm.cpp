#include "stpnrca/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "stpnrca/rng.hpp"

namespace stpnrca {

namespace {

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_visible(const RbmModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.n_visible) {
    throw std::invalid_argument("rbm: visible vector length mismatch");
  }
}

}  // namespace

double energy(const RbmModel& model, const Eigen::VectorXd& v, const Eigen::VectorXd& h) {
  check_visible(model, v);
  if (h.size() != model.n_hidden) {
    throw std::invalid_argument("rbm: hidden vector length mismatch");
  }
  return -h.dot(model.w * v) - model.b.dot(v) - model.c.dot(h);
}

double free_energy(const RbmModel& model, const Eigen::VectorXd& v) {
  check_visible(model, v);
  double f = -model.b.dot(v);
  const Eigen::VectorXd act = model.c + model.w * v;
  for (Eigen::Index j = 0; j < act.size(); ++j) f -= softplus(act(j));
  return f;
}

Eigen::VectorXd free_energies(const RbmModel& model, const Eigen::MatrixXd& vectors) {
  Eigen::VectorXd out(vectors.rows());
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    out(i) = free_energy(model, vectors.row(i).transpose());
  }
  return out;
}

RbmModel train_rbm(const Eigen::MatrixXd& vectors, const RbmTrainConfig& config) {
  const auto n_samples = vectors.rows();
  const auto n_visible = vectors.cols();
  if (n_samples == 0) throw std::invalid_argument("train_rbm: empty training set");
  const int n_hidden = config.n_hidden > 0 ? config.n_hidden : static_cast<int>(n_visible);

  RbmModel model;
  model.n_visible = static_cast<int>(n_visible);
  model.n_hidden = n_hidden;
  model.train_config = config;
  model.train_config.n_hidden = n_hidden;
  Rng rng(config.seed);
  model.w.resize(n_hidden, n_visible);
  for (Eigen::Index j = 0; j < model.w.rows(); ++j) {
    for (Eigen::Index i = 0; i < model.w.cols(); ++i) {
      model.w(j, i) = config.init_sigma * rng.gaussian();
    }
  }
  model.b = Eigen::VectorXd::Zero(n_visible);
  model.c = Eigen::VectorXd::Zero(n_hidden);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), 0);

  const auto sample_bernoulli = [&rng](const Eigen::MatrixXd& probs) {
    Eigen::MatrixXd s(probs.rows(), probs.cols());
    for (Eigen::Index j = 0; j < probs.rows(); ++j) {
      for (Eigen::Index i = 0; i < probs.cols(); ++i) {
        s(j, i) = rng.uniform() < probs(j, i) ? 1.0 : 0.0;
      }
    }
    return s;
  };

  double recon_error = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_err = 0.0;
    for (Eigen::Index start = 0; start < n_samples; start += config.batch_size) {
      const auto bsz = std::min<Eigen::Index>(config.batch_size, n_samples - start);
      Eigen::MatrixXd v0(n_visible, bsz);
      for (Eigen::Index k = 0; k < bsz; ++k) {
        v0.col(k) = vectors.row(order[static_cast<std::size_t>(start + k)]).transpose();
      }

      // positive phase
      Eigen::MatrixXd h_prob =
          ((model.w * v0).colwise() + model.c).unaryExpr([](double z) { return sigmoid(z); });
      const Eigen::MatrixXd h0_prob = h_prob;
      Eigen::MatrixXd h_sample = sample_bernoulli(h_prob);

      // k Gibbs steps; probabilities on the last hidden update
      Eigen::MatrixXd v_prob;
      Eigen::MatrixXd v_sample;
      for (int step = 0; step < config.cd_steps; ++step) {
        v_prob = ((model.w.transpose() * h_sample).colwise() + model.b)
                     .unaryExpr([](double z) { return sigmoid(z); });
        v_sample = sample_bernoulli(v_prob);
        h_prob = ((model.w * v_sample).colwise() + model.c)
                     .unaryExpr([](double z) { return sigmoid(z); });
        if (step + 1 < config.cd_steps) h_sample = sample_bernoulli(h_prob);
      }

      const double scale = config.learning_rate / static_cast<double>(bsz);
      model.w += scale * (h0_prob * v0.transpose() - h_prob * v_sample.transpose());
      model.b += scale * (v0 - v_sample).rowwise().sum();
      model.c += scale * (h0_prob - h_prob).rowwise().sum();

      epoch_err += (v0 - v_prob).squaredNorm();
    }
    recon_error = epoch_err / static_cast<double>(n_samples * n_visible);
    if (!model.w.allFinite() || !model.b.allFinite() || !model.c.allFinite()) {
      throw std::runtime_error("train_rbm: parameters diverged (non-finite) at epoch " +
                               std::to_string(epoch));
    }
  }
  model.final_recon_error = recon_error;
  return model;
}

Histogram make_histogram(const std::vector<double>& values, int bins, double range_margin) {
  if (values.empty()) throw std::invalid_argument("make_histogram: no values");
  if (bins < 1) throw std::invalid_argument("make_histogram: bins must be >= 1");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double span = hi - lo;
  lo -= range_margin * span;
  hi += range_margin * span;

  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  }
  h.counts = histogram_counts(values, h.edges);
  return h;
}

std::vector<double> histogram_counts(const std::vector<double>& values,
                                     const std::vector<double>& edges) {
  const auto bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - edges.begin() - 1, 0));
    if (idx >= bins) idx = bins - 1;  // clamp overflow into the end bin
    counts[idx] += 1.0;
  }
  return counts;
}

double kld(const std::vector<double>& test_counts, const std::vector<double>& ref_counts) {
  if (test_counts.size() != ref_counts.size()) {
    throw std::invalid_argument("kld: bin count mismatch");
  }
  const auto bins = static_cast<double>(test_counts.size());
  const double n_test = std::accumulate(test_counts.begin(), test_counts.end(), 0.0);
  const double n_ref = std::accumulate(ref_counts.begin(), ref_counts.end(), 0.0);
  double d = 0.0;
  for (std::size_t i = 0; i < test_counts.size(); ++i) {
    const double p = (test_counts[i] + 1.0) / (n_test + bins);
    const double q = (ref_counts[i] + 1.0) / (n_ref + bins);
    d += p * std::log(p / q);
  }
  return std::max(d, 0.0);
}

FreeEnergyReference nominal_reference(const RbmModel& model, const Eigen::MatrixXd& vectors,
                                      const std::vector<std::string>& mode_of, int bins,
                                      double range_margin) {
  if (vectors.rows() == 0) throw std::invalid_argument("nominal_reference: empty input");
  if (!mode_of.empty() && mode_of.size() != static_cast<std::size_t>(vectors.rows())) {
    throw std::invalid_argument("nominal_reference: mode label count mismatch");
  }

  const Eigen::VectorXd f = free_energies(model, vectors);
  std::map<std::string, std::vector<double>> groups;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const std::string key = mode_of.empty() ? "" : mode_of[static_cast<std::size_t>(i)];
    groups[key].push_back(f(i));
  }

  FreeEnergyReference ref;
  ref.f_tilde = std::numeric_limits<double>::infinity();
  for (const auto& [mode, vals] : groups) {
    const double mean =
        std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    double var = 0.0;
    for (double x : vals) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(vals.size()));
    ref.mode_ids.push_back(mode);
    ref.mode_mean.push_back(mean);
    ref.mode_std.push_back(sd);
    if (mean < ref.f_tilde) {
      ref.f_tilde = mean;
      ref.sigma = sd;
    }
  }
  ref.pooled_mean = f.mean();
  ref.hist = make_histogram({f.data(), f.data() + f.size()}, bins, range_margin);
  return ref;
}

double calibrate_kld_threshold(const FreeEnergyReference& reference,
                               const std::vector<std::vector<double>>& per_mode_f,
                               int window_count, int replicates, double quantile,
                               std::uint64_t seed) {
  if (per_mode_f.empty()) throw std::invalid_argument("calibrate: no nominal pools");
  Rng rng(seed);
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(replicates));
  std::vector<double> sample(static_cast<std::size_t>(window_count));
  for (int r = 0; r < replicates; ++r) {
    const auto& pool = per_mode_f[static_cast<std::size_t>(r) % per_mode_f.size()];
    if (pool.empty()) throw std::invalid_argument("calibrate: empty nominal pool");
    for (int i = 0; i < window_count; ++i) {
      sample[static_cast<std::size_t>(i)] = pool[rng.index(pool.size())];
    }
    scores.push_back(kld(histogram_counts(sample, reference.hist.edges), reference.hist.counts));
  }
  std::sort(scores.begin(), scores.end());
  const auto idx = static_cast<std::size_t>(
      std::min<double>(std::floor(quantile * static_cast<double>(scores.size())),
                       static_cast<double>(scores.size() - 1)));
  return scores[idx];
}

DetectionResult detect(const RbmModel& model, const FreeEnergyReference& reference,
                       const Eigen::MatrixXd& test_vectors, double threshold) {
  if (test_vectors.rows() == 0) throw std::invalid_argument("detect: no test vectors");
  if (reference.hist.edges.size() < 2) {
    throw std::invalid_argument("detect: reference histogram missing");
  }
  DetectionResult res;
  const Eigen::VectorXd f = free_energies(model, test_vectors);
  res.free_energy.assign(f.data(), f.data() + f.size());
  res.kld_score = kld(histogram_counts(res.free_energy, reference.hist.edges),
                      reference.hist.counts);
  res.threshold = threshold;
  res.anomalous = res.kld_score > threshold;
  return res;
}

}  // namespace stpnrca
