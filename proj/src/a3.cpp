#include "stpnrca/a3.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stpnrca/rng.hpp"

namespace stpnrca {

FlipCorpus generate_flip_corpus(const Eigen::MatrixXd& nominal, const FlipCorpusConfig& config) {
  const auto n_vectors = nominal.rows();
  const auto width = nominal.cols();
  if (n_vectors == 0) throw std::invalid_argument("generate_flip_corpus: empty nominal set");
  if (config.k_min < 0 || config.k_max < config.k_min) {
    throw std::invalid_argument("generate_flip_corpus: bad flip count range");
  }
  if (config.k_max > width) {
    throw std::invalid_argument("generate_flip_corpus: flip count exceeds vector width");
  }

  const auto count = static_cast<Eigen::Index>(config.samples_per_vector) * n_vectors;
  FlipCorpus corpus;
  corpus.width = static_cast<int>(width);
  corpus.config = config;
  corpus.inputs.resize(count, width);
  corpus.labels.resize(count, width);

  Rng rng(config.seed);
  for (Eigen::Index s = 0; s < count; ++s) {
    const auto src = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n_vectors)));
    for (Eigen::Index i = 0; i < width; ++i) {
      corpus.inputs(s, i) = nominal(src, i) >= 0.5 ? 1 : 0;
      corpus.labels(s, i) = 1;
    }
    const bool clean = rng.bernoulli(config.clean_fraction);
    const int k = clean ? 0
                        : static_cast<int>(rng.int_range(config.k_min, config.k_max));
    for (std::size_t pos : rng.sample_without_replacement(static_cast<std::size_t>(width),
                                                          static_cast<std::size_t>(k))) {
      const auto i = static_cast<Eigen::Index>(pos);
      corpus.inputs(s, i) ^= 1;
      corpus.labels(s, i) = 0;
    }
  }
  return corpus;
}

namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

// Forward pass keeping the post-activation of every layer for backprop.
std::vector<Eigen::MatrixXd> forward_all(const MlpModel& model, const Eigen::MatrixXd& x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(model.weights.size() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Eigen::MatrixXd z = (model.weights[l] * acts.back()).colwise() + model.biases[l];
    acts.push_back(l + 1 == model.weights.size() ? sigmoid(z) : relu(z));
  }
  return acts;
}

double bce(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& y) {
  constexpr double eps = 1e-12;
  const auto p = probs.array().min(1.0 - eps).max(eps);
  const auto t = y.array();
  return -(t * p.log() + (1.0 - t) * (1.0 - p).log()).mean();
}

MlpModel init_model(int width, const MlpConfig& config, Rng& rng) {
  MlpModel model;
  model.train_config = config;
  model.layer_sizes.push_back(width);
  for (int h : config.hidden) model.layer_sizes.push_back(h);
  model.layer_sizes.push_back(width);

  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    const int fan_in = model.layer_sizes[l];
    const int fan_out = model.layer_sizes[l + 1];
    const double scale = std::sqrt(2.0 / fan_in);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = scale * rng.gaussian();
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

}  // namespace

Eigen::MatrixXd mlp_forward(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.layer_sizes.front()) {
    throw std::invalid_argument("mlp_forward: input width mismatch");
  }
  return forward_all(model, x).back();
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return bce(mlp_forward(model, x), y);
}

MlpGradients mlp_backprop(const MlpModel& model, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y) {
  const auto acts = forward_all(model, x);
  const auto n_layers = model.weights.size();
  const double denom = static_cast<double>(y.rows() * y.cols());

  MlpGradients g;
  g.dw.resize(n_layers);
  g.db.resize(n_layers);
  g.loss = bce(acts.back(), y);

  // sigmoid + cross-entropy: output delta is (p - y) / (batch * width)
  Eigen::MatrixXd delta = (acts.back() - y) / denom;
  for (std::size_t l = n_layers; l-- > 0;) {
    g.dw[l] = delta * acts[l].transpose();
    g.db[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (model.weights[l].transpose() * delta).array() *
              (acts[l].array() > 0.0).cast<double>();
    }
  }
  return g;
}

MlpModel train_mlp(const FlipCorpus& corpus, const MlpConfig& config) {
  const auto total = corpus.inputs.rows();
  if (total == 0) throw std::invalid_argument("train_mlp: empty corpus");
  const auto width = corpus.inputs.cols();

  Rng rng(config.seed);
  MlpModel model = init_model(static_cast<int>(width), config, rng);

  // deterministic split
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto n_val = static_cast<Eigen::Index>(config.validation_fraction *
                                               static_cast<double>(total));
  const auto n_train = total - n_val;
  if (n_train == 0) throw std::invalid_argument("train_mlp: no training samples after split");

  Eigen::MatrixXd x_val(width, n_val), y_val(width, n_val);
  for (Eigen::Index i = 0; i < n_val; ++i) {
    x_val.col(i) = corpus.inputs.row(order[static_cast<std::size_t>(n_train + i)])
                       .transpose().cast<double>();
    y_val.col(i) = corpus.labels.row(order[static_cast<std::size_t>(n_train + i)])
                       .transpose().cast<double>();
  }
  std::vector<Eigen::Index> train_idx(order.begin(), order.begin() + n_train);

  MlpModel best = model;
  best.best_validation_loss = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(train_idx);
    for (Eigen::Index start = 0; start < n_train; start += config.batch_size) {
      const auto bsz = std::min<Eigen::Index>(config.batch_size, n_train - start);
      Eigen::MatrixXd xb(width, bsz), yb(width, bsz);
      for (Eigen::Index k = 0; k < bsz; ++k) {
        const auto row = train_idx[static_cast<std::size_t>(start + k)];
        xb.col(k) = corpus.inputs.row(row).transpose().cast<double>();
        yb.col(k) = corpus.labels.row(row).transpose().cast<double>();
      }
      const MlpGradients g = mlp_backprop(model, xb, yb);
      if (!std::isfinite(g.loss)) {
        throw std::runtime_error("train_mlp: loss diverged at epoch " + std::to_string(epoch));
      }
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        model.weights[l] -= config.learning_rate * g.dw[l];
        model.biases[l] -= config.learning_rate * g.db[l];
      }
    }

    const double val_loss = n_val > 0 ? mlp_loss(model, x_val, y_val) : 0.0;
    if (!std::isfinite(val_loss)) {
      throw std::runtime_error("train_mlp: validation loss diverged");
    }
    if (val_loss < best.best_validation_loss - 1e-12) {
      best = model;
      best.best_validation_loss = val_loss;
      best.best_epoch = epoch;
      stall = 0;
    } else {
      ++stall;
    }
    best.epochs_run = epoch + 1;
    if (n_val > 0 && stall >= config.patience) break;
  }
  if (n_val == 0) {
    best = model;
    best.best_validation_loss = 0.0;
  }
  return best;
}

std::vector<std::uint8_t> infer(const MlpModel& model, const Eigen::VectorXd& v,
                                double threshold) {
  if (v.size() != model.layer_sizes.front()) {
    throw std::invalid_argument("infer: input width mismatch");
  }
  const Eigen::MatrixXd probs = mlp_forward(model, v);
  std::vector<std::uint8_t> label(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    label[static_cast<std::size_t>(i)] = probs(i, 0) >= threshold ? 1 : 0;
  }
  return label;
}

std::vector<int> anomalous_patterns(const std::vector<std::uint8_t>& label) {
  std::vector<int> out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace stpnrca
