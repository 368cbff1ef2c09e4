#include "stpnrca/stpn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stpnrca {

PartitionScheme fit_partition(const Eigen::VectorXd& channel, int alphabet_size,
                              PartitionKind kind) {
  const auto n = channel.size();
  if (alphabet_size < 2) throw std::invalid_argument("fit_partition: alphabet must be >= 2");
  if (n < 10L * alphabet_size) {
    throw std::invalid_argument("fit_partition: channel too short for alphabet");
  }
  if (!channel.allFinite()) throw std::invalid_argument("fit_partition: non-finite values");

  const double lo = channel.minCoeff();
  const double hi = channel.maxCoeff();
  if (lo == hi) throw std::invalid_argument("fit_partition: constant channel");

  PartitionScheme scheme;
  scheme.kind = kind;
  scheme.alphabet = alphabet_size;
  if (kind == PartitionKind::uniform) {
    for (int k = 1; k < alphabet_size; ++k) {
      scheme.boundaries.push_back(lo + (hi - lo) * k / alphabet_size);
    }
  } else {
    std::vector<double> sorted(channel.data(), channel.data() + n);
    std::sort(sorted.begin(), sorted.end());
    for (int k = 1; k < alphabet_size; ++k) {
      const auto idx = static_cast<std::size_t>(
          static_cast<long>(k) * n / alphabet_size);
      const double b = sorted[idx];
      // ties can repeat a quantile; keep boundaries strictly increasing
      if (scheme.boundaries.empty() || b > scheme.boundaries.back()) {
        scheme.boundaries.push_back(b);
      }
    }
  }
  return scheme;
}

int symbolize_sample(double x, const PartitionScheme& scheme) {
  if (!std::isfinite(x)) throw std::invalid_argument("symbolize: non-finite sample");
  const auto it = std::upper_bound(scheme.boundaries.begin(), scheme.boundaries.end(), x);
  return static_cast<int>(it - scheme.boundaries.begin());
}

SymbolSequence symbolize(const Eigen::VectorXd& channel, const PartitionScheme& scheme) {
  SymbolSequence out(static_cast<std::size_t>(channel.size()));
  for (Eigen::Index t = 0; t < channel.size(); ++t) {
    out[static_cast<std::size_t>(t)] = symbolize_sample(channel(t), scheme);
  }
  return out;
}

namespace {

long ipow(int base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Word codes of S^a, recent symbol in the least significant digit. Entry t is
// the code of the word ending at t; positions before depth-1 are unused.
std::vector<int> word_codes(const int* sa, std::size_t len, int alphabet, int depth) {
  std::vector<int> codes(len, 0);
  for (std::size_t t = static_cast<std::size_t>(depth) - 1; t < len; ++t) {
    int code = 0;
    for (int d = 0; d < depth; ++d) {
      code += sa[t - static_cast<std::size_t>(d)] * static_cast<int>(ipow(alphabet, d));
    }
    codes[t] = code;
  }
  return codes;
}

XMarkovMachine machine_from_counts(const Eigen::MatrixXd& dense_counts, int alphabet_a,
                                   int alphabet_b, int depth) {
  XMarkovMachine m;
  m.depth = depth;
  m.alphabet_a = alphabet_a;
  m.alphabet_b = alphabet_b;

  for (Eigen::Index s = 0; s < dense_counts.rows(); ++s) {
    const double row_sum = dense_counts.row(s).sum();
    if (row_sum > 0) {
      m.state_ids.push_back(static_cast<int>(s));
      m.state_counts.push_back(static_cast<long>(row_sum));
    }
  }
  const auto q = static_cast<Eigen::Index>(m.state_ids.size());
  m.counts.resize(q, alphabet_b);
  m.pi.resize(q, alphabet_b);
  for (Eigen::Index i = 0; i < q; ++i) {
    m.counts.row(i) = dense_counts.row(m.state_ids[static_cast<std::size_t>(i)]);
    const double denom = m.counts.row(i).sum() + alphabet_b;  // Laplace add-one
    m.pi.row(i) = (m.counts.row(i).array() + 1.0) / denom;
  }
  return m;
}

XMarkovMachine estimate_machine_span(const int* sa, const int* sb, std::size_t len,
                                     int alphabet_a, int alphabet_b, int depth) {
  const long n_states = ipow(alphabet_a, depth);
  if (static_cast<long>(len) <= n_states * 10) {
    throw std::invalid_argument("estimate_machine: sequences too short for state space");
  }
  const std::vector<int> codes = word_codes(sa, len, alphabet_a, depth);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n_states, alphabet_b);
  for (std::size_t t = static_cast<std::size_t>(depth) - 1; t + 1 < len; ++t) {
    dense(codes[t], sb[t + 1]) += 1.0;
  }
  return machine_from_counts(dense, alphabet_a, alphabet_b, depth);
}

}  // namespace

XMarkovMachine estimate_machine(const SymbolSequence& sa, const SymbolSequence& sb,
                                int alphabet_a, int alphabet_b, int depth) {
  if (sa.size() != sb.size()) {
    throw std::invalid_argument("estimate_machine: sequence lengths differ");
  }
  if (depth < 1) throw std::invalid_argument("estimate_machine: depth must be >= 1");
  return estimate_machine_span(sa.data(), sb.data(), sa.size(), alphabet_a, alphabet_b, depth);
}

double compute_lambda(const XMarkovMachine& machine) {
  const auto q = machine.pi.rows();
  const auto nb = machine.pi.cols();
  if (q == 0) return 0.0;

  double total = 0.0;
  for (long c : machine.state_counts) total += static_cast<double>(c);
  if (total <= 0) return 0.0;

  Eigen::VectorXd p_state(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    p_state(i) = static_cast<double>(machine.state_counts[static_cast<std::size_t>(i)]) / total;
  }
  Eigen::VectorXd p_sym = machine.pi.transpose() * p_state;

  double h_sym = 0.0;
  for (Eigen::Index j = 0; j < nb; ++j) {
    if (p_sym(j) > 0) h_sym -= p_sym(j) * std::log(p_sym(j));
  }
  if (h_sym <= 0.0) return 0.0;

  double mi = 0.0;
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double pij = machine.pi(i, j);
      if (pij > 0 && p_sym(j) > 0) {
        mi += p_state(i) * pij * std::log(pij / p_sym(j));
      }
    }
  }
  return std::clamp(mi / h_sym, 0.0, 1.0);
}

std::vector<PartitionScheme> fit_partitions(const Eigen::MatrixXd& series, int alphabet,
                                            PartitionKind kind) {
  std::vector<PartitionScheme> schemes;
  schemes.reserve(static_cast<std::size_t>(series.cols()));
  for (Eigen::Index c = 0; c < series.cols(); ++c) {
    schemes.push_back(fit_partition(series.col(c), alphabet, kind));
  }
  return schemes;
}

std::vector<PatternGraph> extract_windows(const Eigen::MatrixXd& series,
                                          const std::vector<PartitionScheme>& schemes,
                                          const StpnConfig& config) {
  const int n = static_cast<int>(series.cols());
  const int t_len = static_cast<int>(series.rows());
  if (static_cast<int>(schemes.size()) != n) {
    throw std::invalid_argument("extract_windows: one scheme per channel required");
  }
  if (config.window > t_len) {
    throw std::invalid_argument("extract_windows: window longer than series");
  }
  if (config.stride < 1) throw std::invalid_argument("extract_windows: stride must be >= 1");

  std::vector<SymbolSequence> symbols;
  symbols.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    symbols.push_back(symbolize(series.col(c), schemes[static_cast<std::size_t>(c)]));
  }

  std::vector<PatternGraph> out;
  for (int start = 0; start + config.window <= t_len; start += config.stride) {
    PatternGraph g;
    g.window_start = start;
    g.window_len = config.window;
    g.lambda.resize(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const XMarkovMachine m = estimate_machine_span(
            symbols[static_cast<std::size_t>(a)].data() + start,
            symbols[static_cast<std::size_t>(b)].data() + start,
            static_cast<std::size_t>(config.window),
            schemes[static_cast<std::size_t>(a)].alphabet,
            schemes[static_cast<std::size_t>(b)].alphabet, config.depth);
        g.lambda(a, b) = compute_lambda(m);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

BinaryPatternVector binarize(const PatternGraph& graph, const Eigen::MatrixXd& thresholds) {
  const auto n = graph.lambda.rows();
  if (thresholds.rows() != n || thresholds.cols() != n) {
    throw std::invalid_argument("binarize: threshold shape mismatch");
  }
  BinaryPatternVector v;
  v.window_start = graph.window_start;
  v.window_len = graph.window_len;
  v.bits.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      v.bits[static_cast<std::size_t>(a * n + b)] =
          graph.lambda(a, b) >= thresholds(a, b) ? 1 : 0;
    }
  }
  return v;
}

namespace {

// Deterministic 1-D 2-means: centers seeded at min and max.
struct TwoMeans {
  double lo_center = 0.0;
  double hi_center = 0.0;
};

TwoMeans two_means(const std::vector<double>& values) {
  double c0 = *std::min_element(values.begin(), values.end());
  double c1 = *std::max_element(values.begin(), values.end());
  for (int iter = 0; iter < 100; ++iter) {
    double sum0 = 0, sum1 = 0;
    long n0 = 0, n1 = 0;
    for (double v : values) {
      if (std::abs(v - c0) <= std::abs(v - c1)) {
        sum0 += v;
        ++n0;
      } else {
        sum1 += v;
        ++n1;
      }
    }
    const double new0 = n0 ? sum0 / static_cast<double>(n0) : c0;
    const double new1 = n1 ? sum1 / static_cast<double>(n1) : c1;
    if (new0 == c0 && new1 == c1) break;
    c0 = new0;
    c1 = new1;
  }
  return {std::min(c0, c1), std::max(c0, c1)};
}

}  // namespace

Eigen::MatrixXd fit_thresholds(const std::vector<PatternGraph>& training_windows,
                               double global_fallback, double min_separation) {
  if (training_windows.empty()) {
    throw std::invalid_argument("fit_thresholds: no training windows");
  }
  const auto n = training_windows.front().lambda.rows();
  Eigen::MatrixXd thr(n, n);
  std::vector<double> values(training_windows.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      for (std::size_t w = 0; w < training_windows.size(); ++w) {
        values[w] = training_windows[w].lambda(a, b);
      }
      const TwoMeans km = two_means(values);
      thr(a, b) = (km.hi_center - km.lo_center < min_separation)
                      ? global_fallback
                      : 0.5 * (km.lo_center + km.hi_center);
    }
  }
  return thr;
}

}  // namespace stpnrca
