#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "stpnrca/rng.hpp"
#include "stpnrca/stpn.hpp"
#include "stpnrca/synthgen.hpp"

using namespace stpnrca;

namespace {

Eigen::VectorXd uniform_channel(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform();
  return v;
}

Eigen::VectorXd gaussian_channel(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
  return v;
}

// independent quantile routine (nth_element based), the MEP oracle
double quantile_oracle(const Eigen::VectorXd& data, double q) {
  std::vector<double> v(data.data(), data.data() + data.size());
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size()));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

// plug-in mutual information from joint counts, in nats; the Lambda oracle
double mi_oracle(const std::vector<int>& xs, const std::vector<int>& ys, int nx, int ny) {
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(nx, ny);
  for (std::size_t t = 0; t < xs.size(); ++t) joint(xs[t], ys[t]) += 1.0;
  joint /= joint.sum();
  const Eigen::VectorXd px = joint.rowwise().sum();
  const Eigen::VectorXd py = joint.colwise().sum();
  double mi = 0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (joint(i, j) > 0) mi += joint(i, j) * std::log(joint(i, j) / (px(i) * py(j)));
    }
  }
  return mi;
}

}  // namespace

TEST_CASE("fit_partition") {
  SUBCASE("MEP on uniform data lands on the quartiles") {
    const auto channel = uniform_channel(10000, 1);
    const PartitionScheme s = fit_partition(channel, 4, PartitionKind::mep);
    REQUIRE(s.boundaries.size() == 3);
    CHECK(std::abs(s.boundaries[0] - 0.25) < 0.02);
    CHECK(std::abs(s.boundaries[1] - 0.50) < 0.02);
    CHECK(std::abs(s.boundaries[2] - 0.75) < 0.02);
  }

  SUBCASE("uniform kind gives equal-width boundaries") {
    Eigen::VectorXd channel(100);
    for (int i = 0; i < 100; ++i) channel(i) = 8.0 * i / 99.0;
    channel(0) = 0.0;
    channel(99) = 8.0;
    const PartitionScheme s = fit_partition(channel, 4, PartitionKind::uniform);
    REQUIRE(s.boundaries.size() == 3);
    CHECK(s.boundaries[0] == doctest::Approx(2.0));
    CHECK(s.boundaries[1] == doctest::Approx(4.0));
    CHECK(s.boundaries[2] == doctest::Approx(6.0));
  }

  SUBCASE("MEP tertiles of standard normal data match a quantile oracle") {
    const auto channel = gaussian_channel(10000, 2);
    const PartitionScheme s = fit_partition(channel, 3, PartitionKind::mep);
    REQUIRE(s.boundaries.size() == 2);
    CHECK(std::abs(s.boundaries[0] - quantile_oracle(channel, 1.0 / 3.0)) < 1e-12);
    CHECK(std::abs(s.boundaries[1] - quantile_oracle(channel, 2.0 / 3.0)) < 1e-12);
    // Gaussian tertile quantiles sit at +-0.4307
    CHECK(std::abs(s.boundaries[0] + 0.4307) < 0.05);
    CHECK(std::abs(s.boundaries[1] - 0.4307) < 0.05);
  }

  SUBCASE("constant channel is rejected") {
    CHECK_THROWS_AS((void)fit_partition(Eigen::VectorXd::Ones(100), 3, PartitionKind::mep),
                    std::invalid_argument);
  }

  SUBCASE("too-short channel is rejected") {
    CHECK_THROWS_AS((void)fit_partition(uniform_channel(25, 3), 3, PartitionKind::mep),
                    std::invalid_argument);
  }

  SUBCASE("MEP balance: distinct values fill bins within one count") {
    for (int alphabet : {2, 3, 4, 5}) {
      const auto channel = gaussian_channel(997, 17);  // deliberately not divisible
      const PartitionScheme s = fit_partition(channel, alphabet, PartitionKind::mep);
      std::vector<int> counts(static_cast<std::size_t>(alphabet), 0);
      for (int sym : symbolize(channel, s)) counts[static_cast<std::size_t>(sym)] += 1;
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("symbolize") {
  PartitionScheme s;
  s.kind = PartitionKind::mep;
  s.alphabet = 4;
  s.boundaries = {0.25, 0.5, 0.75};

  SUBCASE("interval conventions") {
    CHECK(symbolize_sample(0.1, s) == 0);
    CHECK(symbolize_sample(0.5, s) == 2);  // sample on a boundary goes right
    CHECK(symbolize_sample(0.25, s) == 1);
    CHECK(symbolize_sample(0.9, s) == 3);
    CHECK(symbolize_sample(-5.0, s) == 0);
    CHECK(symbolize_sample(5.0, s) == 3);
  }

  SUBCASE("non-finite sample rejected") {
    CHECK_THROWS_AS(symbolize_sample(std::nan(""), s), std::invalid_argument);
  }

  SUBCASE("MEP symbol frequencies are near uniform") {
    const int n = 10000;
    const auto channel = gaussian_channel(n, 5);
    const PartitionScheme mep = fit_partition(channel, 3, PartitionKind::mep);
    const SymbolSequence symbols = symbolize(channel, mep);
    std::vector<int> counts(3, 0);
    for (int sym : symbols) counts[static_cast<std::size_t>(sym)] += 1;
    for (int c : counts) {
      CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 3.0) < 1.0 / std::sqrt(n));
    }
  }
}

TEST_CASE("estimate_machine") {
  SUBCASE("independent streams give near-uniform rows") {
    Rng rng(3);
    const int n = 10000;
    SymbolSequence sa(n), sb(n);
    for (int t = 0; t < n; ++t) {
      sa[t] = static_cast<int>(rng.index(3));
      sb[t] = static_cast<int>(rng.index(3));
    }
    const XMarkovMachine m = estimate_machine(sa, sb, 3, 3, 1);
    REQUIRE(m.pi.rows() == 3);
    for (Eigen::Index i = 0; i < m.pi.rows(); ++i) {
      const double row_count = static_cast<double>(m.state_counts[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(std::abs(m.pi(i, j) - 1.0 / 3.0) < 3.0 / std::sqrt(row_count));
      }
    }
  }

  SUBCASE("deterministic copy gives an identity-like matrix") {
    Rng rng(4);
    const int n = 3000;
    SymbolSequence sa(n), sb(n);
    sa[0] = 0;
    sb[0] = 0;
    for (int t = 0; t + 1 < n; ++t) {
      sa[t + 1] = static_cast<int>(rng.index(3));
      sb[t + 1] = sa[t];
    }
    const XMarkovMachine m = estimate_machine(sa, sb, 3, 3, 1);
    for (Eigen::Index i = 0; i < m.pi.rows(); ++i) {
      CHECK(m.pi(i, m.state_ids[static_cast<std::size_t>(i)]) > 0.99);
    }
  }

  SUBCASE("raw counts match a brute-force bigram oracle; smoothing as specified") {
    // AR(1)-derived symbol stream against itself
    VarModel ar;
    ar.n = 1;
    ar.p = 1;
    ar.A = {Eigen::MatrixXd::Constant(1, 1, 0.7)};
    ar.noise_cov = Eigen::MatrixXd::Identity(1, 1);
    const SyntheticDataset ds = simulate_var(ar, 5000, 500, 12);
    const PartitionScheme s = fit_partition(ds.series.col(0), 3, PartitionKind::mep);
    const SymbolSequence sym = symbolize(ds.series.col(0), s);

    const XMarkovMachine m = estimate_machine(sym, sym, 3, 3, 1);

    Eigen::MatrixXd bigram = Eigen::MatrixXd::Zero(3, 3);
    for (std::size_t t = 0; t + 1 < sym.size(); ++t) bigram(sym[t], sym[t + 1]) += 1.0;
    REQUIRE(m.state_ids.size() == 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(m.counts(i, j) == bigram(i, j));
        CHECK(m.pi(i, j) == doctest::Approx((bigram(i, j) + 1.0) / (bigram.row(i).sum() + 3.0)));
      }
    }
  }

  SUBCASE("row stochasticity within 1e-9, retained states observed") {
    Rng rng(6);
    SymbolSequence sa(2000), sb(2000);
    for (int t = 0; t < 2000; ++t) {
      sa[t] = static_cast<int>(rng.index(3));
      sb[t] = static_cast<int>(rng.index(4));
    }
    for (int depth : {1, 2}) {
      const XMarkovMachine m = estimate_machine(sa, sb, 3, 4, depth);
      for (Eigen::Index i = 0; i < m.pi.rows(); ++i) {
        CHECK(std::abs(m.pi.row(i).sum() - 1.0) < 1e-9);
      }
      for (long c : m.state_counts) CHECK(c > 0);
    }
  }

  SUBCASE("too-short input rejected") {
    SymbolSequence sa(20, 0), sb(20, 0);
    CHECK_THROWS_AS((void)estimate_machine(sa, sb, 3, 3, 2), std::invalid_argument);
    sb.resize(19);
    CHECK_THROWS_AS((void)estimate_machine(sa, sb, 3, 3, 1), std::invalid_argument);
  }
}

TEST_CASE("compute_lambda") {
  SUBCASE("independent streams stay at the noise floor") {
    Rng rng(7);
    SymbolSequence sa(10000), sb(10000);
    for (int t = 0; t < 10000; ++t) {
      sa[t] = static_cast<int>(rng.index(3));
      sb[t] = static_cast<int>(rng.index(3));
    }
    CHECK(compute_lambda(estimate_machine(sa, sb, 3, 3, 1)) <= 0.05);
  }

  SUBCASE("deterministic copy saturates") {
    Rng rng(8);
    const int n = 10000;
    SymbolSequence sa(n), sb(n);
    sa[0] = 0;
    sb[0] = 0;
    for (int t = 0; t + 1 < n; ++t) {
      sa[t + 1] = static_cast<int>(rng.index(3));
      sb[t + 1] = sa[t];
    }
    CHECK(compute_lambda(estimate_machine(sa, sb, 3, 3, 1)) == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("lambda agrees with an independent plug-in MI oracle") {
    const auto modes = build_five_node_modes(11);
    const SyntheticDataset ds = simulate_var(modes[0].model, 4200, 1000, 9);
    const auto schemes = fit_partitions(ds.series, 3, PartitionKind::mep);
    std::vector<SymbolSequence> sym;
    for (int c = 0; c < 5; ++c) {
      sym.push_back(symbolize(ds.series.col(c), schemes[static_cast<std::size_t>(c)]));
    }

    // mode 1 has the edge 0->1 without its reverse
    const double l_fwd = compute_lambda(estimate_machine(sym[0], sym[1], 3, 3, 1));
    const double l_rev = compute_lambda(estimate_machine(sym[1], sym[0], 3, 3, 1));
    CHECK(l_fwd > l_rev);

    // oracle: plug-in MI between symbol-at-t and symbol-at-t+1, normalized
    std::vector<int> xs(sym[0].begin(), sym[0].end() - 1);
    std::vector<int> ys(sym[1].begin() + 1, sym[1].end());
    const double mi = mi_oracle(xs, ys, 3, 3);
    Eigen::VectorXd py = Eigen::VectorXd::Zero(3);
    for (int y : ys) py(y) += 1.0;
    py /= py.sum();
    double hy = 0;
    for (int j = 0; j < 3; ++j) hy -= py(j) * std::log(py(j));
    // smoothing keeps them from matching exactly; they must agree closely
    CHECK(l_fwd == doctest::Approx(mi / hy).epsilon(0.08));
  }

  SUBCASE("lambda is invariant to symbol relabeling") {
    Rng rng(10);
    const int n = 4000;
    SymbolSequence sa(n), sb(n);
    sa[0] = 0;
    sb[0] = 0;
    for (int t = 0; t + 1 < n; ++t) {
      sa[t + 1] = static_cast<int>(rng.index(3));
      sb[t + 1] = rng.bernoulli(0.8) ? sa[t] : static_cast<int>(rng.index(3));
    }
    const double base = compute_lambda(estimate_machine(sa, sb, 3, 3, 1));

    const int perm_a[3] = {2, 0, 1};
    const int perm_b[3] = {1, 2, 0};
    SymbolSequence pa(n), pb(n);
    for (int t = 0; t < n; ++t) {
      pa[t] = perm_a[sa[t]];
      pb[t] = perm_b[sb[t]];
    }
    const double permuted = compute_lambda(estimate_machine(pa, pb, 3, 3, 1));
    CHECK(base == doctest::Approx(permuted).epsilon(1e-12));
  }
}

TEST_CASE("extract_windows and binarize") {
  const auto modes = build_five_node_modes(11);
  const SyntheticDataset ds = simulate_var(modes[0].model, 1000, 500, 13);
  const auto schemes = fit_partitions(ds.series, 3, PartitionKind::mep);

  SUBCASE("window count formula") {
    StpnConfig cfg;
    cfg.window = 200;
    cfg.stride = 100;
    CHECK(extract_windows(ds.series, schemes, cfg).size() == 9);
    cfg.stride = 200;
    CHECK(extract_windows(ds.series, schemes, cfg).size() == 5);  // non-overlapping
  }

  SUBCASE("lambda values are finite and inside [0,1]") {
    StpnConfig cfg;
    for (const auto& g : extract_windows(ds.series, schemes, cfg)) {
      CHECK(g.lambda.allFinite());
      CHECK(g.lambda.minCoeff() >= 0.0);
      CHECK(g.lambda.maxCoeff() <= 1.0);
    }
  }

  SUBCASE("true edges dominate non-edges on nominal data") {
    const SyntheticDataset big = simulate_var(modes[0].model, 6000, 1000, 14);
    const auto big_schemes = fit_partitions(big.series, 3, PartitionKind::mep);
    StpnConfig cfg;
    double edge_sum = 0, non_edge_sum = 0;
    long edge_n = 0, non_edge_n = 0;
    for (const auto& g : extract_windows(big.series, big_schemes, cfg)) {
      for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
          if (a == b) continue;  // cross patterns only
          if (modes[0].has_edge({a, b})) {
            edge_sum += g.lambda(a, b);
            ++edge_n;
          } else {
            non_edge_sum += g.lambda(a, b);
            ++non_edge_n;
          }
        }
      }
    }
    CHECK(edge_sum / static_cast<double>(edge_n) >
          non_edge_sum / static_cast<double>(non_edge_n));
  }

  SUBCASE("binarize applies the >= convention") {
    PatternGraph g;
    g.lambda = Eigen::MatrixXd::Zero(2, 2);
    g.lambda << 0.0, 0.1, 0.2, 0.3;
    Eigen::MatrixXd thr = Eigen::MatrixXd::Constant(2, 2, 0.1);
    const BinaryPatternVector v = binarize(g, thr);
    CHECK(v.bits == std::vector<std::uint8_t>{0, 1, 1, 1});  // equality counts as 1

    thr = Eigen::MatrixXd::Constant(2, 2, 0.5);
    CHECK(binarize(g, thr).bits == std::vector<std::uint8_t>{0, 0, 0, 0});
  }

  SUBCASE("windowed transition counts tile the whole series exactly") {
    // per-window counts + boundary-crossing transitions == whole-series counts
    const int window = 250;
    const int t_len = 1000;
    const SymbolSequence sym = symbolize(ds.series.col(0), schemes[0]);
    const int depth = 1;

    Eigen::MatrixXd whole = Eigen::MatrixXd::Zero(3, 3);
    for (int t = depth - 1; t + 1 < t_len; ++t) whole(sym[t], sym[t + 1]) += 1.0;

    Eigen::MatrixXd tiled = Eigen::MatrixXd::Zero(3, 3);
    for (int start = 0; start < t_len; start += window) {
      SymbolSequence part(sym.begin() + start, sym.begin() + start + window);
      const XMarkovMachine m = estimate_machine(part, part, 3, 3, depth);
      for (Eigen::Index i = 0; i < m.counts.rows(); ++i) {
        tiled.row(m.state_ids[static_cast<std::size_t>(i)]) += m.counts.row(i);
      }
    }
    for (int start = window; start < t_len; start += window) {
      // transitions whose state word ends in the previous window
      for (int t = start - depth; t < start; ++t) tiled(sym[t], sym[t + 1]) += 1.0;
    }
    CHECK(tiled == whole);
  }
}

TEST_CASE("fit_thresholds") {
  SUBCASE("bimodal pattern splits at the midpoint, degenerate falls back") {
    std::vector<PatternGraph> graphs;
    for (int w = 0; w < 40; ++w) {
      PatternGraph g;
      g.lambda = Eigen::MatrixXd::Zero(2, 2);
      g.lambda(0, 0) = w < 20 ? 0.02 : 0.5;  // bimodal
      g.lambda(0, 1) = 0.3;                  // constant: degenerate split
      g.lambda(1, 0) = 0.02 + 0.0001 * w;    // nearly constant
      g.lambda(1, 1) = w < 20 ? 0.2 : 0.4;   // separated by 0.2
      graphs.push_back(g);
    }
    const Eigen::MatrixXd thr = fit_thresholds(graphs, 0.1, 0.05);
    CHECK(thr(0, 0) == doctest::Approx(0.26).epsilon(0.01));
    CHECK(thr(0, 1) == 0.1);
    CHECK(thr(1, 0) == 0.1);
    CHECK(thr(1, 1) == doctest::Approx(0.3).epsilon(0.01));
  }
}
