#include <doctest.h>

#include <Eigen/Dense>
#include <set>

#include "stpnrca/rng.hpp"
#include "stpnrca/synthgen.hpp"
#include "stpnrca/var_baseline.hpp"

using namespace stpnrca;

namespace {

VarModel scalar_ar1(double a, double noise_var) {
  VarModel m;
  m.n = 1;
  m.p = 1;
  m.A = {Eigen::MatrixXd::Constant(1, 1, a)};
  m.noise_cov = Eigen::MatrixXd::Constant(1, 1, noise_var);
  return m;
}

}  // namespace

TEST_CASE("companion spectral radius") {
  SUBCASE("zero dynamics gives radius 0") {
    VarModel m;
    m.n = 3;
    m.p = 2;
    m.A = {Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)};
    m.noise_cov = Eigen::MatrixXd::Identity(3, 3);
    CHECK(check_stationarity(m) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("scalar AR(1) radius equals |a|") {
    CHECK(check_stationarity(scalar_ar1(0.5, 1.0)) == doctest::Approx(0.5));
    CHECK(check_stationarity(scalar_ar1(-0.8, 1.0)) == doctest::Approx(0.8));
  }
  SUBCASE("random stable 30-node recipe stays strictly stationary") {
    const GraphMode mode = build_thirty_node_mode(123);
    const double radius = check_stationarity(mode.model);
    CHECK(radius < 1.0);
    CHECK(radius <= 0.9 + 1e-9);
  }
}

TEST_CASE("simulate_var") {
  SUBCASE("zero dynamics and zero noise give the all-zero series") {
    VarModel m;
    m.n = 2;
    m.p = 1;
    m.A = {Eigen::MatrixXd::Zero(2, 2)};
    m.noise_cov = Eigen::MatrixXd::Zero(2, 2);
    const SyntheticDataset ds = simulate_var(m, 50, 10, 42);
    CHECK(ds.series.rows() == 50);
    CHECK(ds.series.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("AR(1) long-run sample variance matches the analytic value") {
    // var = sigma^2 / (1 - a^2) = 1 / 0.75
    const SyntheticDataset ds = simulate_var(scalar_ar1(0.5, 1.0), 100000, 1000, 7);
    const double mean = ds.series.col(0).mean();
    const double var = (ds.series.col(0).array() - mean).square().mean();
    CHECK(var == doctest::Approx(1.0 / 0.75).epsilon(0.05));
  }

  SUBCASE("same seed reproduces bit-identical data, different seed does not") {
    const VarModel m = build_five_node_modes(3).front().model;
    const SyntheticDataset a = simulate_var(m, 500, 100, 9);
    const SyntheticDataset b = simulate_var(m, 500, 100, 9);
    const SyntheticDataset c = simulate_var(m, 500, 100, 10);
    CHECK(a.series == b.series);
    CHECK(a.series != c.series);
  }

  SUBCASE("non-stationary model is rejected with the radius in the message") {
    VarModel m = scalar_ar1(1.2, 1.0);
    CHECK_THROWS_WITH_AS(simulate_var(m, 10, 0, 1),
                         doctest::Contains("spectral radius"), std::invalid_argument);
  }

  SUBCASE("six five-node modes produce six datasets") {
    const auto modes = build_five_node_modes(11);
    REQUIRE(modes.size() == 6);
    std::set<std::string> ids;
    for (const auto& mode : modes) {
      const SyntheticDataset ds = simulate_var(mode.model, 300, 100, 1);
      CHECK(ds.series.rows() == 300);
      CHECK(ds.series.allFinite());
      ids.insert(mode.mode_id);
    }
    CHECK(ids.size() == 6);
  }
}

TEST_CASE("make_pattern_anomaly") {
  const auto modes = build_five_node_modes(11);
  const GraphMode& mode = modes.front();

  SUBCASE("empty break set leaves the model identical") {
    const VarModel broken = make_pattern_anomaly(mode, {});
    for (int k = 0; k < mode.model.p; ++k) {
      CHECK(broken.A[k] == mode.model.A[k]);
    }
  }

  SUBCASE("breaking one edge zeroes exactly those coefficients") {
    Edge target{-1, -1};
    for (const Edge& e : mode.edges) {
      if (e.from != e.to) {
        target = e;
        break;
      }
    }
    const VarModel broken = make_pattern_anomaly(mode, {target});
    for (int k = 0; k < mode.model.p; ++k) {
      for (int i = 0; i < mode.model.n; ++i) {
        for (int j = 0; j < mode.model.n; ++j) {
          if (i == target.to && j == target.from) {
            CHECK(broken.A[k](i, j) == 0.0);
          } else {
            // bitwise unchanged off the broken edge
            CHECK(broken.A[k](i, j) == mode.model.A[k](i, j));
          }
        }
      }
    }
  }

  SUBCASE("non-edge pattern is rejected") {
    Edge missing{-1, -1};
    for (int a = 0; a < 5 && missing.from < 0; ++a) {
      for (int b = 0; b < 5; ++b) {
        if (a != b && !mode.has_edge({a, b})) {
          missing = {a, b};
          break;
        }
      }
    }
    REQUIRE(missing.from >= 0);
    CHECK_THROWS_AS((void)make_pattern_anomaly(mode, {missing}), std::invalid_argument);
  }

  SUBCASE("the 30-case suite has the 5/10/10/5 size distribution") {
    const auto suite = build_pattern_case_suite(modes, 99);
    REQUIRE(suite.size() == 30);
    int by_size[5] = {0, 0, 0, 0, 0};
    for (const auto& pc : suite) {
      REQUIRE(pc.broken.size() >= 1);
      REQUIRE(pc.broken.size() <= 4);
      by_size[pc.broken.size()] += 1;
      const GraphMode& m = modes[static_cast<std::size_t>(pc.mode_index)];
      for (const Edge& e : pc.broken) {
        CHECK(m.has_edge(e));
        CHECK(e.from != e.to);
      }
    }
    CHECK(by_size[1] == 5);
    CHECK(by_size[2] == 10);
    CHECK(by_size[3] == 10);
    CHECK(by_size[4] == 5);
  }
}

TEST_CASE("make_node_delay_anomaly") {
  const auto modes = build_five_node_modes(11);
  const SyntheticDataset base = simulate_var(modes[0].model, 400, 200, 5);

  SUBCASE("faulty channel equals the original shifted by delay") {
    const int delay = 20;
    const int node = 2;
    const SyntheticDataset delayed = make_node_delay_anomaly(base, node, delay);
    REQUIRE(delayed.series.rows() == 400 - delay);
    CHECK(delayed.truth.fault_node == node);
    for (int t = delay; t < 400 - delay; ++t) {
      CHECK(delayed.series(t, node) == base.series(t - delay, node));
    }
    for (int c = 0; c < 5; ++c) {
      if (c == node) continue;
      for (int t = 0; t < 400 - delay; ++t) {
        CHECK(delayed.series(t, c) == base.series(t, c));
      }
    }
    // head of the shifted channel is the burn-in continuation, not zeros
    double head_energy = 0;
    for (int t = 0; t < delay; ++t) head_energy += std::abs(delayed.series(t, node));
    CHECK(head_energy > 0.0);
  }

  SUBCASE("delay bounds are enforced") {
    CHECK_THROWS_AS((void)make_node_delay_anomaly(base, 0, 400), std::invalid_argument);
    CHECK_THROWS_AS((void)make_node_delay_anomaly(base, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_node_delay_anomaly(base, 7, 10), std::invalid_argument);
  }

  SUBCASE("delaying a node severs recovered cross-causality around it") {
    // VAR-recovered graph loses edges into/out of the delayed node
    const GraphMode& mode = modes[0];
    const SyntheticDataset nominal = simulate_var(mode.model, 8000, 1000, 31);
    const SyntheticDataset faulted =
        make_node_delay_anomaly(simulate_var(mode.model, 8050, 1000, 32), 2, 50);

    const VarFit fit_nom = fit_var(nominal.series, 2);
    const VarFit fit_ano = fit_var(faulted.series, 2);
    double incident_nom = 0, incident_ano = 0;
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 5; ++j) {
        if (j == 2) continue;
        incident_nom += std::abs(fit_nom.A[k](2, j)) + std::abs(fit_nom.A[k](j, 2));
        incident_ano += std::abs(fit_ano.A[k](2, j)) + std::abs(fit_ano.A[k](j, 2));
      }
    }
    CHECK(incident_ano < 0.35 * incident_nom);
  }
}

TEST_CASE("recipe properties") {
  const auto modes = build_five_node_modes(11);

  SUBCASE("every shipped mode is comfortably stationary") {
    for (const auto& mode : modes) CHECK(check_stationarity(mode.model) <= 0.9 + 1e-9);
  }

  SUBCASE("every edge has a nonzero coefficient at some lag") {
    for (const auto& mode : modes) {
      for (const Edge& e : mode.edges) {
        double mag = 0;
        for (const auto& a : mode.model.A) mag += std::abs(a(e.to, e.from));
        CHECK(mag > 0.0);
      }
    }
  }

  SUBCASE("non-edges carry zero coefficients") {
    for (const auto& mode : modes) {
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          if (!mode.has_edge({j, i})) {
            for (const auto& a : mode.model.A) CHECK(a(i, j) == 0.0);
          }
        }
      }
    }
  }

  SUBCASE("fitting a VAR to generated data recovers the coefficients") {
    const GraphMode& mode = modes[1];
    const SyntheticDataset ds = simulate_var(mode.model, 20000, 1000, 77);
    const VarFit fit = fit_var(ds.series, 2);
    double max_err = 0;
    for (int k = 0; k < 2; ++k) {
      max_err = std::max(max_err, (fit.A[k] - mode.model.A[k]).cwiseAbs().maxCoeff());
    }
    CHECK(max_err < 0.1);
  }

  SUBCASE("30-node recipe has the requested out-degree") {
    const GraphMode mode = build_thirty_node_mode(5, 2);
    CHECK(mode.model.n == 30);
    CHECK(mode.model.p == 1);
    std::vector<int> out_degree(30, 0);
    for (const Edge& e : mode.edges) {
      if (e.from != e.to) out_degree[static_cast<std::size_t>(e.from)] += 1;
    }
    for (int d : out_degree) CHECK(d == 2);
  }
}
