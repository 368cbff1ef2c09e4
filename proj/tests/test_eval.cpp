#include <doctest.h>

#include "stpnrca/eval.hpp"

using namespace stpnrca;

TEST_CASE("pattern index layout") {
  CHECK(pattern_index({0, 0}, 5) == 0);
  CHECK(pattern_index({1, 4}, 5) == 9);   // source-major
  CHECK(pattern_index({4, 1}, 5) == 21);
  const Edge e = pattern_of_index(9, 5);
  CHECK(e.from == 1);
  CHECK(e.to == 4);
}

TEST_CASE("alpha1") {
  SUBCASE("perfect prediction scores 1, complement scores 0") {
    const std::vector<std::vector<std::uint8_t>> truth = {{1, 0, 0, 1}, {0, 0, 1, 0}};
    CHECK(alpha1(truth, truth) == 1.0);
    std::vector<std::vector<std::uint8_t>> complement = truth;
    for (auto& row : complement) {
      for (auto& v : row) v = v ? 0 : 1;
    }
    CHECK(alpha1(truth, complement) == 0.0);
  }

  SUBCASE("partial match counts cells") {
    const std::vector<std::vector<std::uint8_t>> truth = {{1, 0, 0, 0}};
    const std::vector<std::vector<std::uint8_t>> pred = {{1, 1, 0, 0}};
    CHECK(alpha1(truth, pred) == doctest::Approx(0.75));
  }

  SUBCASE("shape mismatches rejected") {
    CHECK_THROWS_AS((void)alpha1({{1, 0}}, {{1, 0}, {0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)alpha1({{1, 0}}, {{1}}), std::invalid_argument);
  }
}

TEST_CASE("alpha2") {
  SUBCASE("supersets count, misses do not") {
    const std::vector<std::vector<int>> truth = {{1, 2}, {3}, {4}};
    const std::vector<std::vector<int>> pred = {{1, 2, 7}, {}, {4}};
    CHECK(alpha2(truth, pred) == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("empty prediction with non-empty truth scores 0") {
    CHECK(alpha2({{5}}, {{}}) == 0.0);
  }

  SUBCASE("empty truth is always contained") {
    CHECK(alpha2({{}}, {{}}) == 1.0);
    CHECK(alpha2({{}}, {{3, 4}}) == 1.0);
  }
}

TEST_CASE("epsilon") {
  SUBCASE("all predictions incident to the fault node score 0") {
    // node 1 in a 3-node grid: patterns touching node 1
    const std::vector<int> predicted = {pattern_index({1, 0}, 3), pattern_index({2, 1}, 3),
                                        pattern_index({1, 1}, 3)};
    const EpsilonCounts c = epsilon_node(predicted, 1, 3);
    CHECK(c.discovered == 3);
    CHECK(c.incorrect == 0);
    CHECK(c.ratio() == 0.0);
  }

  SUBCASE("non-incident predictions are counted as incorrect") {
    const std::vector<int> predicted = {pattern_index({0, 2}, 3), pattern_index({1, 0}, 3)};
    const EpsilonCounts c = epsilon_node(predicted, 1, 3);
    CHECK(c.discovered == 2);
    CHECK(c.incorrect == 1);
    CHECK(c.ratio() == doctest::Approx(0.5));
  }

  SUBCASE("empty prediction flags no_discovery and a zero ratio") {
    const EpsilonCounts c = epsilon_node({}, 0, 3);
    CHECK(c.no_discovery);
    CHECK(c.ratio() == 0.0);
  }

  SUBCASE("pattern-case variant compares against the truth set") {
    const std::vector<int> truth = {3, 7};
    const EpsilonCounts c = epsilon_pattern({3, 7, 8}, truth);
    CHECK(c.discovered == 3);
    CHECK(c.incorrect == 1);
  }

  SUBCASE("totals reproduce the published ratios") {
    // 13 discovered / 2 incorrect -> 15.38%; 653 / 18 -> 2.76%
    EpsilonCounts five_node;
    five_node.discovered = 13;
    five_node.incorrect = 2;
    CHECK(100.0 * five_node.ratio() == doctest::Approx(15.38).epsilon(0.001));
    EpsilonCounts thirty_node;
    thirty_node.discovered = 653;
    thirty_node.incorrect = 18;
    CHECK(100.0 * thirty_node.ratio() == doctest::Approx(2.76).epsilon(0.01));
  }

  SUBCASE("totals equal sums of per-case counts") {
    std::vector<EpsilonCounts> cases;
    cases.push_back({5, 1, false});
    cases.push_back({8, 1, false});
    const EpsilonCounts total = epsilon_total(cases);
    CHECK(total.discovered == 13);
    CHECK(total.incorrect == 2);
  }
}

TEST_CASE("attribute_node") {
  SUBCASE("hub node explains all failed patterns") {
    // failed set {1->2, 1->3, 4->1, 1->1} in 1-based labels
    const int n = 5;
    std::vector<FlipStep> failed = {{pattern_index({0, 1}, n), 1.0},
                                    {pattern_index({0, 2}, n), 0.8},
                                    {pattern_index({3, 0}, n), 0.6},
                                    {pattern_index({0, 0}, n), 0.4}};
    const NodeAttribution a = attribute_node(failed, n);
    CHECK(a.ranking.front().node == 0);
    CHECK(a.ranking.front().incident == 4);
    CHECK(a.explains_all);
  }

  SUBCASE("two-node tie breaks on summed flip importance") {
    const int n = 4;
    // single failed pattern 2->3 touches both nodes equally; add one pattern
    // that gives node 3 more importance mass
    std::vector<FlipStep> failed = {{pattern_index({2, 3}, n), 0.5}};
    const NodeAttribution tie = attribute_node(failed, n);
    CHECK(tie.ranking[0].incident == 1);
    CHECK(tie.ranking[1].incident == 1);
    CHECK(tie.ranking[0].node == 2);  // equal importance: lower node id first

    failed.push_back({pattern_index({3, 3}, n), 0.2});
    const NodeAttribution weighted = attribute_node(failed, n);
    CHECK(weighted.ranking.front().node == 3);
    CHECK(weighted.explains_all);
  }

  SUBCASE("self loop counts once") {
    const int n = 3;
    const NodeAttribution a = attribute_node({{pattern_index({1, 1}, n), 1.0}}, n);
    CHECK(a.ranking.front().node == 1);
    CHECK(a.ranking.front().incident == 1);
    CHECK(a.explains_all);
  }

  SUBCASE("empty failed set rejected") {
    CHECK_THROWS_AS((void)attribute_node({}, 3), std::invalid_argument);
  }

  SUBCASE("metrics are invariant under consistent node relabeling") {
    const int n = 4;
    std::vector<FlipStep> failed = {{pattern_index({0, 1}, n), 1.0},
                                    {pattern_index({2, 0}, n), 0.7}};
    const NodeAttribution base = attribute_node(failed, n);

    const auto perm = [](int v) { return (v + 2) % 4; };
    std::vector<FlipStep> relabeled;
    for (const FlipStep& s : failed) {
      const Edge e = pattern_of_index(s.pattern, n);
      relabeled.push_back({pattern_index({perm(e.from), perm(e.to)}, n), s.delta_f});
    }
    const NodeAttribution mapped = attribute_node(relabeled, n);
    CHECK(mapped.ranking.front().node == perm(base.ranking.front().node));
    CHECK(mapped.ranking.front().incident == base.ranking.front().incident);
  }
}

TEST_CASE("tables and heat grids") {
  SUBCASE("single perfect case renders full accuracy") {
    std::vector<Table1Row> rows = {{"S3", 100, 200, 1.0, 1.0, true}};
    const std::string table = render_table1(rows);
    CHECK(table.find("S3") != std::string::npos);
    CHECK(table.find("100.00") != std::string::npos);

    std::vector<Table2Row> t2 = {{"S3", {10, 0, false}}};
    const std::string table2 = render_table2("Dataset (5 nodes)", t2);
    CHECK(table2.find("0.00") != std::string::npos);
  }

  SUBCASE("heat grid marks truth and prediction masks") {
    const HeatGrid grid = make_heat_grid(3, {0, 4}, {4, 8});
    CHECK(grid.truth[0] == 1);
    CHECK(grid.truth[4] == 1);
    CHECK(grid.truth[8] == 0);
    CHECK(grid.predicted[4] == 1);
    CHECK(grid.predicted[8] == 1);
  }
}
