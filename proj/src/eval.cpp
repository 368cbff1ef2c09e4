#include "stpnrca/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stpnrca {

double alpha1(const std::vector<std::vector<std::uint8_t>>& truth,
              const std::vector<std::vector<std::uint8_t>>& predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw std::invalid_argument("alpha1: window count mismatch or empty");
  }
  long match = 0;
  long total = 0;
  for (std::size_t w = 0; w < truth.size(); ++w) {
    if (truth[w].size() != predicted[w].size()) {
      throw std::invalid_argument("alpha1: pattern count mismatch");
    }
    for (std::size_t j = 0; j < truth[w].size(); ++j) {
      match += (truth[w][j] != 0) == (predicted[w][j] != 0);
      ++total;
    }
  }
  return static_cast<double>(match) / static_cast<double>(total);
}

double alpha2(const std::vector<std::vector<int>>& truth_sets,
              const std::vector<std::vector<int>>& predicted_sets) {
  if (truth_sets.size() != predicted_sets.size() || truth_sets.empty()) {
    throw std::invalid_argument("alpha2: sample count mismatch or empty");
  }
  long hits = 0;
  for (std::size_t i = 0; i < truth_sets.size(); ++i) {
    const std::set<int> pred(predicted_sets[i].begin(), predicted_sets[i].end());
    bool contained = true;
    for (int t : truth_sets[i]) {
      if (!pred.count(t)) {
        contained = false;
        break;
      }
    }
    hits += contained;
  }
  return static_cast<double>(hits) / static_cast<double>(truth_sets.size());
}

EpsilonCounts epsilon_node(const std::vector<int>& predicted, int fault_node, int n) {
  EpsilonCounts c;
  c.discovered = static_cast<long>(predicted.size());
  c.no_discovery = predicted.empty();
  for (int idx : predicted) {
    const Edge e = pattern_of_index(idx, n);
    if (e.from != fault_node && e.to != fault_node) ++c.incorrect;
  }
  return c;
}

EpsilonCounts epsilon_pattern(const std::vector<int>& predicted, const std::vector<int>& truth) {
  EpsilonCounts c;
  c.discovered = static_cast<long>(predicted.size());
  c.no_discovery = predicted.empty();
  const std::set<int> truth_set(truth.begin(), truth.end());
  for (int idx : predicted) {
    if (!truth_set.count(idx)) ++c.incorrect;
  }
  return c;
}

EpsilonCounts epsilon_total(const std::vector<EpsilonCounts>& per_case) {
  EpsilonCounts total;
  total.no_discovery = true;
  for (const EpsilonCounts& c : per_case) {
    total.discovered += c.discovered;
    total.incorrect += c.incorrect;
    total.no_discovery = total.no_discovery && c.no_discovery;
  }
  return total;
}

NodeAttribution attribute_node(const std::vector<FlipStep>& failed, int n) {
  if (failed.empty()) throw std::invalid_argument("attribute_node: empty failed-pattern set");

  std::vector<NodeScore> scores(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) scores[static_cast<std::size_t>(v)].node = v;
  for (const FlipStep& step : failed) {
    const Edge e = pattern_of_index(step.pattern, n);
    scores[static_cast<std::size_t>(e.from)].incident += 1;
    scores[static_cast<std::size_t>(e.from)].delta_sum += step.delta_f;
    if (e.to != e.from) {
      scores[static_cast<std::size_t>(e.to)].incident += 1;
      scores[static_cast<std::size_t>(e.to)].delta_sum += step.delta_f;
    }
  }
  std::sort(scores.begin(), scores.end(), [](const NodeScore& a, const NodeScore& b) {
    if (a.incident != b.incident) return a.incident > b.incident;
    if (a.delta_sum != b.delta_sum) return a.delta_sum > b.delta_sum;
    return a.node < b.node;
  });

  NodeAttribution out;
  out.ranking = std::move(scores);
  const int top = out.ranking.front().node;
  out.explains_all = true;
  for (const FlipStep& step : failed) {
    const Edge e = pattern_of_index(step.pattern, n);
    if (e.from != top && e.to != top) {
      out.explains_all = false;
      break;
    }
  }
  return out;
}

std::string render_table1(const std::vector<Table1Row>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "Approach" << std::right << std::setw(18)
     << "Training samples" << std::setw(18) << "Testing samples" << std::setw(14)
     << "alpha1 (%)" << std::setw(14) << "alpha2 (%)" << '\n';
  os << std::string(74, '-') << '\n';
  os << std::fixed << std::setprecision(2);
  for (const Table1Row& r : rows) {
    os << std::left << std::setw(10) << r.method << std::right << std::setw(18)
       << r.training_samples << std::setw(18) << r.testing_samples << std::setw(14)
       << 100.0 * r.alpha1;
    if (r.has_alpha2) {
      os << std::setw(14) << 100.0 * r.alpha2;
    } else {
      os << std::setw(14) << "-";
    }
    os << '\n';
  }
  return os.str();
}

std::string render_table2(const std::string& dataset_label, const std::vector<Table2Row>& rows) {
  std::ostringstream os;
  os << dataset_label << '\n';
  os << std::left << std::setw(10) << "Approach" << std::right << std::setw(14) << "discovered"
     << std::setw(12) << "incorrect" << std::setw(14) << "epsilon (%)" << '\n';
  os << std::string(50, '-') << '\n';
  os << std::fixed << std::setprecision(2);
  for (const Table2Row& r : rows) {
    os << std::left << std::setw(10) << r.method << std::right << std::setw(14)
       << r.counts.discovered << std::setw(12) << r.counts.incorrect << std::setw(14)
       << 100.0 * r.counts.ratio() << '\n';
  }
  return os.str();
}

HeatGrid make_heat_grid(int n, const std::vector<int>& truth_patterns,
                        const std::vector<int>& predicted_patterns) {
  HeatGrid grid;
  grid.n = n;
  grid.truth.assign(static_cast<std::size_t>(n * n), 0);
  grid.predicted.assign(static_cast<std::size_t>(n * n), 0);
  for (int idx : truth_patterns) grid.truth[static_cast<std::size_t>(idx)] = 1;
  for (int idx : predicted_patterns) grid.predicted[static_cast<std::size_t>(idx)] = 1;
  return grid;
}

}  // namespace stpnrca
