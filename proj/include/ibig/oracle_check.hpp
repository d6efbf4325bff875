#pragma once
// Randomized comparison of the hierarchical engine against the exact
// power-set oracle, driven by a KB's own items.

#include <cstdint>
#include <functional>
#include <random>

#include "ibig/belief.hpp"
#include "ibig/evidence.hpp"
#include "ibig/kb.hpp"
#include "ibig/oracle.hpp"

namespace ibig {

inline std::uint32_t to_mask(const LeafSet& s) {
  std::uint32_t m = 0;
  for (auto i = s.find_first(); i != LeafSet::npos; i = s.find_next(i)) m |= 1u << i;
  return m;
}

// Uniform in [0, 1) from the raw 64-bit stream, identical on every platform.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

using BeliefEngine = std::function<BeliefState(const NodeMasses&, const HierarchyModel&)>;

struct OracleCheckSummary {
  int trials = 0;
  long comparisons = 0;
  double step1_deviation = 0.0;      // max |closed form - iterated oracle|
  double exactness_deviation = 0.0;  // max |engine - oracle| over nodes, theta and off-tree mass

  bool passed(double tolerance = oracle_tolerance) const {
    return step1_deviation <= tolerance && exactness_deviation <= tolerance;
  }
};

// Max |engine - oracle| for one hierarchy's confirming-only evidence.
inline double confirming_exactness_deviation(const EvidenceInput& ev, const HierarchyModel& h, const BeliefEngine& engine,
                                             int leaf_limit = default_oracle_leaf_limit) {
  const int width = static_cast<int>(h.leaves().size());
  std::vector<OracleAssignment> supports{OracleAssignment::vacuous(width)};
  for (int n = 1; n < h.size(); ++n)
    for (const auto& e : ev.nodes[n].confirming)
      supports.push_back(OracleAssignment::simple_support(width, to_mask(h.node(n).subset), e.mass));
  const OracleAssignment exact = oracle_combine(supports, leaf_limit);

  NodeMasses masses = step1_node_masses(ev, h);
  std::fill(masses.disconfirm.begin(), masses.disconfirm.end(), 0.0);
  const BeliefState state = engine(masses, h);

  double dev = 0.0;
  double on_tree = 0.0;
  for (int n = 0; n < h.size(); ++n) {
    const double m = exact[to_mask(h.node(n).subset)];
    on_tree += m;
    dev = std::max(dev, std::abs(state.mass[n] - m));
  }
  double total = 0.0;
  for (const auto& [focus, m] : exact.masses) total += m;
  return std::max(dev, std::abs(total - on_tree));
}

inline OracleCheckSummary run_oracle_check(const Model& model, int trials, std::uint64_t seed,
                                           int leaf_limit = default_oracle_leaf_limit,
                                           BeliefEngine engine = [](const NodeMasses& m, const HierarchyModel& h) {
                                             return compute_belief_state(m, h);
                                           }) {
  for (const auto& h : model.hierarchies())
    if (static_cast<int>(h.leaves().size()) > leaf_limit)
      throw SizeError("frame '" + h.id() + "' has " + std::to_string(h.leaves().size()) + " leaves, oracle limit is " +
                      std::to_string(leaf_limit));

  OracleCheckSummary summary;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    AnswerSet answers(model.item_count());
    for (auto& a : answers)
      if (unit_draw(rng) < 0.5) a = AnswerValue::present;

    for (int hi = 0; hi < model.hierarchy_count(); ++hi) {
      const auto& h = model.hierarchy(hi);
      const int width = static_cast<int>(h.leaves().size());
      const EvidenceInput ev = evidence_for(model, answers, hi);

      for (int n = 1; n < h.size(); ++n) {
        const auto& list = ev.nodes[n].confirming;
        if (list.empty()) continue;
        const std::uint32_t focus = to_mask(h.node(n).subset);
        std::vector<OracleAssignment> same;
        for (const auto& e : list) same.push_back(OracleAssignment::simple_support(width, focus, e.mass));
        const double exact = oracle_combine(same, leaf_limit)[focus];
        summary.step1_deviation = std::max(summary.step1_deviation, std::abs(combine_same_focus(list) - exact));
        ++summary.comparisons;
      }

      summary.exactness_deviation =
          std::max(summary.exactness_deviation, confirming_exactness_deviation(ev, h, engine, leaf_limit));
      ++summary.comparisons;
    }
    ++summary.trials;
  }
  return summary;
}

}  // namespace ibig
