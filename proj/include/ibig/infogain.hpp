#pragma once
// Information increments: how far each node's current mass could move if
// the still-unasked data items were resolved. The increment caused by the
// potential of node X_j is allocated to X_j; the node with the largest
// total decides what is asked next.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ibig/belief.hpp"
#include "ibig/evidence.hpp"
#include "ibig/kb.hpp"

namespace ibig {

// Potential masses of one hierarchy, from unasked items only.
struct PotentialMasses {
  std::vector<double> confirm;
  std::vector<double> disconfirm;

  explicit PotentialMasses(int node_count = 0) : confirm(node_count, 0.0), disconfirm(node_count, 0.0) {}
};

inline std::vector<PotentialMasses> potential_masses(const Model& model, const AnswerSet& answers) {
  std::vector<PotentialMasses> out;
  for (int h = 0; h < model.hierarchy_count(); ++h) {
    const auto& hm = model.hierarchy(h);
    PotentialMasses p(hm.size());
    for (int n = 0; n < hm.size(); ++n) {
      double keep_c = 1.0, keep_d = 1.0;
      for (const auto& ref : model.targets_at(h, n)) {
        if (answers[ref.item]) continue;
        (ref.polarity == Polarity::confirm ? keep_c : keep_d) *= 1.0 - ref.mass;
      }
      p.confirm[n] = 1.0 - keep_c;
      p.disconfirm[n] = 1.0 - keep_d;
    }
    out.push_back(std::move(p));
  }
  return out;
}

enum class Equation { wFC, SIN, IFN, SN, NC, bootstrap };

inline const char* to_string(Equation e) {
  switch (e) {
    case Equation::wFC: return "wFC";
    case Equation::SIN: return "SIN";
    case Equation::IFN: return "IFN";
    case Equation::SN: return "SN";
    case Equation::NC: return "NC";
    case Equation::bootstrap: return "bootstrap";
  }
  return "?";
}

// Everything the equations read for one hierarchy.
struct IncrementInputs {
  const HierarchyModel& hierarchy;
  const BeliefState& state;
  const NodeMasses& observed;
  const PotentialMasses& potentials;
  EngineConfig config;
};

namespace detail {

inline bool evidence_bearing(const IncrementInputs& in, int i) { return i > 0 && in.state.mass[i] > 0.0; }

inline bool union_in_tree(const HierarchyModel& h, int a, int b) { return a > 0 && h.node(a).complement == b; }

// big strictly contains small and big minus small is a tree node.
inline bool remainder_in_tree(const HierarchyModel& h, int big, int small) {
  return small > 0 && h.node(small).parent == big && h.node(small).complement >= 0;
}

}  // namespace detail

// Full belief state if the confirming potentials of `hatted` were all
// realized: m'_xj = 1 - (1 - m_xj)(1 - pot_j), then steps 2 and 3.
inline BeliefState hypothetical_confirm(const IncrementInputs& in, std::span<const int> hatted) {
  NodeMasses m = in.observed;
  for (int j : hatted) m.confirm[j] = 1.0 - (1.0 - m.confirm[j]) * (1.0 - in.potentials.confirm[j]);
  return compute_belief_state(m, in.hierarchy);
}

inline BeliefState hypothetical_confirm(const IncrementInputs& in, int j) {
  return hypothetical_confirm(in, std::span<const int>(&j, 1));
}

// Current state combined with the complement-focused potential of X_j.
inline BeliefState hypothetical_disconfirm(const IncrementInputs& in, int j) {
  BeliefState s = in.state;
  combine_complement(s, in.hierarchy, j, in.potentials.disconfirm[j]);
  return s;
}

// Per-pair equations. Structural and potential preconditions give 0; the
// evidence-bearing condition on X_i is applied by hierarchy_increments.

// Eq. wFC: X_j not containing X_i gains its confirming potential.
inline double increment_wfc(const IncrementInputs& in, int i, int j) {
  if (i <= 0 || j <= 0 || j == i || in.hierarchy.contains(j, i)) return 0.0;
  if (!(in.potentials.confirm[j] > 0.0)) return 0.0;
  return std::abs(in.state.mass[i] - hypothetical_confirm(in, j).mass[i]);
}

// Eq. SIN: binary sibling X_j gains non-confirming potential.
inline double increment_sin(const IncrementInputs& in, int i, int j) {
  if (!detail::union_in_tree(in.hierarchy, i, j)) return 0.0;
  if (!(in.potentials.disconfirm[j] > 0.0)) return 0.0;
  return std::abs(in.state.mass[i] - hypothetical_disconfirm(in, j).mass[i]);
}

// Eq. IFN: X_i itself or an ancestor gains non-confirming potential.
inline double increment_ifn(const IncrementInputs& in, int i, int j) {
  if (i <= 0 || j <= 0 || !in.hierarchy.contains(j, i)) return 0.0;
  if (!(in.potentials.disconfirm[j] > 0.0)) return 0.0;
  return std::abs(in.state.mass[i] - hypothetical_disconfirm(in, j).mass[i]);
}

// Eq. SN: a son X_j of X_i, whose sibling completes X_i, gains
// non-confirming potential. Default reads the superset's own mass;
// eq4_literal uses m_T(X_j) as printed.
inline double increment_sn(const IncrementInputs& in, int i, int j) {
  if (!detail::remainder_in_tree(in.hierarchy, i, j)) return 0.0;
  const double c = in.potentials.disconfirm[j];
  if (!(c > 0.0)) return 0.0;
  const BeliefState hyp = hypothetical_disconfirm(in, j);
  if (in.config.eq4_literal) return std::abs(in.state.mass[i] - hyp.history.back().k * in.state.mass[j] * (1.0 - c));
  return std::abs(in.state.mass[i] - hyp.mass[i]);
}

// Eq. NC: X_i still has confirming potential of its own.
inline double increment_nc(const IncrementInputs& in, int i) {
  if (i <= 0 || !(in.potentials.confirm[i] > 0.0)) return 0.0;
  return std::abs(in.state.mass[i] - hypothetical_confirm(in, i).mass[i]);
}

struct Contribution {
  int source = 0;  // the evidence-bearing node X_i
  Equation equation = Equation::wFC;
  double value = 0.0;
};

struct NodeIncrement {
  double total = 0.0;
  std::vector<Contribution> contributions;
};

struct IncrementTable {
  std::vector<std::vector<NodeIncrement>> hierarchies;  // [hierarchy][node]

  double max() const {
    double m = 0.0;
    for (const auto& h : hierarchies)
      for (const auto& n : h) m = std::max(m, n.total);
    return m;
  }
};

namespace detail {

inline void finalize(const HierarchyModel& h, std::vector<NodeIncrement>& row) {
  for (auto& entry : row) {
    std::sort(entry.contributions.begin(), entry.contributions.end(), [&](const Contribution& a, const Contribution& b) {
      if (a.source != b.source) return h.node(a.source).id < h.node(b.source).id;
      return a.equation < b.equation;
    });
    entry.total = 0.0;
    for (const auto& c : entry.contributions) entry.total += c.value;
  }
}

}  // namespace detail

// Increments of one hierarchy. A hypothetical state is evaluated once per
// potential-carrying node X_j and read off for every evidence-bearing X_i.
inline std::vector<NodeIncrement> hierarchy_increments(const IncrementInputs& in) {
  const HierarchyModel& h = in.hierarchy;
  const int n = h.size();
  std::vector<NodeIncrement> row(n);
  std::vector<int> bearing;
  for (int i = 1; i < n; ++i)
    if (detail::evidence_bearing(in, i)) bearing.push_back(i);

  if (bearing.empty()) {
    // Cold start: rank by the mass each node would take on its own.
    for (int j = 1; j < n; ++j)
      if (in.potentials.confirm[j] > 0.0)
        row[j].contributions.push_back({j, Equation::bootstrap, hypothetical_confirm(in, j).mass[j]});
    detail::finalize(h, row);
    return row;
  }

  const auto& m = in.state.mass;
  for (int j = 1; j < n; ++j) {
    if (!(in.potentials.confirm[j] > 0.0)) continue;
    const BeliefState hyp = hypothetical_confirm(in, j);
    for (int i : bearing) {
      if (i == j) row[j].contributions.push_back({i, Equation::NC, std::abs(m[i] - hyp.mass[i])});
      else if (!in.config.eq1_joint && !h.contains(j, i))
        row[j].contributions.push_back({i, Equation::wFC, std::abs(m[i] - hyp.mass[i])});
    }
  }

  if (in.config.eq1_joint) {
    for (int i : bearing) {
      std::vector<int> hatted;
      double weight = 0.0;
      for (int j = 1; j < n; ++j) {
        if (j != i && !h.contains(j, i) && in.potentials.confirm[j] > 0.0) {
          hatted.push_back(j);
          weight += in.potentials.confirm[j];
        }
      }
      if (hatted.empty()) continue;
      const double value = std::abs(m[i] - hypothetical_confirm(in, hatted).mass[i]);
      for (int j : hatted) row[j].contributions.push_back({i, Equation::wFC, value * in.potentials.confirm[j] / weight});
    }
  }

  for (int j = 1; j < n; ++j) {
    const double c = in.potentials.disconfirm[j];
    if (!(c > 0.0)) continue;
    const BeliefState hyp = hypothetical_disconfirm(in, j);
    const double k = hyp.history.back().k;
    for (int i : bearing) {
      if (h.contains(j, i)) {
        row[j].contributions.push_back({i, Equation::IFN, std::abs(m[i] - hyp.mass[i])});
      } else if (detail::union_in_tree(h, i, j)) {
        row[j].contributions.push_back({i, Equation::SIN, std::abs(m[i] - hyp.mass[i])});
      } else if (detail::remainder_in_tree(h, i, j)) {
        const double target = in.config.eq4_literal ? k * m[j] * (1.0 - c) : hyp.mass[i];
        row[j].contributions.push_back({i, Equation::SN, std::abs(m[i] - target)});
      }
    }
  }
  detail::finalize(h, row);
  return row;
}

struct HierarchyEvaluation {
  BeliefState state;
  NodeMasses observed;
  PotentialMasses potentials;
};

inline IncrementTable build_increment_table(const Model& model, const std::vector<HierarchyEvaluation>& evals,
                                            const EngineConfig& config) {
  IncrementTable table;
  for (int h = 0; h < model.hierarchy_count(); ++h) {
    const auto& e = evals[h];
    table.hierarchies.push_back(hierarchy_increments({model.hierarchy(h), e.state, e.observed, e.potentials, config}));
  }
  return table;
}

struct Selection {
  int hierarchy = 0;
  int node = 0;
  double increment = 0.0;
};

// Global argmax; none when the best total is below epsilon_stop (or zero).
// Ties go to the lexicographically smaller (hierarchy id, node id).
inline std::optional<Selection> select_next(const Model& model, const IncrementTable& table, double epsilon_stop) {
  std::optional<Selection> best;
  for (int h = 0; h < static_cast<int>(table.hierarchies.size()); ++h) {
    const auto& row = table.hierarchies[h];
    for (int n = 1; n < static_cast<int>(row.size()); ++n) {
      const double v = row[n].total;
      if (!(v > 0.0) || v < epsilon_stop) continue;
      if (!best || v > best->increment) {
        best = Selection{h, n, v};
        continue;
      }
      if (v < best->increment) continue;
      const auto& bh = model.hierarchy(best->hierarchy).id();
      const auto& ch = model.hierarchy(h).id();
      if (ch < bh || (ch == bh && model.hierarchy(h).node(n).id < model.hierarchy(best->hierarchy).node(best->node).id))
        best = Selection{h, n, v};
    }
  }
  return best;
}

}  // namespace ibig
