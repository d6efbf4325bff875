#pragma once
// Hierarchical evidence combination (Gordon-Shortliffe approximation of
// Dempster's rule on a strict hierarchy):
//   step 1  same-focus combination per node, confirming and non-confirming;
//   step 2  aggregation of all confirming masses over the tree;
//   step 3  sequential combination of each complement-focused mass.
// Masses are indexed by node; index 0 is the root and holds m_T(theta).

#include <span>
#include <string>
#include <vector>

#include "ibig/common.hpp"
#include "ibig/kb.hpp"

namespace ibig {

struct MassEntry {
  double mass = 0.0;
  std::string item;  // provenance
};

struct NodeEvidence {
  std::vector<MassEntry> confirming;
  std::vector<MassEntry> disconfirming;
};

// Observed evidence for one hierarchy, one entry per node.
struct EvidenceInput {
  std::vector<NodeEvidence> nodes;

  explicit EvidenceInput(int node_count = 0) : nodes(node_count) {}
};

struct NodeMasses {
  std::vector<double> confirm;     // m_xi, focused on X_i
  std::vector<double> disconfirm;  // m_xi^c, focused on the complement of X_i

  explicit NodeMasses(int node_count = 0) : confirm(node_count, 0.0), disconfirm(node_count, 0.0) {}
};

struct Normalization {
  enum class Stage { confirm, disconfirm };
  Stage stage = Stage::confirm;
  int node = -1;  // the complement-focused node for Stage::disconfirm
  double k = 1.0;
};

struct BeliefState {
  std::vector<double> mass;  // m_T over T plus theta at index 0
  std::vector<Normalization> history;

  double sum() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
};

inline BeliefState vacuous_state(const HierarchyModel& h) {
  BeliefState s;
  s.mass.assign(h.size(), 0.0);
  s.mass[0] = 1.0;
  return s;
}

// 1 - prod(1 - m_j); an empty list gives 0.
inline double combine_same_focus(std::span<const double> masses) {
  double rest = 1.0;
  for (double m : masses) {
    if (!in_open_unit_interval(m)) throw DomainError("mass " + format_number(m) + " outside (0, 1)");
    rest *= 1.0 - m;
  }
  return 1.0 - rest;
}

inline double combine_same_focus(std::initializer_list<double> masses) {
  return combine_same_focus(std::span<const double>(masses.begin(), masses.size()));
}

inline double combine_same_focus(const std::vector<MassEntry>& entries) {
  std::vector<double> m;
  m.reserve(entries.size());
  for (const auto& e : entries) m.push_back(e.mass);
  return combine_same_focus(std::span<const double>(m));
}

inline NodeMasses step1_node_masses(const EvidenceInput& evidence, const HierarchyModel& h) {
  if (static_cast<int>(evidence.nodes.size()) != h.size())
    throw DomainError("evidence does not match hierarchy '" + h.id() + "'");
  NodeMasses out(h.size());
  for (int i = 0; i < h.size(); ++i) {
    out.confirm[i] = combine_same_focus(evidence.nodes[i].confirming);
    out.disconfirm[i] = combine_same_focus(evidence.nodes[i].disconfirming);
  }
  return out;
}

// Unnormalized m(X_i) = m_xi * prod over X_j not containing X_i of (1 - m_xj),
// m(theta) = prod over all X_j of (1 - m_xj). The non-superset product is
// assembled from subtree products so no factor is ever divided out.
inline BeliefState step2_aggregate_confirming(const NodeMasses& masses, const HierarchyModel& h) {
  const int n = h.size();
  std::vector<double> keep(n, 1.0);  // (1 - m_xj), 1 for the root
  for (int i = 1; i < n; ++i) {
    // Combined masses can round to exactly 1 after many strong items.
    if (masses.confirm[i] < 0.0 || masses.confirm[i] > 1.0)
      throw DomainError("combined mass " + format_number(masses.confirm[i]) + " outside [0, 1]");
    keep[i] = 1.0 - masses.confirm[i];
  }

  // Breadth-first order: parents precede children.
  std::vector<double> subtree(n, 1.0);
  for (int v = n - 1; v >= 0; --v) {
    double p = keep[v];
    for (int c : h.node(v).children) p *= subtree[c];
    subtree[v] = p;
  }
  std::vector<double> outside(n, 1.0);  // product over nodes neither in subtree(v) nor above v
  for (int v = 0; v < n; ++v) {
    const auto& kids = h.node(v).children;
    const std::size_t k = kids.size();
    std::vector<double> prefix(k + 1, 1.0), suffix(k + 1, 1.0);
    for (std::size_t a = 0; a < k; ++a) prefix[a + 1] = prefix[a] * subtree[kids[a]];
    for (std::size_t a = k; a > 0; --a) suffix[a - 1] = suffix[a] * subtree[kids[a - 1]];
    for (std::size_t a = 0; a < k; ++a) outside[kids[a]] = outside[v] * prefix[a] * suffix[a + 1];
  }

  BeliefState s;
  s.mass.assign(n, 0.0);
  s.mass[0] = subtree[0];
  for (int v = 1; v < n; ++v) {
    if (masses.confirm[v] == 0.0) continue;
    double below = 1.0;
    for (int c : h.node(v).children) below *= subtree[c];
    s.mass[v] = masses.confirm[v] * outside[v] * below;
  }
  double total = 0.0;
  for (double m : s.mass) total += m;
  if (!(total > underflow_guard)) throw ConflictError("total conflict in hierarchy '" + h.id() + "'");
  for (double& m : s.mass) m /= total;
  s.history.push_back({Normalization::Stage::confirm, -1, 1.0 / total});
  return s;
}

// One application of m_T (+) m_x^c: the simple support function focused on
// the complement of node x with mass c. Every new value is computed from
// the pre-combination vector.
inline void combine_complement(BeliefState& state, const HierarchyModel& h, int x, double c) {
  if (x <= 0 || x >= h.size()) throw DomainError("complement focus must be a non-root node");
  if (c < 0.0 || c > 1.0) throw DomainError("non-confirming mass " + format_number(c) + " outside [0, 1]");
  if (c == 0.0) return;

  const NodeInfo& focus = h.node(x);
  double inside = 0.0;  // mass on subsets of X_x, all conflicting with X_x^c
  for (int y = 0; y < h.size(); ++y)
    if (h.contains(x, y)) inside += state.mass[y];
  const double remaining = 1.0 - c * inside;
  if (!(remaining > underflow_guard)) throw ConflictError("total conflict combining complement of '" + focus.id + "'");
  const double k = 1.0 / remaining;

  const std::vector<double>& pre = state.mass;
  std::vector<double> post(pre.size());
  const int sibling = focus.complement;  // X_j with X_j u X_x in the tree
  const int parent = focus.parent;       // X_j with X_j n X_x^c in the tree, when sibling exists
  for (int y = 0; y < h.size(); ++y) {
    if (h.contains(x, y)) {
      post[y] = k * pre[y] * (1.0 - c);
    } else if (y == sibling) {
      post[y] = k * (pre[y] + pre[parent] * c);
    } else if (y == parent && sibling >= 0) {
      post[y] = k * pre[y] * (1.0 - c);
    } else {
      // Disjoint without a represented union, or a superset whose remainder
      // is not in the tree: the displaced mass stays on the smallest
      // represented superset, which is y itself.
      post[y] = k * pre[y];
    }
  }
  state.mass = std::move(post);
  state.history.push_back({Normalization::Stage::disconfirm, x, k});
}

// Complement combinations in ascending depth, ties by node id.
inline BeliefState step3_apply_nonconfirming(BeliefState state, const NodeMasses& masses, const HierarchyModel& h) {
  for (int x : h.by_depth())
    if (masses.disconfirm[x] > 0.0) combine_complement(state, h, x, masses.disconfirm[x]);
  return state;
}

inline BeliefState compute_belief_state(const NodeMasses& masses, const HierarchyModel& h) {
  return step3_apply_nonconfirming(step2_aggregate_confirming(masses, h), masses, h);
}

inline BeliefState compute_belief_state(const EvidenceInput& evidence, const HierarchyModel& h) {
  return compute_belief_state(step1_node_masses(evidence, h), h);
}

// Bel(X) = sum of m_T over tree nodes contained in X, X included.
inline double belief(const BeliefState& state, const HierarchyModel& h, int node) {
  if (node < 0 || node >= h.size()) throw DomainError("unknown node index");
  double b = 0.0;
  for (int y = 0; y < h.size(); ++y)
    if (h.contains(node, y)) b += state.mass[y];
  return b;
}

inline double belief(const BeliefState& state, const HierarchyModel& h, const std::string& node_id) {
  const int node = h.find(node_id);
  if (node < 0) throw DomainError("unknown node '" + node_id + "' in hierarchy '" + h.id() + "'");
  return belief(state, h, node);
}

// Bel for every node at once.
inline std::vector<double> beliefs(const BeliefState& state, const HierarchyModel& h) {
  std::vector<double> bel(state.mass);
  for (int v = h.size() - 1; v > 0; --v) bel[h.node(v).parent] += bel[v];
  return bel;
}

}  // namespace ibig
