#pragma once
// Multi-hierarchy knowledge base: frames of discernment, one strict
// hierarchy per frame, data items carrying a-priori evidence masses.
//
// KnowledgeBase is the plain document model (what load/save see).
// Model is the compiled, validated, immutable form the engines consume.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

#include "ibig/common.hpp"

namespace ibig {

// Bit i set <=> the frame's i-th leaf is a member.
using LeafSet = boost::dynamic_bitset<std::uint64_t>;

enum class Polarity { confirm, disconfirm };

inline const char* to_string(Polarity p) { return p == Polarity::confirm ? "confirm" : "disconfirm"; }

struct Frame {
  std::string id;
  std::vector<std::string> leaves;
  bool operator==(const Frame&) const = default;
};

struct HierarchyNode {
  std::string id;
  LeafSet subset;
  std::optional<std::string> parent;  // none only for the root
  bool operator==(const HierarchyNode&) const = default;
};

// A hierarchy is identified by the id of the frame it partitions.
struct Hierarchy {
  std::string frame;
  std::vector<HierarchyNode> nodes;
  bool operator==(const Hierarchy&) const = default;
};

struct EvidenceTarget {
  std::string hierarchy;
  std::string node;
  Polarity polarity = Polarity::confirm;
  double mass = 0.0;
  bool operator==(const EvidenceTarget&) const = default;
};

struct DataItem {
  std::string id;
  std::string prompt;
  std::vector<EvidenceTarget> targets;
  bool operator==(const DataItem&) const = default;
};

struct EngineConfig {
  double epsilon_stop = 1e-6;
  bool batch = false;        // answer every item of a selected node before re-selecting
  bool eq4_literal = false;  // use m_T(X_j) in the son-node equation as printed
  bool eq1_joint = false;    // hat every non-superset node at once in the wFC equation
  bool operator==(const EngineConfig&) const = default;
};

struct KnowledgeBase {
  std::vector<Frame> frames;
  std::vector<Hierarchy> hierarchies;
  std::vector<DataItem> items;
  EngineConfig config;
  bool operator==(const KnowledgeBase&) const = default;

  const Frame* find_frame(const std::string& id) const {
    for (const auto& f : frames)
      if (f.id == id) return &f;
    return nullptr;
  }
  const Hierarchy* find_hierarchy(const std::string& id) const {
    for (const auto& h : hierarchies)
      if (h.frame == id) return &h;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string rule;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;  // never make the report non-empty

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::string node_location(const Hierarchy& h, const std::string& node) {
  return "hierarchies[" + h.frame + "].nodes[" + node + "]";
}

inline void validate_frames(const KnowledgeBase& kb, ValidationReport& rep) {
  std::map<std::string, std::string> owner;  // leaf -> first frame
  for (const auto& f : kb.frames) {
    const std::string loc = "frames[" + f.id + "]";
    if (f.leaves.empty()) rep.violations.push_back({"leaves-nonempty", loc, "frame has no leaves"});
    std::set<std::string> seen;
    for (const auto& leaf : f.leaves) {
      if (!seen.insert(leaf).second) {
        rep.violations.push_back({"leaf-unique", loc, "leaf '" + leaf + "' listed twice"});
        continue;
      }
      auto [it, fresh] = owner.emplace(leaf, f.id);
      if (!fresh)
        rep.violations.push_back({"disjointness", loc,
                                  "leaf '" + leaf + "' also belongs to frame '" + it->second + "'"});
    }
    if (!kb.find_hierarchy(f.id)) rep.warnings.push_back({"frame-unused", loc, "frame has no hierarchy"});
  }
}

inline void validate_hierarchy(const KnowledgeBase& kb, const Hierarchy& h, ValidationReport& rep) {
  const Frame* frame = kb.find_frame(h.frame);
  if (!frame) {
    rep.violations.push_back({"reference", "hierarchies[" + h.frame + "]", "unknown frame '" + h.frame + "'"});
    return;
  }
  const std::size_t width = frame->leaves.size();
  std::map<std::string, const HierarchyNode*> by_id;
  for (const auto& n : h.nodes) by_id.emplace(n.id, &n);

  if (h.nodes.size() <= 1)
    rep.warnings.push_back({"trivial-hierarchy", "hierarchies[" + h.frame + "]", "hierarchy has no node below the root"});

  std::size_t roots = 0;
  for (const auto& n : h.nodes) {
    const std::string loc = node_location(h, n.id);
    if (n.subset.size() != width) {
      rep.violations.push_back({"subset-width", loc, "subset is not sized to the frame"});
      continue;
    }
    if (n.subset.none()) rep.violations.push_back({"subset-nonempty", loc, "node has an empty subset"});
    if (!n.parent) {
      ++roots;
      if (n.subset.count() != width) rep.violations.push_back({"root-full-frame", loc, "root must cover the whole frame"});
      continue;
    }
    auto p = by_id.find(*n.parent);
    if (p == by_id.end()) {
      rep.violations.push_back({"reference", loc, "unknown parent '" + *n.parent + "'"});
      continue;
    }
    const LeafSet& ps = p->second->subset;
    if (ps.size() == width && !(n.subset.is_proper_subset_of(ps)))
      rep.violations.push_back({"strict-subset", loc, "subset is not a strict subset of parent '" + *n.parent + "'"});
  }
  if (roots != 1)
    rep.violations.push_back({"single-root", "hierarchies[" + h.frame + "]",
                              "expected exactly one root, found " + std::to_string(roots)});

  // Parent chains must reach a root.
  for (const auto& n : h.nodes) {
    const HierarchyNode* cur = &n;
    std::size_t steps = 0;
    while (cur && cur->parent && steps <= h.nodes.size()) {
      auto p = by_id.find(*cur->parent);
      cur = p == by_id.end() ? nullptr : p->second;
      ++steps;
    }
    if (steps > h.nodes.size()) rep.violations.push_back({"acyclic", node_location(h, n.id), "parent chain contains a cycle"});
  }

  std::map<std::string, std::vector<const HierarchyNode*>> siblings;
  for (const auto& n : h.nodes)
    if (n.parent) siblings[*n.parent].push_back(&n);
  for (const auto& [parent, kids] : siblings)
    for (std::size_t a = 0; a < kids.size(); ++a)
      for (std::size_t b = a + 1; b < kids.size(); ++b)
        if (kids[a]->subset.size() == width && kids[b]->subset.size() == width &&
            kids[a]->subset.intersects(kids[b]->subset))
          rep.violations.push_back({"sibling-disjoint", node_location(h, kids[b]->id),
                                    "overlaps sibling '" + kids[a]->id + "'"});

  std::map<LeafSet, std::string> by_subset;
  for (const auto& n : h.nodes) {
    if (n.subset.size() != width) continue;
    auto [it, fresh] = by_subset.emplace(n.subset, n.id);
    if (!fresh)
      rep.violations.push_back({"equal-subset", node_location(h, n.id), "same subset as node '" + it->second + "'"});
  }
}

inline void validate_items(const KnowledgeBase& kb, ValidationReport& rep) {
  for (const auto& item : kb.items) {
    const std::string loc = "items[" + item.id + "]";
    if (item.targets.empty()) rep.violations.push_back({"item-targets", loc, "item has no evidence target"});
    std::set<std::tuple<std::string, std::string, Polarity>> seen;
    for (std::size_t t = 0; t < item.targets.size(); ++t) {
      const auto& tg = item.targets[t];
      const std::string tloc = loc + ".targets[" + std::to_string(t) + "]";
      if (!in_open_unit_interval(tg.mass))
        rep.violations.push_back({"mass-range", tloc, "mass " + format_number(tg.mass) + " outside (0, 1)"});
      if (!seen.emplace(tg.hierarchy, tg.node, tg.polarity).second)
        rep.violations.push_back({"target-duplicate", tloc,
                                  std::string("second ") + to_string(tg.polarity) + " target on '" + tg.node + "'"});
      const Hierarchy* h = kb.find_hierarchy(tg.hierarchy);
      if (!h) {
        rep.violations.push_back({"reference", tloc, "unknown hierarchy '" + tg.hierarchy + "'"});
        continue;
      }
      auto n = std::find_if(h->nodes.begin(), h->nodes.end(), [&](const auto& x) { return x.id == tg.node; });
      if (n == h->nodes.end())
        rep.violations.push_back({"reference", tloc, "unknown node '" + tg.node + "'"});
      else if (!n->parent)
        rep.violations.push_back({"target-root", tloc, "evidence may not target the root"});
    }
  }
}

}  // namespace detail

// Reports every violated structural rule, not just the first.
inline ValidationReport validate(const KnowledgeBase& kb) {
  ValidationReport rep;
  detail::validate_frames(kb, rep);
  for (const auto& h : kb.hierarchies) detail::validate_hierarchy(kb, h, rep);
  detail::validate_items(kb, rep);
  const double eps = kb.config.epsilon_stop;
  if (!(eps >= 0.0) || !std::isfinite(eps))
    rep.violations.push_back({"config-range", "config.epsilon_stop", "must be a finite non-negative number"});
  return rep;
}

class InvalidKnowledgeBase : public std::runtime_error {
 public:
  explicit InvalidKnowledgeBase(ValidationReport report)
      : std::runtime_error(describe(report)), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  static std::string describe(const ValidationReport& r) {
    std::string s = "invalid knowledge base";
    if (!r.violations.empty()) s += ": " + r.violations.front().rule + " at " + r.violations.front().location;
    return s;
  }
  ValidationReport report_;
};

// ---------------------------------------------------------------------------
// Loading

class LoadError : public std::runtime_error {
 public:
  enum class Kind { parse, schema, reference, duplicate };

  LoadError(Kind kind, std::string message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(render(kind, message, line, column)), kind_(kind), line_(line), column_(column) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string render(Kind kind, const std::string& msg, std::size_t line, std::size_t col) {
    static const char* names[] = {"parse error", "schema error", "reference error", "duplicate id"};
    std::string s = names[static_cast<int>(kind)];
    if (line > 0) s += " at line " + std::to_string(line) + ", column " + std::to_string(col);
    return s + ": " + msg;
  }
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

using json = nlohmann::json;

inline const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw LoadError(LoadError::Kind::schema, where + ": missing key '" + key + "'");
  return *it;
}

inline std::string string_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) throw LoadError(LoadError::Kind::schema, where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline const json& array_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_array()) throw LoadError(LoadError::Kind::schema, where + "." + key + ": expected an array");
  return v;
}

inline void require_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw LoadError(LoadError::Kind::schema, where + ": expected an object");
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline EngineConfig parse_config(const json& cfg) {
  EngineConfig out;
  require_object(cfg, "config");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "epsilon_stop") {
      if (!value.is_number()) throw LoadError(LoadError::Kind::schema, "config.epsilon_stop: expected a number");
      out.epsilon_stop = value.get<double>();
    } else if (key == "batch" || key == "eq4_literal" || key == "eq1_joint") {
      if (!value.is_boolean()) throw LoadError(LoadError::Kind::schema, "config." + key + ": expected a boolean");
      bool b = value.get<bool>();
      if (key == "batch") out.batch = b;
      else if (key == "eq4_literal") out.eq4_literal = b;
      else out.eq1_joint = b;
    } else {
      throw LoadError(LoadError::Kind::schema, "config: unknown key '" + key + "'");
    }
  }
  return out;
}

}  // namespace detail

// Parses the .ibig.json document. Structural problems that prevent building
// the model (bad JSON, missing keys, dangling or duplicate ids) throw
// LoadError; invariant violations are left for validate().
inline KnowledgeBase load(const std::string& document) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_column(document, e.byte == 0 ? 0 : e.byte - 1);
    throw LoadError(LoadError::Kind::parse, e.what(), line, col);
  }
  detail::require_object(doc, "document");

  KnowledgeBase kb;
  for (const auto& fj : detail::array_member(doc, "frames", "document")) {
    detail::require_object(fj, "frames[]");
    Frame f;
    f.id = detail::string_member(fj, "id", "frames[]");
    const std::string where = "frames[" + f.id + "]";
    for (const auto& leaf : detail::array_member(fj, "leaves", where)) {
      if (!leaf.is_string()) throw LoadError(LoadError::Kind::schema, where + ".leaves: expected strings");
      f.leaves.push_back(leaf.get<std::string>());
    }
    if (kb.find_frame(f.id)) throw LoadError(LoadError::Kind::duplicate, "frame '" + f.id + "'");
    kb.frames.push_back(std::move(f));
  }

  for (const auto& hj : detail::array_member(doc, "hierarchies", "document")) {
    detail::require_object(hj, "hierarchies[]");
    Hierarchy h;
    h.frame = detail::string_member(hj, "frame", "hierarchies[]");
    const std::string where = "hierarchies[" + h.frame + "]";
    const Frame* frame = kb.find_frame(h.frame);
    if (!frame) throw LoadError(LoadError::Kind::reference, where + ": unknown frame '" + h.frame + "'");
    if (kb.find_hierarchy(h.frame)) throw LoadError(LoadError::Kind::duplicate, "second hierarchy over frame '" + h.frame + "'");

    std::unordered_map<std::string, std::size_t> leaf_index;
    for (std::size_t i = 0; i < frame->leaves.size(); ++i) leaf_index.emplace(frame->leaves[i], i);

    std::set<std::string> ids;
    for (const auto& nj : detail::array_member(hj, "nodes", where)) {
      detail::require_object(nj, where + ".nodes[]");
      HierarchyNode n;
      n.id = detail::string_member(nj, "id", where + ".nodes[]");
      const std::string nwhere = detail::node_location(h, n.id);
      if (!ids.insert(n.id).second) throw LoadError(LoadError::Kind::duplicate, "node '" + n.id + "' in hierarchy '" + h.frame + "'");
      n.subset = LeafSet(frame->leaves.size());
      const json& leaves = detail::member(nj, "leaves", nwhere);
      if (leaves.is_string()) {
        if (leaves.get<std::string>() != "all")
          throw LoadError(LoadError::Kind::schema, nwhere + ".leaves: expected an array or \"all\"");
        n.subset.set();
      } else if (leaves.is_array()) {
        for (const auto& leaf : leaves) {
          if (!leaf.is_string()) throw LoadError(LoadError::Kind::schema, nwhere + ".leaves: expected strings");
          auto it = leaf_index.find(leaf.get<std::string>());
          if (it == leaf_index.end())
            throw LoadError(LoadError::Kind::reference, nwhere + ": unknown leaf '" + leaf.get<std::string>() + "'");
          n.subset.set(it->second);
        }
      } else {
        throw LoadError(LoadError::Kind::schema, nwhere + ".leaves: expected an array or \"all\"");
      }
      const json& parent = detail::member(nj, "parent", nwhere);
      if (parent.is_string()) n.parent = parent.get<std::string>();
      else if (!parent.is_null()) throw LoadError(LoadError::Kind::schema, nwhere + ".parent: expected a string or null");
      h.nodes.push_back(std::move(n));
    }
    for (const auto& n : h.nodes)
      if (n.parent && !ids.count(*n.parent))
        throw LoadError(LoadError::Kind::reference, detail::node_location(h, n.id) + ": unknown parent '" + *n.parent + "'");
    kb.hierarchies.push_back(std::move(h));
  }

  if (doc.contains("items")) {
    std::set<std::string> ids;
    for (const auto& ij : detail::array_member(doc, "items", "document")) {
      detail::require_object(ij, "items[]");
      DataItem item;
      item.id = detail::string_member(ij, "id", "items[]");
      const std::string where = "items[" + item.id + "]";
      if (!ids.insert(item.id).second) throw LoadError(LoadError::Kind::duplicate, "item '" + item.id + "'");
      item.prompt = detail::string_member(ij, "prompt", where);
      for (const auto& tj : detail::array_member(ij, "targets", where)) {
        detail::require_object(tj, where + ".targets[]");
        EvidenceTarget t;
        t.hierarchy = detail::string_member(tj, "hierarchy", where + ".targets[]");
        t.node = detail::string_member(tj, "node", where + ".targets[]");
        const std::string pol = detail::string_member(tj, "polarity", where + ".targets[]");
        if (pol == "confirm") t.polarity = Polarity::confirm;
        else if (pol == "disconfirm") t.polarity = Polarity::disconfirm;
        else throw LoadError(LoadError::Kind::schema, where + ": polarity must be \"confirm\" or \"disconfirm\"");
        const json& mass = detail::member(tj, "mass", where + ".targets[]");
        if (!mass.is_number()) throw LoadError(LoadError::Kind::schema, where + ".targets[].mass: expected a number");
        t.mass = mass.get<double>();
        const Hierarchy* h = kb.find_hierarchy(t.hierarchy);
        if (!h) throw LoadError(LoadError::Kind::reference, where + ": unknown hierarchy '" + t.hierarchy + "'");
        bool found = std::any_of(h->nodes.begin(), h->nodes.end(), [&](const auto& n) { return n.id == t.node; });
        if (!found) throw LoadError(LoadError::Kind::reference, where + ": unknown node '" + t.node + "' in hierarchy '" + t.hierarchy + "'");
        item.targets.push_back(std::move(t));
      }
      kb.items.push_back(std::move(item));
    }
  }

  if (doc.contains("config")) kb.config = detail::parse_config(doc["config"]);
  return kb;
}

// Serializes a valid KB; refuses (InvalidKnowledgeBase) otherwise.
inline std::string save(const KnowledgeBase& kb) {
  ValidationReport rep = validate(kb);
  if (!rep.ok()) throw InvalidKnowledgeBase(std::move(rep));

  using ojson = nlohmann::ordered_json;
  ojson doc;
  ojson frames = ojson::array();
  for (const auto& f : kb.frames) frames.push_back({{"id", f.id}, {"leaves", f.leaves}});
  doc["frames"] = std::move(frames);

  ojson hierarchies = ojson::array();
  for (const auto& h : kb.hierarchies) {
    const Frame* frame = kb.find_frame(h.frame);
    ojson nodes = ojson::array();
    for (const auto& n : h.nodes) {
      ojson nj;
      nj["id"] = n.id;
      if (n.subset.all()) {
        nj["leaves"] = "all";
      } else {
        ojson leaves = ojson::array();
        for (auto i = n.subset.find_first(); i != LeafSet::npos; i = n.subset.find_next(i)) leaves.push_back(frame->leaves[i]);
        nj["leaves"] = std::move(leaves);
      }
      nj["parent"] = n.parent ? ojson(*n.parent) : ojson(nullptr);
      nodes.push_back(std::move(nj));
    }
    hierarchies.push_back({{"frame", h.frame}, {"nodes", std::move(nodes)}});
  }
  doc["hierarchies"] = std::move(hierarchies);

  ojson items = ojson::array();
  for (const auto& item : kb.items) {
    ojson targets = ojson::array();
    for (const auto& t : item.targets)
      targets.push_back({{"hierarchy", t.hierarchy}, {"node", t.node}, {"polarity", to_string(t.polarity)}, {"mass", t.mass}});
    items.push_back({{"id", item.id}, {"prompt", item.prompt}, {"targets", std::move(targets)}});
  }
  doc["items"] = std::move(items);
  doc["config"] = {{"epsilon_stop", kb.config.epsilon_stop},
                   {"batch", kb.config.batch},
                   {"eq4_literal", kb.config.eq4_literal},
                   {"eq1_joint", kb.config.eq1_joint}};
  return doc.dump(2, ' ', false) + "\n";
}

// ---------------------------------------------------------------------------
// Compiled model

struct NodeInfo {
  std::string id;
  LeafSet subset;
  int parent = -1;
  std::vector<int> children;
  int depth = 0;
  int enter = 0;  // preorder interval: descendants of v have enter in [enter, exit)
  int exit = 0;
  // Sibling that together with this node exactly covers the parent, or -1.
  int complement = -1;
};

// One hierarchy with index 0 the root (the frame theta), nodes in
// breadth-first order with children in document order.
class HierarchyModel {
 public:
  HierarchyModel(const Frame& frame, const Hierarchy& h) : id_(h.frame), leaves_(frame.leaves) {
    std::unordered_map<std::string, std::size_t> doc_index;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) doc_index.emplace(h.nodes[i].id, i);
    std::vector<std::vector<std::size_t>> kids(h.nodes.size());
    std::size_t root = 0;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
      if (h.nodes[i].parent) kids[doc_index.at(*h.nodes[i].parent)].push_back(i);
      else root = i;
    }

    std::deque<std::pair<std::size_t, int>> queue{{root, -1}};
    while (!queue.empty()) {
      auto [doc, parent] = queue.front();
      queue.pop_front();
      const int idx = static_cast<int>(nodes_.size());
      NodeInfo info;
      info.id = h.nodes[doc].id;
      info.subset = h.nodes[doc].subset;
      info.parent = parent;
      info.depth = parent < 0 ? 0 : nodes_[parent].depth + 1;
      if (parent >= 0) nodes_[parent].children.push_back(idx);
      nodes_.push_back(std::move(info));
      for (std::size_t k : kids[doc]) queue.emplace_back(k, idx);
    }

    for (int i = 0; i < size(); ++i) {
      by_id_.emplace(nodes_[i].id, i);
      by_subset_.emplace(nodes_[i].subset, i);
    }
    int clock = 0;
    number(0, clock);
    for (int i = 1; i < size(); ++i) {
      const auto& p = nodes_[nodes_[i].parent];
      auto it = by_subset_.find(p.subset - nodes_[i].subset);
      if (it != by_subset_.end()) nodes_[i].complement = it->second;
    }

    for (int i = 1; i < size(); ++i) by_depth_.push_back(i);
    std::sort(by_depth_.begin(), by_depth_.end(), [&](int a, int b) {
      if (nodes_[a].depth != nodes_[b].depth) return nodes_[a].depth < nodes_[b].depth;
      return nodes_[a].id < nodes_[b].id;
    });
  }

  const std::string& id() const { return id_; }
  const std::vector<std::string>& leaves() const { return leaves_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const NodeInfo& node(int i) const { return nodes_[i]; }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }

  int find(const std::string& node_id) const {
    auto it = by_id_.find(node_id);
    return it == by_id_.end() ? -1 : it->second;
  }
  int find(const LeafSet& subset) const {
    auto it = by_subset_.find(subset);
    return it == by_subset_.end() ? -1 : it->second;
  }

  // subset(a) contains subset(b); in a strict hierarchy that is ancestry.
  bool contains(int a, int b) const { return nodes_[a].enter <= nodes_[b].enter && nodes_[b].enter < nodes_[a].exit; }
  bool disjoint(int a, int b) const { return !contains(a, b) && !contains(b, a); }

  // Non-root nodes ordered by ascending depth, ties by node id.
  const std::vector<int>& by_depth() const { return by_depth_; }

 private:
  void number(int v, int& clock) {
    nodes_[v].enter = clock++;
    for (int c : nodes_[v].children) number(c, clock);
    nodes_[v].exit = clock;
  }

  std::string id_;
  std::vector<std::string> leaves_;
  std::vector<NodeInfo> nodes_;
  std::unordered_map<std::string, int> by_id_;
  std::map<LeafSet, int> by_subset_;
  std::vector<int> by_depth_;
};

struct ResolvedTarget {
  int hierarchy = 0;
  int node = 0;
  Polarity polarity = Polarity::confirm;
  double mass = 0.0;
};

struct ResolvedItem {
  std::string id;
  std::string prompt;
  std::vector<ResolvedTarget> targets;
};

// Immutable after construction; share freely across sessions.
class Model {
 public:
  explicit Model(KnowledgeBase kb) : kb_(std::move(kb)) {
    ValidationReport rep = validate(kb_);
    if (!rep.ok()) throw InvalidKnowledgeBase(std::move(rep));
    for (const auto& h : kb_.hierarchies) hierarchies_.emplace_back(*kb_.find_frame(h.frame), h);
    for (int i = 0; i < static_cast<int>(hierarchies_.size()); ++i) hierarchy_index_.emplace(hierarchies_[i].id(), i);
    targets_at_.resize(hierarchies_.size());
    for (std::size_t h = 0; h < hierarchies_.size(); ++h) targets_at_[h].resize(hierarchies_[h].size());
    for (const auto& item : kb_.items) {
      ResolvedItem r{item.id, item.prompt, {}};
      const int idx = static_cast<int>(items_.size());
      for (const auto& t : item.targets) {
        const int h = hierarchy_index_.at(t.hierarchy);
        const int n = hierarchies_[h].find(t.node);
        r.targets.push_back({h, n, t.polarity, t.mass});
        targets_at_[h][n].push_back({idx, t.polarity, t.mass});
      }
      item_index_.emplace(item.id, idx);
      items_.push_back(std::move(r));
    }
  }

  struct ItemRef {
    int item;
    Polarity polarity;
    double mass;
  };

  const KnowledgeBase& kb() const { return kb_; }
  const EngineConfig& config() const { return kb_.config; }
  const std::vector<HierarchyModel>& hierarchies() const { return hierarchies_; }
  const HierarchyModel& hierarchy(int h) const { return hierarchies_[h]; }
  int hierarchy_count() const { return static_cast<int>(hierarchies_.size()); }
  int find_hierarchy(const std::string& id) const {
    auto it = hierarchy_index_.find(id);
    return it == hierarchy_index_.end() ? -1 : it->second;
  }
  const std::vector<ResolvedItem>& items() const { return items_; }
  int item_count() const { return static_cast<int>(items_.size()); }
  int find_item(const std::string& id) const {
    auto it = item_index_.find(id);
    return it == item_index_.end() ? -1 : it->second;
  }
  // Targets on node n of hierarchy h, in item order.
  const std::vector<ItemRef>& targets_at(int h, int n) const { return targets_at_[h][n]; }

 private:
  KnowledgeBase kb_;
  std::vector<HierarchyModel> hierarchies_;
  std::unordered_map<std::string, int> hierarchy_index_;
  std::vector<ResolvedItem> items_;
  std::unordered_map<std::string, int> item_index_;
  std::vector<std::vector<std::vector<ItemRef>>> targets_at_;
};

}  // namespace ibig
