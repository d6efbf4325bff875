#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ibig/kb.hpp"
#include "support/random_kb.hpp"

using namespace ibig;
using ibig::testing::data_path;
using ibig::testing::fixture_path;
using ibig::testing::read_text;

namespace {

bool has_rule(const std::vector<Violation>& list, const std::string& rule) {
  return std::any_of(list.begin(), list.end(), [&](const Violation& v) { return v.rule == rule; });
}

LeafSet leaves(std::size_t width, std::initializer_list<std::size_t> bits) {
  LeafSet s(width);
  for (auto b : bits) s.set(b);
  return s;
}

LeafSet all(std::size_t width) {
  LeafSet s(width);
  s.set();
  return s;
}

// Root with two children partitioning the frame {a, b}.
KnowledgeBase partition_kb() {
  KnowledgeBase kb;
  kb.frames.push_back({"f", {"a", "b"}});
  kb.hierarchies.push_back({"f",
                            {{"root", all(2), std::nullopt},
                             {"A", leaves(2, {0}), "root"},
                             {"B", leaves(2, {1}), "root"}}});
  return kb;
}

}  // namespace

TEST(Validate, MinimalPartitionIsClean) {
  const auto rep = validate(partition_kb());
  EXPECT_TRUE(rep.violations.empty());
  EXPECT_TRUE(rep.warnings.empty());
}

TEST(Validate, SharedLeafAcrossFrames) {
  const auto rep = validate(load(read_text(fixture_path("shared_leaf.ibig.json"))));
  EXPECT_TRUE(has_rule(rep.violations, "disjointness"));
}

TEST(Validate, ChildEqualToParent) {
  auto kb = partition_kb();
  kb.hierarchies[0].nodes.push_back({"A2", leaves(2, {0}), "A"});
  const auto rep = validate(kb);
  EXPECT_TRUE(has_rule(rep.violations, "strict-subset"));
}

TEST(Validate, ListsEveryViolation) {
  auto kb = partition_kb();
  kb.hierarchies[0].nodes.push_back({"A2", leaves(2, {0}), "A"});           // strict-subset, equal-subset
  kb.hierarchies[0].nodes.push_back({"AB", leaves(2, {0, 1}), "root"});     // strict-subset, sibling overlap
  kb.items.push_back({"q", "?", {{"f", "A", Polarity::confirm, 1.0}}});     // mass-range
  kb.items.push_back({"r", "?", {{"f", "root", Polarity::confirm, 0.5}}});  // target-root
  kb.items.push_back({"s", "?", {}});                                       // item-targets
  const auto rep = validate(kb);
  for (const char* rule : {"strict-subset", "equal-subset", "sibling-disjoint", "mass-range", "target-root", "item-targets"})
    EXPECT_TRUE(has_rule(rep.violations, rule)) << rule;
}

TEST(Validate, MassBoundsAreExclusive) {
  for (double m : {0.0, 1.0, -0.1, 1.5}) {
    auto kb = partition_kb();
    kb.items.push_back({"q", "?", {{"f", "A", Polarity::disconfirm, m}}});
    EXPECT_TRUE(has_rule(validate(kb).violations, "mass-range")) << m;
  }
  auto kb = partition_kb();
  kb.items.push_back({"q", "?", {{"f", "A", Polarity::disconfirm, 0.999}}});
  EXPECT_TRUE(validate(kb).ok());
}

TEST(Validate, DuplicateTargetWithinItem) {
  auto kb = partition_kb();
  kb.items.push_back({"q", "?", {{"f", "A", Polarity::confirm, 0.3}, {"f", "A", Polarity::confirm, 0.4}}});
  EXPECT_TRUE(has_rule(validate(kb).violations, "target-duplicate"));
  kb.items.back().targets[1].polarity = Polarity::disconfirm;
  EXPECT_TRUE(validate(kb).ok());
}

TEST(Validate, TwoRootsAndCycles) {
  auto kb = partition_kb();
  kb.hierarchies[0].nodes.push_back({"other", all(2), std::nullopt});
  EXPECT_TRUE(has_rule(validate(kb).violations, "single-root"));

  kb = partition_kb();
  kb.frames[0].leaves = {"a", "b", "c", "d"};
  kb.hierarchies[0].nodes = {{"root", all(4), std::nullopt},
                             {"X", leaves(4, {0, 1}), "Y"},
                             {"Y", leaves(4, {0, 1, 2}), "X"}};
  EXPECT_TRUE(has_rule(validate(kb).violations, "acyclic"));
}

TEST(Validate, RootOnlyIsWarningNotViolation) {
  const auto rep = validate(load(read_text(fixture_path("minimal.ibig.json"))));
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(has_rule(rep.warnings, "trivial-hierarchy"));
}

TEST(Validate, ConfigRange) {
  auto kb = partition_kb();
  kb.config.epsilon_stop = -1.0;
  EXPECT_TRUE(has_rule(validate(kb).violations, "config-range"));
}

TEST(Validate, ShippedFixturesAreClean) {
  for (const char* name : {"aphasia_toy.ibig.json", "single_path.ibig.json", "switching_demo.ibig.json"}) {
    const auto kb = load(read_text(data_path(name)));
    const auto rep = validate(kb);
    EXPECT_TRUE(rep.violations.empty()) << name;
  }
  const auto kb = load(read_text(data_path("aphasia_toy.ibig.json")));
  ASSERT_EQ(kb.hierarchies.size(), 2u);
  for (const auto& h : kb.hierarchies) EXPECT_EQ(h.nodes.size(), 7u);
}

TEST(Load, MinimalDocument) {
  const auto kb = load(read_text(fixture_path("minimal.ibig.json")));
  ASSERT_EQ(kb.hierarchies.size(), 1u);
  EXPECT_EQ(kb.hierarchies[0].nodes.size(), 1u);
  EXPECT_TRUE(kb.items.empty());
}

TEST(Load, MissingNodeNamesIt) {
  try {
    load(read_text(fixture_path("missing_node.ibig.json")));
    FAIL() << "expected a reference error";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.kind(), LoadError::Kind::reference);
    EXPECT_NE(std::string(e.what()).find("n99"), std::string::npos);
  }
}

TEST(Load, DuplicateItemId) {
  try {
    load(read_text(fixture_path("duplicate_item.ibig.json")));
    FAIL() << "expected a duplicate error";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.kind(), LoadError::Kind::duplicate);
  }
}

TEST(Load, ParseErrorCarriesPosition) {
  try {
    load(read_text(fixture_path("malformed.ibig.json")));
    FAIL() << "expected a parse error";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.kind(), LoadError::Kind::parse);
    EXPECT_EQ(e.line(), 4u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Load, UnknownConfigKeyRejected) {
  const std::string doc = R"({"frames": [{"id": "f", "leaves": ["a"]}],
    "hierarchies": [{"frame": "f", "nodes": [{"id": "r", "leaves": "all", "parent": null}]}],
    "config": {"epsilon": 0.1}})";
  EXPECT_THROW(load(doc), LoadError);
}

TEST(Load, ConfigValues) {
  const std::string doc = R"({"frames": [{"id": "f", "leaves": ["a"]}],
    "hierarchies": [{"frame": "f", "nodes": [{"id": "r", "leaves": "all", "parent": null}]}],
    "config": {"epsilon_stop": 0.01, "batch": true, "eq4_literal": true, "eq1_joint": true}})";
  const auto kb = load(doc);
  EXPECT_DOUBLE_EQ(kb.config.epsilon_stop, 0.01);
  EXPECT_TRUE(kb.config.batch && kb.config.eq4_literal && kb.config.eq1_joint);
}

TEST(Save, FixedPointOnShippedFixtures) {
  for (const char* name : {"aphasia_toy.ibig.json", "single_path.ibig.json", "switching_demo.ibig.json"}) {
    const auto once = load(read_text(data_path(name)));
    const std::string text = save(once);
    const auto twice = load(text);
    EXPECT_EQ(once, twice) << name;
    EXPECT_EQ(save(twice), text) << name;
  }
}

TEST(Save, UnicodePreservedByteExact) {
  const auto kb = load(read_text(fixture_path("unicode.ibig.json")));
  const std::string expected = "Ist die Läsion größer als 2 cm? — «ja» / 是 / 🧠";
  ASSERT_EQ(kb.items[0].prompt, expected);
  const std::string text = save(kb);
  EXPECT_NE(text.find(expected), std::string::npos);
  const auto back = load(text);
  EXPECT_EQ(back.items[0].prompt, expected);
  EXPECT_EQ(back.hierarchies[0].nodes[1].id, "Größe");
}

TEST(Save, RefusesInvalidKb) {
  const auto kb = load(read_text(fixture_path("shared_leaf.ibig.json")));
  EXPECT_THROW(save(kb), InvalidKnowledgeBase);
}

TEST(Model, RejectsInvalidKb) {
  EXPECT_THROW(Model(load(read_text(fixture_path("shared_leaf.ibig.json")))), InvalidKnowledgeBase);
}

TEST(Model, RandomHierarchiesAreLaminarAndValid) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto kb = ibig::testing::random_kb(rng, {.hierarchies = 2});
    ASSERT_TRUE(validate(kb).ok());
    for (const auto& h : kb.hierarchies)
      for (const auto& a : h.nodes)
        for (const auto& b : h.nodes) {
          const bool nested = a.subset.is_subset_of(b.subset) || b.subset.is_subset_of(a.subset);
          EXPECT_TRUE(nested || !a.subset.intersects(b.subset));
        }
  }
}

// contains/disjoint/complement from the preorder numbering agree with direct
// set computations.
TEST(Model, RelationsMatchSetAlgebra) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const Model model(ibig::testing::random_kb(rng));
    const auto& h = model.hierarchy(0);
    for (int a = 0; a < h.size(); ++a) {
      for (int b = 0; b < h.size(); ++b) {
        const auto& A = h.node(a).subset;
        const auto& B = h.node(b).subset;
        EXPECT_EQ(h.contains(a, b), B.is_subset_of(A));
        EXPECT_EQ(h.disjoint(a, b), !A.intersects(B));
      }
      if (a == 0) continue;
      const auto& P = h.node(h.node(a).parent).subset;
      const int expected = h.find(P - h.node(a).subset);
      EXPECT_EQ(h.node(a).complement, expected);
    }
    for (std::size_t k = 1; k < h.by_depth().size(); ++k) {
      const auto& prev = h.node(h.by_depth()[k - 1]);
      const auto& cur = h.node(h.by_depth()[k]);
      EXPECT_TRUE(prev.depth < cur.depth || (prev.depth == cur.depth && prev.id < cur.id));
    }
  }
}

TEST(Model, TargetsResolved) {
  const Model model(load(read_text(data_path("single_path.ibig.json"))));
  const auto& h = model.hierarchy(0);
  const int a = h.find("A");
  ASSERT_EQ(model.targets_at(0, a).size(), 1u);
  EXPECT_EQ(model.targets_at(0, a)[0].item, model.find_item("finding_A"));
  EXPECT_DOUBLE_EQ(model.targets_at(0, a)[0].mass, 0.8);
  EXPECT_EQ(model.find_item("nope"), -1);
}
