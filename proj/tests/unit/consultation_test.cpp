#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ibig/consultation.hpp"
#include "ibig/io.hpp"
#include "support/random_kb.hpp"

using namespace ibig;
using ibig::testing::data_path;
using ibig::testing::fixture_path;
using ibig::testing::read_text;

namespace {

std::shared_ptr<const Model> model_from(const std::string& path) {
  return std::make_shared<const Model>(load(read_text(path)));
}

std::shared_ptr<const Model> shipped(const std::string& name) { return model_from(data_path(name)); }

void replay(Session& s, const std::vector<ScriptEntry>& script) {
  for (const auto& e : script) s.submit(e.item, e.value);
}

// Answers whatever is asked first, with a value drawn from rng, until done.
void run_to_end(Session& s, std::mt19937_64& rng) {
  while (s.status() == SessionStatus::active) {
    const auto q = s.next_question();
    ASSERT_TRUE(q);
    ASSERT_FALSE(q->items.empty());
    const double u = unit_draw(rng);
    s.submit(q->items.front().id, u < 0.45 ? AnswerValue::present : u < 0.9 ? AnswerValue::absent : AnswerValue::unknown);
  }
}

}  // namespace

TEST(Session, ZeroItemsFinishesImmediately) {
  Session s(model_from(fixture_path("zero_items.ibig.json")));
  EXPECT_EQ(s.status(), SessionStatus::finished);
  EXPECT_FALSE(s.next_question());
  ASSERT_EQ(s.trace().size(), 1u);
  EXPECT_EQ(s.trace()[0].kind, TraceEvent::Kind::finished);
  EXPECT_THROW(s.submit("anything", AnswerValue::present), SessionFinished);
}

TEST(Session, StartsWithHighestPotential) {
  auto s = start_session(shipped("single_path.ibig.json"));
  ASSERT_TRUE(s.next_question());
  const auto& h = s.model().hierarchy(s.next_question()->hierarchy);
  EXPECT_EQ(h.node(s.next_question()->node).id, "A");
  EXPECT_NEAR(s.next_question()->increment, 0.8, algebra_tolerance);
  EXPECT_EQ(s.step(), 0);
}

TEST(Session, AllUnknownLeavesVacuousBelief) {
  auto model = shipped("aphasia_toy.ibig.json");
  Session s(model);
  while (s.status() == SessionStatus::active) s.submit(s.next_question()->items.front().id, AnswerValue::unknown);
  for (int h = 0; h < model->hierarchy_count(); ++h) EXPECT_EQ(s.state(h).mass, vacuous_state(model->hierarchy(h)).mass);
  EXPECT_LE(s.step(), model->item_count());
}

TEST(Session, Errors) {
  Session s(shipped("single_path.ibig.json"));
  EXPECT_THROW(s.submit("no_such_item", AnswerValue::present), UnknownItem);
  s.submit("finding_A", AnswerValue::present);
  EXPECT_THROW(s.submit("finding_A", AnswerValue::absent), DuplicateAnswer);
  EXPECT_EQ(s.step(), 1);
}

TEST(Session, AnsweringOutOfTurnIsAllowed) {
  Session s(shipped("single_path.ibig.json"));
  s.submit("finding_A11", AnswerValue::present);
  EXPECT_EQ(s.answers()[s.model().find_item("finding_A11")], AnswerValue::present);
  EXPECT_GT(s.state(0).mass[s.model().hierarchy(0).find("A11")], 0.0);
}

TEST(Session, QuestionItemsOrderedByMassThenId) {
  Session s(shipped("switching_demo.ibig.json"));
  const auto q = s.next_question();
  ASSERT_TRUE(q);
  ASSERT_EQ(q->items.size(), 2u);  // q1 confirms M at 0.8, q2 disconfirms it at 0.8
  EXPECT_EQ(q->items[0].id, "q1");
  EXPECT_EQ(q->items[1].id, "q2");
  for (std::size_t i = 1; i < q->items.size(); ++i) EXPECT_GE(q->items[i - 1].mass, q->items[i].mass);
}

TEST(Session, ReportRankedByBelief) {
  Session s(shipped("aphasia_toy.ibig.json"));
  replay(s, parse_script(read_text(data_path("aphasia_toy_case1.script.json"))));
  for (const auto& h : s.report()) {
    ASSERT_FALSE(h.rows.empty());
    EXPECT_NEAR(h.rows.front().belief, 1.0, normalization_tolerance);  // the root
    for (std::size_t i = 1; i < h.rows.size(); ++i) EXPECT_GE(h.rows[i - 1].belief, h.rows[i].belief);
  }
}

TEST(Session, SwitchEventsMarkHierarchyChanges) {
  Session s(shipped("switching_demo.ibig.json"));
  replay(s, parse_script(read_text(data_path("switching_demo.script.json"))));
  std::string last;
  int switches = 0;
  for (std::size_t i = 0; i < s.trace().size(); ++i) {
    const auto& ev = s.trace()[i];
    if (ev.kind == TraceEvent::Kind::switched) {
      ++switches;
      EXPECT_EQ(ev.from_hierarchy, last);
      ASSERT_LT(i + 1, s.trace().size());
      EXPECT_EQ(s.trace()[i + 1].kind, TraceEvent::Kind::selected);
      EXPECT_EQ(s.trace()[i + 1].hierarchy, ev.hierarchy);
    }
    if (ev.kind == TraceEvent::Kind::selected) {
      if (!last.empty() && last != ev.hierarchy) EXPECT_EQ(s.trace()[i - 1].kind, TraceEvent::Kind::switched);
      last = ev.hierarchy;
    }
  }
  EXPECT_GE(switches, 1);
  EXPECT_EQ(s.status(), SessionStatus::finished);
}

TEST(Session, BatchModeStaysOnNode) {
  auto model = shipped("switching_demo.ibig.json");
  EngineConfig cfg = model->config();
  cfg.batch = true;
  Session s(model, cfg);
  ASSERT_EQ(s.model().hierarchy(s.next_question()->hierarchy).node(s.next_question()->node).id, "M");
  s.submit("q1", AnswerValue::present);
  const auto q = s.next_question();
  ASSERT_TRUE(q);
  EXPECT_EQ(s.model().hierarchy(q->hierarchy).node(q->node).id, "M");
  ASSERT_EQ(q->items.size(), 1u);
  EXPECT_EQ(q->items[0].id, "q2");
  // no selection event while staying in the batch
  EXPECT_EQ(s.trace().back().kind, TraceEvent::Kind::answered);
}

TEST(Session, TerminatesWithinItemCount) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 60; ++t) {
    auto model = std::make_shared<const Model>(
        ibig::testing::random_kb(rng, {.hierarchies = 2, .items = 10, .max_targets = 3, .disconfirm_share = 0.3}));
    Session s(model);
    run_to_end(s, rng);
    EXPECT_LE(s.step(), model->item_count());
    EXPECT_EQ(s.trace().back().kind, TraceEvent::Kind::finished);
  }
}

TEST(Session, ReplayIsDeterministic) {
  const auto script = parse_script(read_text(data_path("aphasia_toy_case1.script.json")));
  Session a(shipped("aphasia_toy.ibig.json"));
  Session b(shipped("aphasia_toy.ibig.json"));
  replay(a, script);
  replay(b, script);
  EXPECT_EQ(trace_jsonl(a), trace_jsonl(b));
  EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
}

// The belief state is a function of the answer set, whatever the order the
// answers arrived in.
TEST(Session, StateDependsOnAnswerSetOnly) {
  std::mt19937_64 rng(71);
  int complete = 0;
  for (int t = 0; t < 60; ++t) {
    auto model = std::make_shared<const Model>(
        ibig::testing::random_kb(rng, {.hierarchies = 2, .items = 8, .max_targets = 2, .disconfirm_share = 0.3}));
    std::vector<ScriptEntry> script;
    for (const auto& item : model->items())
      script.push_back({item.id, unit_draw(rng) < 0.6 ? AnswerValue::present : AnswerValue::absent});
    std::vector<Session> runs;
    for (int r = 0; r < 2; ++r) {
      std::shuffle(script.begin(), script.end(), rng);
      Session s(model);
      for (const auto& e : script) {
        if (s.status() == SessionStatus::finished) break;
        s.submit(e.item, e.value);
        for (int h = 0; h < model->hierarchy_count(); ++h)
          EXPECT_EQ(s.state(h).mass,
                    compute_belief_state(evidence_for(*model, s.answers(), h), model->hierarchy(h)).mass);
      }
      runs.push_back(std::move(s));
    }
    if (runs[0].step() != model->item_count() || runs[1].step() != model->item_count()) continue;
    ++complete;
    for (int h = 0; h < model->hierarchy_count(); ++h) EXPECT_EQ(runs[0].state(h).mass, runs[1].state(h).mass);
  }
  EXPECT_GT(complete, 0);
}

TEST(Session, NormalizedAfterEveryStep) {
  std::mt19937_64 rng(81);
  for (int t = 0; t < 40; ++t) {
    auto model = std::make_shared<const Model>(
        ibig::testing::random_kb(rng, {.hierarchies = 3, .items = 12, .max_targets = 3, .disconfirm_share = 0.4}));
    Session s(model);
    while (s.status() == SessionStatus::active) {
      for (int h = 0; h < model->hierarchy_count(); ++h) {
        EXPECT_NEAR(s.state(h).sum(), 1.0, normalization_tolerance);
        for (double m : s.state(h).mass) EXPECT_GE(m, 0.0);
      }
      s.submit(s.next_question()->items.front().id, unit_draw(rng) < 0.5 ? AnswerValue::present : AnswerValue::absent);
    }
  }
}
