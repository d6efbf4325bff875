#pragma once
// A consultation: belief is kept for every hierarchy in parallel, the node
// with the largest information increment over all hierarchies decides the
// next question, and every answer triggers a full recomputation.

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibig/belief.hpp"
#include "ibig/evidence.hpp"
#include "ibig/infogain.hpp"
#include "ibig/kb.hpp"

namespace ibig {

struct Answer {
  std::string item;
  AnswerValue value = AnswerValue::unknown;
  std::chrono::system_clock::time_point at;
};

struct QuestionItem {
  std::string id;
  std::string prompt;
  double mass = 0.0;  // a-priori mass toward the selected node
};

struct Question {
  int hierarchy = 0;
  int node = 0;
  double increment = 0.0;
  std::vector<QuestionItem> items;  // descending mass, ties by item id
};

struct KSnapshot {
  std::string hierarchy;
  std::vector<Normalization> history;
};

struct TraceEvent {
  enum class Kind { selected, answered, switched, finished };
  Kind kind = Kind::selected;
  int step = 0;  // answers applied so far
  // selected / switched (to) / answered (item)
  std::string hierarchy;
  std::string node;
  std::vector<std::string> items;
  std::string item;
  AnswerValue value = AnswerValue::unknown;
  std::string from_hierarchy;  // switched
  double max_increment = 0.0;
  std::vector<KSnapshot> k;
};

inline const char* to_string(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::selected: return "selected";
    case TraceEvent::Kind::answered: return "answered";
    case TraceEvent::Kind::switched: return "switched";
    case TraceEvent::Kind::finished: return "finished";
  }
  return "?";
}

enum class SessionStatus { active, finished };

inline const char* to_string(SessionStatus s) { return s == SessionStatus::active ? "active" : "finished"; }

class UnknownItem : public std::invalid_argument {
 public:
  explicit UnknownItem(const std::string& id) : std::invalid_argument("unknown item '" + id + "'"), id_(id) {}
  const std::string& item() const { return id_; }

 private:
  std::string id_;
};

class DuplicateAnswer : public std::logic_error {
 public:
  explicit DuplicateAnswer(const std::string& id) : std::logic_error("item '" + id + "' already answered") {}
};

class SessionFinished : public std::logic_error {
 public:
  SessionFinished() : std::logic_error("session is finished") {}
};

struct ReportRow {
  std::string node;
  double mass = 0.0;
  double belief = 0.0;
  double potential_confirm = 0.0;
  double potential_disconfirm = 0.0;
};

struct HierarchyReport {
  std::string hierarchy;
  std::vector<ReportRow> rows;  // Bel descending, then m_T descending, then node id
};

// Single writer: callers serialize submit() per session.
class Session {
 public:
  explicit Session(std::shared_ptr<const Model> model) : Session(model, model->config()) {}

  Session(std::shared_ptr<const Model> model, EngineConfig config)
      : model_(std::move(model)), config_(config), answers_(model_->item_count()) {
    recompute();
    reselect(std::nullopt);
  }

  void submit(const std::string& item_id, AnswerValue value,
              std::chrono::system_clock::time_point at = std::chrono::system_clock::now()) {
    if (status_ == SessionStatus::finished) throw SessionFinished();
    const int item = model_->find_item(item_id);
    if (item < 0) throw UnknownItem(item_id);
    if (answers_[item]) throw DuplicateAnswer(item_id);

    answers_[item] = value;
    history_.push_back({item_id, value, at});
    recompute();
    TraceEvent ev = base_event(TraceEvent::Kind::answered);
    ev.item = item_id;
    ev.value = value;
    trace_.push_back(std::move(ev));

    const std::optional<int> previous = question_ ? std::optional<int>(question_->hierarchy) : std::nullopt;
    if (config_.batch && question_) {
      Question same = make_question(question_->hierarchy, question_->node, question_->increment);
      if (!same.items.empty()) {
        same.increment = table_.hierarchies[same.hierarchy][same.node].total;
        question_ = std::move(same);
        return;
      }
    }
    reselect(previous);
  }

  std::optional<Question> next_question() const { return question_; }

  SessionStatus status() const { return status_; }
  const Model& model() const { return *model_; }
  const std::shared_ptr<const Model>& model_ptr() const { return model_; }
  const EngineConfig& config() const { return config_; }
  const AnswerSet& answers() const { return answers_; }
  const std::vector<Answer>& history() const { return history_; }
  const std::vector<HierarchyEvaluation>& evaluations() const { return evals_; }
  const BeliefState& state(int h) const { return evals_[h].state; }
  const IncrementTable& table() const { return table_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  int step() const { return static_cast<int>(history_.size()); }

  std::vector<HierarchyReport> report() const {
    std::vector<HierarchyReport> out;
    for (int h = 0; h < model_->hierarchy_count(); ++h) {
      const auto& hm = model_->hierarchy(h);
      const auto& e = evals_[h];
      const std::vector<double> bel = beliefs(e.state, hm);
      HierarchyReport r{hm.id(), {}};
      for (int n = 0; n < hm.size(); ++n)
        r.rows.push_back({hm.node(n).id, e.state.mass[n], bel[n], e.potentials.confirm[n], e.potentials.disconfirm[n]});
      std::sort(r.rows.begin(), r.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.belief != b.belief) return a.belief > b.belief;
        if (a.mass != b.mass) return a.mass > b.mass;
        return a.node < b.node;
      });
      out.push_back(std::move(r));
    }
    return out;
  }

  // Rebuilds belief states, potentials and the increment table from the
  // answer set alone.
  void recompute() {
    const auto potentials = potential_masses(*model_, answers_);
    evals_.clear();
    for (int h = 0; h < model_->hierarchy_count(); ++h) {
      const auto& hm = model_->hierarchy(h);
      NodeMasses observed = step1_node_masses(evidence_for(*model_, answers_, h), hm);
      BeliefState state = compute_belief_state(observed, hm);
      evals_.push_back({std::move(state), std::move(observed), potentials[h]});
    }
    table_ = build_increment_table(*model_, evals_, config_);
  }

 private:
  Question make_question(int h, int node, double increment) const {
    Question q{h, node, increment, {}};
    for (const auto& ref : model_->targets_at(h, node)) {
      if (answers_[ref.item]) continue;
      const auto& item = model_->items()[ref.item];
      auto it = std::find_if(q.items.begin(), q.items.end(), [&](const QuestionItem& x) { return x.id == item.id; });
      if (it == q.items.end()) q.items.push_back({item.id, item.prompt, ref.mass});
      else it->mass = std::max(it->mass, ref.mass);
    }
    std::sort(q.items.begin(), q.items.end(), [](const QuestionItem& a, const QuestionItem& b) {
      if (a.mass != b.mass) return a.mass > b.mass;
      return a.id < b.id;
    });
    return q;
  }

  void reselect(std::optional<int> previous_hierarchy) {
    const auto sel = select_next(*model_, table_, config_.epsilon_stop);
    if (!sel) {
      question_.reset();
      status_ = SessionStatus::finished;
      trace_.push_back(base_event(TraceEvent::Kind::finished));
      return;
    }
    question_ = make_question(sel->hierarchy, sel->node, sel->increment);
    const auto& hm = model_->hierarchy(sel->hierarchy);
    if (previous_hierarchy && *previous_hierarchy != sel->hierarchy) {
      TraceEvent sw = base_event(TraceEvent::Kind::switched);
      sw.from_hierarchy = model_->hierarchy(*previous_hierarchy).id();
      sw.hierarchy = hm.id();
      trace_.push_back(std::move(sw));
    }
    TraceEvent ev = base_event(TraceEvent::Kind::selected);
    ev.hierarchy = hm.id();
    ev.node = hm.node(sel->node).id;
    for (const auto& q : question_->items) ev.items.push_back(q.id);
    trace_.push_back(std::move(ev));
  }

  TraceEvent base_event(TraceEvent::Kind kind) const {
    TraceEvent ev;
    ev.kind = kind;
    ev.step = step();
    ev.max_increment = table_.max();
    for (int h = 0; h < model_->hierarchy_count(); ++h) ev.k.push_back({model_->hierarchy(h).id(), evals_[h].state.history});
    return ev;
  }

  std::shared_ptr<const Model> model_;
  EngineConfig config_;
  AnswerSet answers_;
  std::vector<Answer> history_;
  std::vector<HierarchyEvaluation> evals_;
  IncrementTable table_;
  std::optional<Question> question_;
  SessionStatus status_ = SessionStatus::active;
  std::vector<TraceEvent> trace_;
};

inline Session start_session(std::shared_ptr<const Model> model) { return Session(std::move(model)); }

}  // namespace ibig
