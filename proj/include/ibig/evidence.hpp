#pragma once
// Answers to data items and the evidence they induce.

#include <optional>
#include <string>
#include <vector>

#include "ibig/belief.hpp"
#include "ibig/kb.hpp"

namespace ibig {

enum class AnswerValue { present, absent, unknown };

inline const char* to_string(AnswerValue v) {
  switch (v) {
    case AnswerValue::present: return "present";
    case AnswerValue::absent: return "absent";
    case AnswerValue::unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<AnswerValue> parse_answer_value(const std::string& s) {
  if (s == "present" || s == "p") return AnswerValue::present;
  if (s == "absent" || s == "a") return AnswerValue::absent;
  if (s == "unknown" || s == "u") return AnswerValue::unknown;
  return std::nullopt;
}

// Indexed by model item index; empty = not yet asked.
using AnswerSet = std::vector<std::optional<AnswerValue>>;

// "present" activates the confirming targets, "absent" the non-confirming
// ones, "unknown" nothing. Items are visited in model order, so the result
// does not depend on the order answers arrived in.
inline EvidenceInput evidence_for(const Model& model, const AnswerSet& answers, int hierarchy) {
  EvidenceInput ev(model.hierarchy(hierarchy).size());
  for (int i = 0; i < model.item_count(); ++i) {
    if (!answers[i] || *answers[i] == AnswerValue::unknown) continue;
    const Polarity active = *answers[i] == AnswerValue::present ? Polarity::confirm : Polarity::disconfirm;
    const auto& item = model.items()[i];
    for (const auto& t : item.targets) {
      if (t.hierarchy != hierarchy || t.polarity != active) continue;
      auto& node = ev.nodes[t.node];
      (active == Polarity::confirm ? node.confirming : node.disconfirming).push_back({t.mass, item.id});
    }
  }
  return ev;
}

}  // namespace ibig
