#pragma once
// JSON and text renderings of sessions. Every number leaves through
// format_number/round12 so CLI and HTTP output carry identical digits.

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibig/common.hpp"
#include "ibig/consultation.hpp"

namespace ibig {

using ojson = nlohmann::ordered_json;

inline ojson number_json(double v) { return round12(v); }

inline ojson k_json(const std::vector<KSnapshot>& snapshots, const Model& model) {
  ojson out = ojson::object();
  for (std::size_t h = 0; h < snapshots.size(); ++h) {
    ojson list = ojson::array();
    const auto& hm = model.hierarchy(static_cast<int>(h));
    for (const auto& n : snapshots[h].history) {
      ojson e;
      e["stage"] = n.stage == Normalization::Stage::confirm ? "confirm" : "disconfirm";
      if (n.node >= 0) e["node"] = hm.node(n.node).id;
      e["k"] = number_json(n.k);
      list.push_back(std::move(e));
    }
    out[snapshots[h].hierarchy] = std::move(list);
  }
  return out;
}

inline ojson to_json(const TraceEvent& ev, const Model& model) {
  ojson j;
  j["event"] = to_string(ev.kind);
  j["step"] = ev.step;
  switch (ev.kind) {
    case TraceEvent::Kind::selected:
      j["hierarchy"] = ev.hierarchy;
      j["node"] = ev.node;
      j["items"] = ev.items;
      break;
    case TraceEvent::Kind::answered:
      j["item"] = ev.item;
      j["value"] = to_string(ev.value);
      break;
    case TraceEvent::Kind::switched:
      j["from"] = ev.from_hierarchy;
      j["to"] = ev.hierarchy;
      break;
    case TraceEvent::Kind::finished:
      break;
  }
  j["max_increment"] = number_json(ev.max_increment);
  j["k"] = k_json(ev.k, model);
  return j;
}

inline ojson trace_json(const Session& s) {
  ojson arr = ojson::array();
  for (const auto& ev : s.trace()) arr.push_back(to_json(ev, s.model()));
  return arr;
}

// One event per line.
inline std::string trace_jsonl(const Session& s) {
  std::string out;
  for (const auto& ev : s.trace()) out += to_json(ev, s.model()).dump() + "\n";
  return out;
}

inline ojson question_json(const Session& s) {
  const auto q = s.next_question();
  if (!q) return nullptr;
  const auto& hm = s.model().hierarchy(q->hierarchy);
  ojson j;
  j["hierarchy"] = hm.id();
  j["node"] = hm.node(q->node).id;
  j["increment"] = number_json(q->increment);
  ojson items = ojson::array();
  for (const auto& it : q->items) items.push_back({{"id", it.id}, {"prompt", it.prompt}, {"mass", number_json(it.mass)}});
  j["items"] = std::move(items);
  return j;
}

inline ojson report_json(const Session& s) {
  ojson j;
  j["status"] = to_string(s.status());
  j["step"] = s.step();
  ojson hs = ojson::array();
  for (const auto& r : s.report()) {
    ojson rows = ojson::array();
    for (const auto& row : r.rows)
      rows.push_back({{"node", row.node},
                      {"mass", number_json(row.mass)},
                      {"belief", number_json(row.belief)},
                      {"potential_confirm", number_json(row.potential_confirm)},
                      {"potential_disconfirm", number_json(row.potential_disconfirm)}});
    hs.push_back({{"hierarchy", r.hierarchy}, {"rows", std::move(rows)}});
  }
  j["hierarchies"] = std::move(hs);
  return j;
}

inline std::string report_text(const Session& s) {
  std::ostringstream os;
  os << "status " << to_string(s.status()) << " after " << s.step() << " answers\n";
  for (const auto& r : s.report()) {
    os << "hierarchy " << r.hierarchy << "\n";
    os << "  " << std::left << std::setw(20) << "node" << std::setw(16) << "m_T" << std::setw(16) << "Bel"
       << std::setw(16) << "pot+" << "pot-\n";
    for (const auto& row : r.rows)
      os << "  " << std::setw(20) << row.node << std::setw(16) << format_number(row.mass) << std::setw(16)
         << format_number(row.belief) << std::setw(16) << format_number(row.potential_confirm)
         << format_number(row.potential_disconfirm) << "\n";
  }
  return os.str();
}

struct TableEntry {
  int hierarchy;
  int node;
  const NodeIncrement* increment;
};

// Non-empty table entries, totals descending, ties by (hierarchy id, node id).
inline std::vector<TableEntry> ranked_entries(const Model& model, const IncrementTable& table) {
  std::vector<TableEntry> out;
  for (int h = 0; h < static_cast<int>(table.hierarchies.size()); ++h)
    for (int n = 0; n < static_cast<int>(table.hierarchies[h].size()); ++n)
      if (!table.hierarchies[h][n].contributions.empty()) out.push_back({h, n, &table.hierarchies[h][n]});
  std::sort(out.begin(), out.end(), [&](const TableEntry& a, const TableEntry& b) {
    if (a.increment->total != b.increment->total) return a.increment->total > b.increment->total;
    const auto& ha = model.hierarchy(a.hierarchy).id();
    const auto& hb = model.hierarchy(b.hierarchy).id();
    if (ha != hb) return ha < hb;
    return model.hierarchy(a.hierarchy).node(a.node).id < model.hierarchy(b.hierarchy).node(b.node).id;
  });
  return out;
}

inline ojson table_json(const Session& s) {
  const Model& model = s.model();
  ojson j;
  j["step"] = s.step();
  j["max"] = number_json(s.table().max());
  ojson nodes = ojson::array();
  for (const auto& e : ranked_entries(model, s.table())) {
    const auto& hm = model.hierarchy(e.hierarchy);
    ojson contribs = ojson::array();
    for (const auto& c : e.increment->contributions)
      contribs.push_back(
          {{"source", hm.node(c.source).id}, {"equation", to_string(c.equation)}, {"value", number_json(c.value)}});
    nodes.push_back({{"hierarchy", hm.id()},
                     {"node", hm.node(e.node).id},
                     {"total", number_json(e.increment->total)},
                     {"contributions", std::move(contribs)}});
  }
  j["nodes"] = std::move(nodes);
  return j;
}

inline std::string table_text(const Session& s) {
  const Model& model = s.model();
  std::ostringstream os;
  os << "increments at step " << s.step() << " (max " << format_number(s.table().max()) << ")\n";
  for (const auto& e : ranked_entries(model, s.table())) {
    const auto& hm = model.hierarchy(e.hierarchy);
    os << hm.id() << "/" << hm.node(e.node).id << "  total " << format_number(e.increment->total) << "\n";
    std::vector<const Contribution*> sorted;
    for (const auto& c : e.increment->contributions) sorted.push_back(&c);
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->value > b->value; });
    for (const auto* c : sorted)
      os << "    " << std::left << std::setw(10) << to_string(c->equation) << "from " << std::setw(20)
         << hm.node(c->source).id << format_number(c->value) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Scripts: [{"item": id, "value": "present"|"absent"|"unknown"}, ...]

struct ScriptEntry {
  std::string item;
  AnswerValue value;
};

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<ScriptEntry> parse_script(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScriptError(std::string("script: ") + e.what());
  }
  if (!doc.is_array()) throw ScriptError("script: expected a JSON array");
  std::vector<ScriptEntry> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = "script[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("item") || !e["item"].is_string() || !e.contains("value") || !e["value"].is_string())
      throw ScriptError(where + ": expected {\"item\": string, \"value\": string}");
    auto v = parse_answer_value(e["value"].get<std::string>());
    if (!v || e["value"].get<std::string>().size() == 1)
      throw ScriptError(where + ": value must be present, absent or unknown");
    out.push_back({e["item"].get<std::string>(), *v});
  }
  return out;
}

inline std::string script_json(const std::vector<ScriptEntry>& script) {
  ojson arr = ojson::array();
  for (const auto& e : script) arr.push_back({{"item", e.item}, {"value", to_string(e.value)}});
  return arr.dump(2) + "\n";
}

// The answered events of a trace, as a replayable script.
inline std::vector<ScriptEntry> script_from_trace(const nlohmann::json& events) {
  std::vector<ScriptEntry> out;
  for (const auto& ev : events) {
    if (ev.value("event", "") != "answered") continue;
    out.push_back({ev.at("item").get<std::string>(), *parse_answer_value(ev.at("value").get<std::string>())});
  }
  return out;
}

}  // namespace ibig
