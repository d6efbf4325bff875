// ibig: validate knowledge bases, run consultations, check the engine
// against the exact oracle, explain increment tables, serve the HTTP API.
//
// Exit codes: 0 ok, 1 domain violation, 2 input malformation, 3 capability limit.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ibig/consultation.hpp"
#include "ibig/http.hpp"
#include "ibig/io.hpp"
#include "ibig/kb.hpp"
#include "ibig/oracle_check.hpp"
#include "ibig/service.hpp"

namespace {

enum Exit { ok = 0, violation = 1, malformed = 2, capability = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool json_out(const std::string& format) { return format == "json"; }

void print_report(const ibig::ValidationReport& rep, const std::string& format) {
  if (json_out(format)) {
    ibig::ojson j;
    auto list = [](const std::vector<ibig::Violation>& vs) {
      ibig::ojson arr = ibig::ojson::array();
      for (const auto& v : vs) arr.push_back({{"rule", v.rule}, {"location", v.location}, {"message", v.message}});
      return arr;
    };
    j["valid"] = rep.ok();
    j["violations"] = list(rep.violations);
    j["warnings"] = list(rep.warnings);
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const auto& v : rep.violations) std::cout << "violation " << v.rule << " at " << v.location << ": " << v.message << "\n";
  for (const auto& v : rep.warnings) std::cout << "warning " << v.rule << " at " << v.location << ": " << v.message << "\n";
  if (rep.ok()) std::cout << "ok\n";
}

// Loads and validates; prints the report and returns an exit code on failure.
std::optional<int> load_model(const std::string& path, std::shared_ptr<const ibig::Model>& model,
                              const std::string& format, bool quiet_when_valid) {
  ibig::KnowledgeBase kb;
  try {
    kb = ibig::load(read_file(path));
  } catch (const ibig::LoadError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return malformed;
  }
  auto rep = ibig::validate(kb);
  if (!rep.ok() || !quiet_when_valid) print_report(rep, format);
  if (!rep.ok()) return violation;
  model = std::make_shared<const ibig::Model>(std::move(kb));
  return std::nullopt;
}

int cmd_validate(const std::string& kb_path, const std::string& format) {
  std::shared_ptr<const ibig::Model> model;
  if (auto code = load_model(kb_path, model, format, false)) return *code;
  return ok;
}

// Replays answers; returns an exit code on a domain error.
std::optional<int> replay(ibig::Session& session, const std::vector<ibig::ScriptEntry>& script, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (session.status() == ibig::SessionStatus::finished) {
      std::cerr << "session finished; " << (count - i) << " script answer(s) not applied\n";
      return std::nullopt;
    }
    try {
      session.submit(script[i].item, script[i].value);
    } catch (const ibig::UnknownItem& e) {
      std::cerr << "script: " << e.what() << "\n";
      return violation;
    } catch (const ibig::DuplicateAnswer& e) {
      std::cerr << "script: " << e.what() << "\n";
      return violation;
    }
  }
  return std::nullopt;
}

void interact(ibig::Session& session) {
  const auto& model = session.model();
  while (session.status() == ibig::SessionStatus::active) {
    const auto q = session.next_question();
    if (!q || q->items.empty()) break;
    const auto& hm = model.hierarchy(q->hierarchy);
    std::cout << "\n[" << hm.id() << " / " << hm.node(q->node).id << "]  increment " << ibig::format_number(q->increment)
              << "\n";
    const auto& item = q->items.front();
    std::cout << item.prompt << "  (" << item.id << ")  [p]resent / [a]bsent / [u]nknown / [q]uit: " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line) || line == "q" || line == "quit") break;
    auto value = ibig::parse_answer_value(line);
    if (!value) {
      std::cout << "please answer p, a or u\n";
      continue;
    }
    const std::size_t before = session.trace().size();
    session.submit(item.id, *value);
    for (std::size_t i = before; i < session.trace().size(); ++i) {
      const auto& ev = session.trace()[i];
      if (ev.kind == ibig::TraceEvent::Kind::switched)
        std::cout << "-> switching from hierarchy " << ev.from_hierarchy << " to " << ev.hierarchy << "\n";
    }
  }
}

struct ConsultOptions {
  std::string kb;
  std::string script;
  bool interactive = false;
  bool batch = false;
  std::string out = "text";
  std::string trace;
};

int cmd_consult(const ConsultOptions& opt) {
  std::shared_ptr<const ibig::Model> model;
  if (auto code = load_model(opt.kb, model, opt.out, true)) return *code;
  std::vector<ibig::ScriptEntry> script;
  if (!opt.script.empty()) {
    try {
      script = ibig::parse_script(read_file(opt.script));
    } catch (const ibig::ScriptError& e) {
      std::cerr << opt.script << ": " << e.what() << "\n";
      return malformed;
    }
  }
  ibig::EngineConfig config = model->config();
  if (opt.batch) config.batch = true;
  ibig::Session session(model, config);

  if (!opt.script.empty()) {
    if (auto code = replay(session, script, script.size())) return *code;
  }
  if (opt.interactive || opt.script.empty()) interact(session);

  if (!opt.trace.empty()) {
    std::ofstream out(opt.trace, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << opt.trace << "'\n";
      return malformed;
    }
    out << ibig::trace_jsonl(session);
  }
  if (json_out(opt.out)) {
    ibig::ojson j;
    j["report"] = ibig::report_json(session);
    if (opt.trace.empty()) j["trace"] = ibig::trace_json(session);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << ibig::report_text(session);
    if (opt.trace.empty()) std::cout << "trace\n" << ibig::trace_jsonl(session);
  }
  return ok;
}

int cmd_oracle_check(const std::string& kb_path, int trials, std::uint64_t seed, int max_leaves,
                     const std::string& format) {
  std::shared_ptr<const ibig::Model> model;
  if (auto code = load_model(kb_path, model, format, true)) return *code;
  ibig::OracleCheckSummary summary;
  try {
    summary = ibig::run_oracle_check(*model, trials, seed, max_leaves);
  } catch (const ibig::SizeError& e) {
    std::cerr << e.what() << "\n";
    return capability;
  }
  const bool passed = summary.passed();
  if (json_out(format)) {
    ibig::ojson j;
    j["trials"] = summary.trials;
    j["seed"] = seed;
    j["comparisons"] = summary.comparisons;
    j["step1_max_deviation"] = ibig::number_json(summary.step1_deviation);
    j["exactness_max_deviation"] = ibig::number_json(summary.exactness_deviation);
    j["tolerance"] = ibig::oracle_tolerance;
    j["passed"] = passed;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "trials " << summary.trials << ", seed " << seed << ", comparisons " << summary.comparisons << "\n"
              << "step-1 closed form     max deviation " << ibig::format_number(summary.step1_deviation) << "\n"
              << "confirming exactness   max deviation " << ibig::format_number(summary.exactness_deviation) << "\n"
              << (passed ? "PASS" : "FAIL") << " (tolerance " << ibig::format_number(ibig::oracle_tolerance) << ")\n";
  }
  return passed ? ok : violation;
}

int cmd_explain(const std::string& kb_path, const std::string& script_path, int step, const std::string& format) {
  std::shared_ptr<const ibig::Model> model;
  if (auto code = load_model(kb_path, model, format, true)) return *code;
  std::vector<ibig::ScriptEntry> script;
  try {
    script = ibig::parse_script(read_file(script_path));
  } catch (const ibig::ScriptError& e) {
    std::cerr << script_path << ": " << e.what() << "\n";
    return malformed;
  }
  if (step < 0 || step > static_cast<int>(script.size())) {
    std::cerr << "step " << step << " out of range 0.." << script.size() << "\n";
    return malformed;
  }
  ibig::Session session(model);
  if (auto code = replay(session, script, static_cast<std::size_t>(step))) return *code;
  if (session.step() != step) {
    std::cerr << "session finished after " << session.step() << " answers; step " << step << " not reached\n";
    return malformed;
  }
  if (json_out(format)) std::cout << ibig::table_json(session).dump(2) << "\n";
  else std::cout << ibig::table_text(session);
  return ok;
}

struct ServeOptions {
  std::string kb;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;
  std::string ui_dir;
  long ttl_seconds = 24 * 3600;
};

int cmd_serve(const ServeOptions& opt) {
  ibig::ServiceOptions svc_opt;
  svc_opt.idle_ttl = std::chrono::seconds(opt.ttl_seconds);
  std::unique_ptr<ibig::ConsultService> service;
  try {
    const std::string text = read_file(opt.kb);
    auto model = std::make_shared<const ibig::Model>(ibig::load(text));
    service = std::make_unique<ibig::ConsultService>(model, ibig::kb_fingerprint(text), svc_opt);
  } catch (const std::exception& e) {
    std::cerr << "knowledge base not loaded: " << e.what() << "\n";
    service = ibig::ConsultService::unavailable(e.what(), svc_opt);
  }
  httplib::Server server;
  ibig::mount(server, *service, {opt.cors_origin, opt.ui_dir});
  std::cerr << "listening on " << opt.host << ":" << opt.port << "\n";
  if (!server.listen(opt.host, opt.port)) {
    std::cerr << "cannot listen on " << opt.host << ":" << opt.port << "\n";
    return capability;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential consultation over competing hierarchies"};
  app.require_subcommand(1);

  std::string out = "text";
  auto out_check = CLI::IsMember({"text", "json"});

  std::string validate_kb;
  auto* validate = app.add_subcommand("validate", "Check a knowledge base against its structural rules");
  validate->add_option("kb", validate_kb, "Knowledge base (.ibig.json)")->required()->check(CLI::ExistingFile);
  validate->add_option("--out", out, "Output format")->check(out_check);

  ConsultOptions consult_opt;
  auto* consult = app.add_subcommand("consult", "Run a consultation (scripted or interactive)");
  consult->add_option("kb", consult_opt.kb, "Knowledge base")->required()->check(CLI::ExistingFile);
  consult->add_option("--script", consult_opt.script, "JSON answer script")->check(CLI::ExistingFile);
  consult->add_flag("--interactive", consult_opt.interactive, "Prompt on the terminal");
  consult->add_flag("--batch", consult_opt.batch, "Answer every item of a selected node before re-selecting");
  consult->add_option("--out", consult_opt.out, "Output format")->check(out_check);
  consult->add_option("--trace", consult_opt.trace, "Write the trace as JSON lines to this file");

  ServeOptions serve_opt;
  auto* serve = app.add_subcommand("serve", "Serve the session API over HTTP");
  serve->add_option("kb", serve_opt.kb, "Knowledge base")->required();
  serve->add_option("--port", serve_opt.port, "TCP port")->required();
  serve->add_option("--host", serve_opt.host, "Bind address");
  serve->add_option("--cors-origin", serve_opt.cors_origin, "Allowed CORS origin for the UI");
  serve->add_option("--ui-dir", serve_opt.ui_dir, "Static UI bundle served under /ui")->check(CLI::ExistingDirectory);
  serve->add_option("--ttl", serve_opt.ttl_seconds, "Idle session lifetime in seconds");

  std::string oracle_kb;
  int trials = 500;
  std::uint64_t seed = 1;
  int max_leaves = ibig::default_oracle_leaf_limit;
  auto* oracle = app.add_subcommand("oracle-check", "Compare the engine with exact Dempster combination");
  oracle->add_option("kb", oracle_kb, "Knowledge base")->required()->check(CLI::ExistingFile);
  oracle->add_option("--trials", trials, "Random evidence draws")->check(CLI::NonNegativeNumber);
  oracle->add_option("--seed", seed, "RNG seed");
  oracle->add_option("--max-leaves", max_leaves, "Largest frame the oracle accepts")->check(CLI::Range(1, 24));
  oracle->add_option("--out", out, "Output format")->check(out_check);

  std::string explain_kb, explain_script;
  int explain_step = 0;
  auto* explain = app.add_subcommand("explain", "Dump the increment table at one step of a scripted run");
  explain->add_option("kb", explain_kb, "Knowledge base")->required()->check(CLI::ExistingFile);
  explain->add_option("--script", explain_script, "JSON answer script")->required()->check(CLI::ExistingFile);
  explain->add_option("--step", explain_step, "Number of script answers applied")->required();
  explain->add_option("--out", out, "Output format")->check(out_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return malformed;
  }

  try {
    if (*validate) return cmd_validate(validate_kb, out);
    if (*consult) return cmd_consult(consult_opt);
    if (*serve) return cmd_serve(serve_opt);
    if (*oracle) return cmd_oracle_check(oracle_kb, trials, seed, max_leaves, out);
    if (*explain) return cmd_explain(explain_kb, explain_script, explain_step, out);
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
    return malformed;
  } catch (const ibig::ConflictError& e) {
    std::cerr << e.what() << "\n";
    return violation;
  }
  return ok;
}
