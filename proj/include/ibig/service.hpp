#pragma once
// Session-oriented JSON facade over Session. Transport independent: each
// handler returns a status code and a JSON body; http.hpp binds them to
// routes. Numbers are rendered by io.hpp only.

#include <chrono>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <openssl/evp.h>
#include <openssl/rand.h>

#include "ibig/consultation.hpp"
#include "ibig/io.hpp"

namespace ibig {

inline std::string to_hex(const unsigned char* data, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

// SHA-256 of the KB document bytes.
inline std::string kb_fingerprint(const std::string& document) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(document.data(), document.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  return to_hex(digest, len);
}

// 128 random bits from the OpenSSL CSPRNG.
inline std::string new_session_id() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof(bytes)) != 1) throw std::runtime_error("RAND_bytes failed");
  return to_hex(bytes, sizeof(bytes));
}

inline std::string iso8601(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ServiceResponse {
  int status = 200;
  ojson body;
};

struct ServiceOptions {
  std::chrono::seconds idle_ttl{24 * 3600};
  std::function<std::chrono::system_clock::time_point()> clock = [] { return std::chrono::system_clock::now(); };
};

class ConsultService {
 public:
  ConsultService(std::shared_ptr<const Model> model, std::string fingerprint, ServiceOptions options = {})
      : model_(std::move(model)), fingerprint_(std::move(fingerprint)), options_(std::move(options)) {}

  // A server whose KB failed to load: health and session creation report 503.
  static std::unique_ptr<ConsultService> unavailable(std::string reason, ServiceOptions options = {}) {
    auto s = std::make_unique<ConsultService>(nullptr, "", std::move(options));
    s->load_error_ = std::move(reason);
    return s;
  }

  ServiceResponse healthz() const {
    if (!model_) return {503, {{"status", "error"}, {"error", load_error_}}};
    return {200, {{"status", "ok"}, {"kb", fingerprint_}}};
  }

  ServiceResponse create_session() {
    if (!model_) return error(503, "knowledge base not loaded: " + load_error_);
    const auto now = options_.clock();
    expire_idle(now);
    auto entry = std::make_shared<Entry>(Session(model_), now);
    std::string id;
    {
      std::lock_guard lock(mutex_);
      do id = new_session_id();
      while (sessions_.count(id));
      sessions_.emplace(id, entry);
    }
    std::lock_guard lock(entry->mutex);
    ojson body;
    body["session_id"] = id;
    body["kb"] = fingerprint_;
    body["status"] = to_string(entry->session.status());
    body["created"] = iso8601(entry->created);
    body["updated"] = iso8601(entry->updated);
    body["question"] = question_json(entry->session);
    return {201, std::move(body)};
  }

  ServiceResponse submit_answer(const std::string& id, const std::string& request_body) {
    auto entry = find(id);
    if (!entry) return error(404, "unknown session '" + id + "'");

    nlohmann::json req;
    try {
      req = nlohmann::json::parse(request_body);
    } catch (const nlohmann::json::parse_error&) {
      return error(400, "request body is not valid JSON");
    }
    if (!req.is_object() || !req.contains("item") || !req["item"].is_string() || !req.contains("value") ||
        !req["value"].is_string())
      return error(422, "expected {\"item\": string, \"value\": \"present\"|\"absent\"|\"unknown\"}");
    const std::string item = req["item"].get<std::string>();
    const std::string text = req["value"].get<std::string>();
    const auto value = parse_answer_value(text);
    if (!value || text.size() == 1) return error(422, "value must be present, absent or unknown");

    std::lock_guard lock(entry->mutex);
    Session& s = entry->session;
    const std::size_t before = s.trace().size();
    try {
      s.submit(item, *value);
    } catch (const UnknownItem& e) {
      return error(422, e.what());
    } catch (const DuplicateAnswer& e) {
      return error(409, e.what());
    } catch (const SessionFinished& e) {
      return error(409, e.what());
    }
    entry->updated = options_.clock();

    bool switched = false;
    for (std::size_t i = before; i < s.trace().size(); ++i)
      switched = switched || s.trace()[i].kind == TraceEvent::Kind::switched;

    ojson body;
    body["session_id"] = id;
    body["status"] = to_string(s.status());
    body["step"] = s.step();
    body["question"] = question_json(s);
    body["switched"] = switched;
    body["belief"] = belief_summary(s);
    body["updated"] = iso8601(entry->updated);
    return {200, std::move(body)};
  }

  ServiceResponse belief(const std::string& id) {
    return with_session(id, [&](const Session& s) {
      ojson body = report_json(s);
      body["session_id"] = id;
      return body;
    });
  }

  ServiceResponse increments(const std::string& id) {
    return with_session(id, [&](const Session& s) {
      ojson body = table_json(s);
      body["session_id"] = id;
      return body;
    });
  }

  ServiceResponse trace(const std::string& id) {
    return with_session(id, [&](const Session& s) {
      ojson body;
      body["session_id"] = id;
      body["status"] = to_string(s.status());
      body["events"] = trace_json(s);
      return body;
    });
  }

  // Drops sessions idle for longer than the TTL.
  void expire_idle(std::chrono::system_clock::time_point now) {
    std::lock_guard lock(mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock entry_lock(it->second->mutex, std::try_to_lock);
      if (entry_lock.owns_lock() && now - it->second->updated > options_.idle_ttl) it = sessions_.erase(it);
      else ++it;
    }
  }

  std::size_t session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

  const std::string& fingerprint() const { return fingerprint_; }

 private:
  struct Entry {
    Entry(Session s, std::chrono::system_clock::time_point now) : session(std::move(s)), created(now), updated(now) {}
    std::mutex mutex;
    Session session;
    std::chrono::system_clock::time_point created;
    std::chrono::system_clock::time_point updated;
  };

  static ServiceResponse error(int status, const std::string& message) { return {status, {{"error", message}}}; }

  static ojson belief_summary(const Session& s) {
    ojson out = ojson::array();
    for (int h = 0; h < s.model().hierarchy_count(); ++h) {
      const auto& hm = s.model().hierarchy(h);
      const auto& state = s.state(h);
      const auto bel = beliefs(state, hm);
      ojson nodes = ojson::array();
      for (int n = 0; n < hm.size(); ++n)
        nodes.push_back({{"node", hm.node(n).id}, {"mass", number_json(state.mass[n])}, {"belief", number_json(bel[n])}});
      out.push_back({{"hierarchy", hm.id()}, {"nodes", std::move(nodes)}});
    }
    return out;
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    expire_idle(options_.clock());
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  template <typename F>
  ServiceResponse with_session(const std::string& id, F&& render) {
    auto entry = find(id);
    if (!entry) return error(404, "unknown session '" + id + "'");
    std::lock_guard lock(entry->mutex);
    return {200, render(entry->session)};
  }

  std::shared_ptr<const Model> model_;
  std::string fingerprint_;
  std::string load_error_;
  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace ibig
