#pragma once
// Binds ConsultService to cpp-httplib routes.

#include <string>

#include <httplib.h>

#include "ibig/service.hpp"

namespace ibig {

struct HttpOptions {
  std::string cors_origin;  // empty: no CORS headers
  std::string ui_dir;       // empty: nothing mounted at /ui
};

inline void mount(httplib::Server& server, ConsultService& service, const HttpOptions& options = {}) {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  const std::string sid = "([0-9a-f]{32})";

  server.Get("/healthz", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.healthz());
  });
  server.Post("/sessions", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.create_session());
  });
  server.Post("/sessions/" + sid + "/answers", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.submit_answer(req.matches[1], req.body));
  });
  server.Get("/sessions/" + sid + "/belief", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.belief(req.matches[1]));
  });
  server.Get("/sessions/" + sid + "/increments", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.increments(req.matches[1]));
  });
  server.Get("/sessions/" + sid + "/trace", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.trace(req.matches[1]));
  });

  if (!options.cors_origin.empty()) {
    const std::string origin = options.cors_origin;
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
  if (!options.ui_dir.empty()) server.set_mount_point("/ui", options.ui_dir);
}

}  // namespace ibig
