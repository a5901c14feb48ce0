// Copyright 2026 The pickcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hmi/http_server.hpp"

#include "common/error.hpp"
#include "httplib.h"

namespace pickcell::hmi {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json");
}

void send_reply(httplib::Response& res, const Reply& r) { send_json(res, r.status, r.body); }

}  // namespace

HttpServer::HttpServer(HmiService& service, HttpOptions opts)
    : service_(service), opts_(opts), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Get("/api/state", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, service_.snapshot());
  });
  s.Get("/api/catalog", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, service_.catalog_json());
  });
  s.Get("/api/metrics", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, service_.metrics_json());
  });
  s.Post("/api/request", [this](const httplib::Request& req, httplib::Response& res) {
    send_reply(res, service_.handle_request(req.body));
  });
  s.Post("/api/estop", [this](const httplib::Request&, httplib::Response& res) {
    send_reply(res, service_.handle_estop());
  });
  s.Post("/api/reset", [this](const httplib::Request&, httplib::Response& res) {
    send_reply(res, service_.handle_reset());
  });
  s.Get("/api/overlay/latest.png", [this](const httplib::Request&, httplib::Response& res) {
    auto png = service_.overlay();
    if (!png) {
      send_json(res, 404, {{"error", "no overlay yet"}});
      return;
    }
    res.set_content(std::string(png->begin(), png->end()), "image/png");
  });
  s.Get("/api/events", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = service_.subscribe();
    const auto keepalive = opts_.keepalive;
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [this, sub, keepalive](std::size_t, httplib::DataSink& sink) {
          if (sub->closed()) {
            sink.done();
            return true;
          }
          auto line = sub->next(keepalive);
          if (!line) {
            if (sub->closed()) {
              sink.done();
              return true;
            }
            line = canonical_dump(Json{{"type", "heartbeat"}, {"snapshot", service_.snapshot()}});
          }
          *line += '\n';
          return sink.write(line->data(), line->size());
        },
        [this, sub](bool) { service_.broadcaster().unsubscribe(sub); });
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) fail(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() {
  service_.broadcaster().close_all();
  if (server_) server_->stop();
}

}  // namespace pickcell::hmi
