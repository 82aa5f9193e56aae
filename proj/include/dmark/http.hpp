#pragma once

// HTTP alternative to the stdio transport: the same JSON bodies POSTed to
// /query. HTTP pairs request and response on its own, but ids are kept in
// the bodies so both transports stay byte-compatible.

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "dmark/adapter.hpp"
#include "dmark/serve.hpp"

namespace dmark {

class HttpAdapter : public ModelAdapter {
 public:
  explicit HttpAdapter(const std::string& base_url, long timeout_ms = -1)
      : url_(base_url), client_(base_url) {
    const auto timeout = adapter_detail::resolve_timeout(timeout_ms);
    client_.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                                   (timeout.count() % 1000) * 1000);
    client_.set_read_timeout(timeout.count() / 1000, (timeout.count() % 1000) * 1000);
  }

  AdapterResult query_text(const std::string& task, const std::string& text) override {
    nlohmann::ordered_json payload;
    payload["text"] = text;
    return post(task, payload, false);
  }

  AdapterResult query_image(const std::string& task, const std::string& pgm_bytes) override {
    nlohmann::ordered_json payload;
    payload["image_pgm_b64"] = adapter_detail::base64_encode(pgm_bytes);
    return post(task, payload, true);
  }

  std::string describe() const override { return "http: " + url_; }

 private:
  AdapterResult post(const std::string& task, const nlohmann::ordered_json& payload,
                     bool rendered) {
    nlohmann::ordered_json request;
    request["id"] = next_id_++;
    request["task"] = task;
    request["payload"] = payload;
    request["render"] = rendered;
    auto res = client_.Post("/query", request.dump(), "application/json");
    if (!res) throw AdapterError("http request failed: " + url_);
    if (res->status != 200)
      throw AdapterError("http status " + std::to_string(res->status) + ": " + res->body);
    nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded()) throw AdapterError("malformed http response: " + res->body);
    return adapter_detail::parse_response_body(body);
  }

  std::string url_;
  httplib::Client client_;
  std::uint64_t next_id_ = 1;
};

// Blocks serving the toy model until the process is terminated.
inline bool run_http_server(const std::string& model, const std::string& host, int port) {
  httplib::Server server;
  server.Post("/query", [model](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json request = nlohmann::json::parse(req.body, nullptr, false);
    nlohmann::ordered_json response =
        request.is_discarded()
            ? serve_detail::error_response(nlohmann::json(), "malformed request body")
            : handle_toy_request(request, model);
    res.set_content(response.dump(), "application/json");
  });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  return server.listen(host, port);
}

} // namespace dmark
