#pragma once

// Black-box model boundary. Requests and responses are single-line JSON
// objects; the same bodies travel over a child process's standard streams or
// HTTP POST. The attack code only ever sees AdapterResult, so toy and real
// models are indistinguishable to it.
//
// Wire format, one object per LF-terminated line:
//   request:  {"id":N, "task":"classify"|"generate",
//              "payload":{"text":...} | {"image_pgm_b64":...}, "render":bool}
//   response: {"id":N, "output":"..."} or {"id":N, "probs":{label:p,...}}
//             or {"id":N, "error":"..."}

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dmark/render.hpp"

namespace dmark {

class AdapterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdapterResult {
  std::optional<std::string> output;    // generate
  std::map<std::string, double> probs;  // classify
};

namespace adapter_detail {

inline const char* kB64Chars =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out.push_back(kB64Chars[(v >> 6) & 63]);
    out.push_back(kB64Chars[v & 63]);
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out.push_back(kB64Chars[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline std::string base64_decode(std::string_view text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  unsigned buffer = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = value_of(c);
    if (v < 0) throw AdapterError("invalid base64 payload");
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

// Default 30 s; DIACRITIC_ADAPTER_TIMEOUT_MS overrides any configured value.
inline std::chrono::milliseconds resolve_timeout(long configured_ms) {
  if (const char* env = std::getenv("DIACRITIC_ADAPTER_TIMEOUT_MS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return std::chrono::milliseconds(v);
  }
  return std::chrono::milliseconds(configured_ms > 0 ? configured_ms : 30000);
}

}  // namespace adapter_detail

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual AdapterResult query_text(const std::string& task, const std::string& text) = 0;
  virtual AdapterResult query_image(const std::string& task, const std::string& pgm_bytes) = 0;
  virtual std::string describe() const = 0;
};

namespace adapter_detail {

inline AdapterResult parse_response_body(const nlohmann::json& body) {
  if (body.contains("error") && !body["error"].is_null())
    throw AdapterError("model error: " + body["error"].get<std::string>());
  AdapterResult result;
  if (body.contains("output")) {
    result.output = body["output"].get<std::string>();
    return result;
  }
  if (body.contains("probs")) {
    double sum = 0.0;
    for (const auto& [label, p] : body["probs"].items()) {
      result.probs[label] = p.get<double>();
      sum += p.get<double>();
    }
    if (result.probs.empty() || sum < 1.0 - 1e-6 || sum > 1.0 + 1e-6)
      throw AdapterError("classify probabilities do not sum to 1");
    return result;
  }
  throw AdapterError("response carries neither output nor probs");
}

}  // namespace adapter_detail

// Byte stream carrying one JSON object per line. Implementations add the
// trailing newline themselves. shutdown() must unblock a concurrent
// receive() (making it return false) without destroying the object.
class LineTransport {
 public:
  virtual ~LineTransport() = default;
  virtual void send(const std::string& line) = 0;
  virtual bool receive(std::string& line) = 0;  // blocking; false on EOF
  virtual bool restart() = 0;                   // false if unsupported/failed
  virtual void shutdown() = 0;
  virtual std::string describe() const = 0;
};

// Request/response matching over a LineTransport. Multiple requests may be in
// flight; responses are matched by id, so out-of-order arrival is fine. On
// transport EOF the channel is restarted once and in-flight requests are
// resent; a second failure is fatal for the adapter.
class LineProtocolAdapter : public ModelAdapter {
 public:
  explicit LineProtocolAdapter(std::unique_ptr<LineTransport> transport,
                               long timeout_ms = -1)
      : transport_(std::move(transport)),
        timeout_(adapter_detail::resolve_timeout(timeout_ms)) {
    reader_ = std::thread([this] { read_loop(); });
  }

  ~LineProtocolAdapter() override {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      shutting_down_ = true;
    }
    transport_->shutdown();  // unblocks the reader's receive()
    if (reader_.joinable()) reader_.join();
  }

  AdapterResult query_text(const std::string& task, const std::string& text) override {
    nlohmann::ordered_json payload;
    payload["text"] = text;
    return query(task, payload, false);
  }

  AdapterResult query_image(const std::string& task, const std::string& pgm_bytes) override {
    nlohmann::ordered_json payload;
    payload["image_pgm_b64"] = adapter_detail::base64_encode(pgm_bytes);
    return query(task, payload, true);
  }

  std::string describe() const override {
    return transport_ ? transport_->describe() : "closed";
  }

 private:
  struct Pending {
    std::string request_line;  // kept for resend-after-restart
    nlohmann::json response;
    bool done = false;
    bool failed = false;
    std::string error;
  };

  AdapterResult query(const std::string& task, const nlohmann::ordered_json& payload,
                      bool rendered) {
    nlohmann::ordered_json request;
    std::uint64_t id;
    std::shared_ptr<Pending> slot = std::make_shared<Pending>();
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (dead_) throw AdapterError("adapter is down: " + last_error_);
      id = next_id_++;
      request["id"] = id;
      request["task"] = task;
      request["payload"] = payload;
      request["render"] = rendered;
      slot->request_line = request.dump();
      pending_[id] = slot;
    }

    try {
      std::lock_guard<std::mutex> lock(send_mutex_);
      transport_->send(slot->request_line);
    } catch (const std::exception&) {
      // The reader loop notices the broken channel and either restarts (and
      // resends this very request) or fails all pending entries; wait for it.
    }

    std::unique_lock<std::mutex> lock(mutex_);
    const bool completed = cv_.wait_for(lock, timeout_, [&] { return slot->done; });
    pending_.erase(id);
    if (!completed) throw AdapterError("adapter timeout after " +
                                       std::to_string(timeout_.count()) + " ms");
    if (slot->failed) throw AdapterError(slot->error);
    return adapter_detail::parse_response_body(slot->response);
  }

  void read_loop() {
    std::string line;
    while (true) {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        if (shutting_down_ || dead_) return;
      }
      if (transport_->receive(line)) {
        dispatch_line(line);
        continue;
      }
      // Channel closed underneath us.
      bool attempt_restart = false;
      std::vector<std::string> to_resend;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        if (shutting_down_) return;
        if (!restart_used_) {
          restart_used_ = true;
          attempt_restart = true;
          for (auto& [id, slot] : pending_) to_resend.push_back(slot->request_line);
        }
      }
      if (attempt_restart) {
        // send_mutex_ keeps concurrent query threads off the transport while
        // it is torn down and replaced.
        std::lock_guard<std::mutex> send_lock(send_mutex_);
        bool ok = transport_->restart();
        if (ok) {
          try {
            for (const std::string& req : to_resend) transport_->send(req);
          } catch (const std::exception& e) {
            fail_all(std::string("resend after restart failed: ") + e.what());
            return;
          }
          continue;
        }
      }
      fail_all("adapter channel closed (" + transport_->describe() + ")");
      return;
    }
  }

  void dispatch_line(const std::string& line) {
    nlohmann::json body = nlohmann::json::parse(line, nullptr, false);
    if (body.is_discarded() || !body.contains("id") ||
        !body["id"].is_number_unsigned()) {
      fail_all("malformed response line: " + line);
      return;
    }
    const std::uint64_t id = body["id"].get<std::uint64_t>();
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = pending_.find(id);
    if (it == pending_.end()) return;  // response to an abandoned (timed-out) id
    it->second->response = std::move(body);
    it->second->done = true;
    cv_.notify_all();
  }

  void fail_all(const std::string& message) {
    std::lock_guard<std::mutex> lock(mutex_);
    dead_ = true;
    last_error_ = message;
    for (auto& [id, slot] : pending_) {
      slot->failed = true;
      slot->error = message;
      slot->done = true;
    }
    cv_.notify_all();
  }

  std::unique_ptr<LineTransport> transport_;
  std::chrono::milliseconds timeout_;
  std::thread reader_;
  std::mutex mutex_;
  std::mutex send_mutex_;
  std::condition_variable cv_;
  std::map<std::uint64_t, std::shared_ptr<Pending>> pending_;
  std::uint64_t next_id_ = 1;
  bool restart_used_ = false;
  bool dead_ = false;
  bool shutting_down_ = false;
  std::string last_error_;
};

// Chunks `text`, renders every chunk, sends one image request per canvas and
// reassembles generate outputs along the plan. Classify answers cannot be
// combined across canvases, so classification demands a single chunk.
inline AdapterResult query_rendered(ModelAdapter& adapter, const std::string& task,
                                    const std::string& text, unsigned width_cells,
                                    std::size_t max_canvases = 64) {
  const ChunkPlan plan = chunk(text, width_cells);
  if (plan.chunks.empty()) {
    // Whitespace-only input renders nothing; treat as one blank canvas.
    const Canvas cv = render("", width_cells);
    return adapter.query_image(task, encode_pgm(cv));
  }
  if (plan.chunks.size() > max_canvases)
    throw AdapterError("input needs " + std::to_string(plan.chunks.size()) +
                       " canvases, limit is " + std::to_string(max_canvases));
  if (task == "classify" && plan.chunks.size() != 1)
    throw AdapterError("classify over rendered input requires a single canvas");

  std::vector<std::string> outputs;
  outputs.reserve(plan.chunks.size());
  AdapterResult last;
  for (const std::string& piece : plan.chunks) {
    const Canvas cv = render(piece, width_cells);
    last = adapter.query_image(task, encode_pgm(cv));
    if (task == "generate") {
      if (!last.output) throw AdapterError("generate response lacked output");
      outputs.push_back(*last.output);
    }
  }
  if (task != "generate") return last;
  AdapterResult combined;
  combined.output = reassemble(outputs, plan);
  return combined;
}

} // namespace dmark
