#pragma once

// Server side of the adapter protocol, hosting the toy models. The same
// handler backs the stdio server, the HTTP server and the in-process
// adapter, so every transport answers bit-identically.
//
// Models: "identity" and "ocr" echo text (images are recognized first),
// "translate"/"ocr-translate" run the toy translator, "toxic"/"ocr-toxic"
// classify toxicity. An image payload is always OCR'd into text before the
// model-specific stage.

#include <atomic>
#include <iostream>
#include <string>

#include <json.hpp>

#include "dmark/adapter.hpp"
#include "dmark/render.hpp"
#include "dmark/toy_models.hpp"

namespace dmark {

inline bool valid_toy_model(const std::string& name) {
  return name == "identity" || name == "ocr" || name == "translate" ||
         name == "ocr-translate" || name == "toxic" || name == "ocr-toxic";
}

namespace serve_detail {

inline nlohmann::ordered_json error_response(const nlohmann::json& id,
                                             const std::string& message) {
  nlohmann::ordered_json out;
  if (!id.is_null()) out["id"] = id;
  out["error"] = message;
  return out;
}

}  // namespace serve_detail

inline nlohmann::ordered_json handle_toy_request(const nlohmann::json& request,
                                                 const std::string& model) {
  const nlohmann::json id = request.contains("id") ? request["id"] : nlohmann::json();
  // Parsed wire traffic tags non-negative ids as unsigned; in-process callers
  // may hand over plain ints, which are fine as long as they are not negative.
  const bool id_usable =
      id.is_number_unsigned() ||
      (id.is_number_integer() && id.get<std::int64_t>() >= 0);
  if (!id_usable)  // a bogus id cannot be echoed: the client matches on it
    return serve_detail::error_response(nlohmann::json(),
                                        "request lacks an unsigned integer id");
  if (!request.contains("task") || !request["task"].is_string())
    return serve_detail::error_response(id, "request lacks a task");
  const std::string task = request["task"].get<std::string>();
  if (task != "classify" && task != "generate")
    return serve_detail::error_response(id, "unknown task: " + task);
  if (!request.contains("payload") || !request["payload"].is_object())
    return serve_detail::error_response(id, "request lacks a payload object");
  const nlohmann::json& payload = request["payload"];
  const bool has_text = payload.contains("text");
  const bool has_image = payload.contains("image_pgm_b64");
  if (has_text == has_image)
    return serve_detail::error_response(id, "payload must carry exactly one of text, image_pgm_b64");

  std::string text;
  try {
    if (has_text) {
      text = payload["text"].get<std::string>();
    } else {
      const std::string pgm =
          adapter_detail::base64_decode(payload["image_pgm_b64"].get<std::string>());
      text = toy_ocr(decode_pgm(pgm));
    }
  } catch (const std::exception& e) {
    return serve_detail::error_response(id, std::string("bad payload: ") + e.what());
  }

  nlohmann::ordered_json out;
  out["id"] = id;
  if (model == "toxic" || model == "ocr-toxic") {
    if (task != "classify")
      return serve_detail::error_response(id, model + " only answers classify");
    const double p = toy_toxic(text, toxic_lexicon());
    nlohmann::ordered_json probs;
    probs[kToxicLabel] = p;
    probs[kNonToxicLabel] = 1.0 - p;
    out["probs"] = probs;
    return out;
  }
  if (task != "generate")
    return serve_detail::error_response(id, model + " only answers generate");
  if (model == "translate" || model == "ocr-translate") {
    out["output"] = toy_translate(text);
  } else {  // identity, ocr
    out["output"] = text;
  }
  return out;
}

// Reads one JSON request per line from `in`, answers on `out`. Returns when
// input is exhausted.
inline void run_stdio_server(const std::string& model, std::istream& in = std::cin,
                             std::ostream& out = std::cout) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
    nlohmann::ordered_json response =
        request.is_discarded()
            ? serve_detail::error_response(nlohmann::json(), "malformed request line")
            : handle_toy_request(request, model);
    out << response.dump() << '\n' << std::flush;
  }
}

// Runs the toy model in-process through the exact wire handler, so tests and
// desk campaigns skip process plumbing without changing a single byte of
// protocol behavior.
class InProcessAdapter : public ModelAdapter {
 public:
  explicit InProcessAdapter(std::string model) : model_(std::move(model)) {
    if (!valid_toy_model(model_))
      throw AdapterError("unknown toy model: " + model_);
  }

  AdapterResult query_text(const std::string& task, const std::string& text) override {
    nlohmann::ordered_json payload;
    payload["text"] = text;
    return round_trip(task, payload, false);
  }

  AdapterResult query_image(const std::string& task, const std::string& pgm_bytes) override {
    nlohmann::ordered_json payload;
    payload["image_pgm_b64"] = adapter_detail::base64_encode(pgm_bytes);
    return round_trip(task, payload, true);
  }

  std::string describe() const override { return "toy:" + model_; }

 private:
  AdapterResult round_trip(const std::string& task, const nlohmann::ordered_json& payload,
                           bool rendered) {
    nlohmann::ordered_json request;
    request["id"] = next_id_++;
    request["task"] = task;
    request["payload"] = payload;
    request["render"] = rendered;
    // Through the serialized form, exactly like a remote server sees it.
    const nlohmann::json parsed = nlohmann::json::parse(request.dump());
    const nlohmann::json response =
        nlohmann::json::parse(handle_toy_request(parsed, model_).dump());
    return adapter_detail::parse_response_body(response);
  }

  std::string model_;
  std::atomic<std::uint64_t> next_id_{1};
};

} // namespace dmark
