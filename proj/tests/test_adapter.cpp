// Wire protocol, transports and the rendered-query path. Subprocess tests run
// the real CLI binary (path injected at compile time as DMARK_BIN_PATH).

#include <gtest/gtest.h>

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dmark/adapter.hpp"
#include "dmark/render.hpp"
#include "dmark/serve.hpp"
#include "dmark/subprocess.hpp"
#include "dmark/toy_models.hpp"

namespace {

using nlohmann::json;

TEST(Base64, KnownVectors) {
  using dmark::adapter_detail::base64_encode;
  EXPECT_EQ(base64_encode(""), "");
  EXPECT_EQ(base64_encode("f"), "Zg==");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
  EXPECT_EQ(base64_encode("foo"), "Zm9v");
  EXPECT_EQ(base64_encode("foob"), "Zm9vYg==");
  EXPECT_EQ(base64_encode("fooba"), "Zm9vYmE=");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
}

TEST(Base64, BinaryRoundTrip) {
  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
  bytes += std::string("\0\0tail\0", 7);
  const std::string encoded = dmark::adapter_detail::base64_encode(bytes);
  EXPECT_EQ(dmark::adapter_detail::base64_decode(encoded), bytes);
}

TEST(Base64, DecodeRejectsGarbage) {
  EXPECT_THROW(dmark::adapter_detail::base64_decode("Zg!="), dmark::AdapterError);
  EXPECT_THROW(dmark::adapter_detail::base64_decode("a b"), dmark::AdapterError);
}

TEST(Timeout, DefaultAndEnvOverride) {
  unsetenv("DIACRITIC_ADAPTER_TIMEOUT_MS");
  EXPECT_EQ(dmark::adapter_detail::resolve_timeout(-1).count(), 30000);
  EXPECT_EQ(dmark::adapter_detail::resolve_timeout(5000).count(), 5000);
  setenv("DIACRITIC_ADAPTER_TIMEOUT_MS", "1500", 1);
  EXPECT_EQ(dmark::adapter_detail::resolve_timeout(-1).count(), 1500);
  EXPECT_EQ(dmark::adapter_detail::resolve_timeout(5000).count(), 1500);
  unsetenv("DIACRITIC_ADAPTER_TIMEOUT_MS");
}

// ---- toy request handler ---------------------------------------------------

json toy(const json& request, const std::string& model) {
  return dmark::handle_toy_request(request, model);
}

TEST(ToyHandler, IdentityEchoesText) {
  const json r = toy({{"id", 3}, {"task", "generate"}, {"payload", {{"text", "hello"}}}},
                     "identity");
  EXPECT_EQ(r["id"], 3);
  EXPECT_EQ(r["output"], "hello");
  EXPECT_FALSE(r.contains("error"));
}

TEST(ToyHandler, TranslateFixture) {
  const json r = toy({{"id", 1}, {"task", "generate"}, {"payload", {{"text", "hello world"}}}},
                     "translate");
  EXPECT_EQ(r["output"], "bonjour monde");
}

TEST(ToyHandler, ToxicProbsSumToOne) {
  const json r = toy({{"id", 2}, {"task", "classify"}, {"payload", {{"text", "you idiot"}}}},
                     "toxic");
  ASSERT_TRUE(r.contains("probs"));
  const double toxic = r["probs"][dmark::kToxicLabel].get<double>();
  const double clean = r["probs"][dmark::kNonToxicLabel].get<double>();
  EXPECT_NEAR(toxic + clean, 1.0, 1e-12);
  EXPECT_GT(toxic, 0.5);
}

TEST(ToyHandler, ImagePayloadGoesThroughOcr) {
  const dmark::Canvas canvas = dmark::render("hi", 4);
  const std::string b64 = dmark::adapter_detail::base64_encode(dmark::encode_pgm(canvas));
  const json r = toy({{"id", 9}, {"task", "generate"}, {"payload", {{"image_pgm_b64", b64}}}},
                     "ocr");
  EXPECT_EQ(r["output"], "hi");
}

TEST(ToyHandler, OcrTranslatePipesOcrIntoDictionary) {
  const dmark::Canvas canvas = dmark::render("the cat", 10);
  const std::string b64 = dmark::adapter_detail::base64_encode(dmark::encode_pgm(canvas));
  const json r = toy({{"id", 4}, {"task", "generate"}, {"payload", {{"image_pgm_b64", b64}}}},
                     "ocr-translate");
  EXPECT_EQ(r["output"], "le chat");
}

TEST(ToyHandler, ErrorPaths) {
  // task/payload mismatches answer with an error field and echo the id.
  json r = toy({{"id", 1}, {"task", "classify"}, {"payload", {{"text", "x"}}}}, "translate");
  EXPECT_TRUE(r.contains("error"));
  EXPECT_EQ(r["id"], 1);
  r = toy({{"id", 1}, {"task", "generate"}, {"payload", {{"text", "x"}}}}, "toxic");
  EXPECT_TRUE(r.contains("error"));
  r = toy({{"id", 1}, {"task", "summarize"}, {"payload", {{"text", "x"}}}}, "identity");
  EXPECT_TRUE(r.contains("error"));
  r = toy({{"id", 1}, {"task", "generate"}, {"payload", json::object()}}, "identity");
  EXPECT_TRUE(r.contains("error"));
  r = toy({{"id", 1},
           {"task", "generate"},
           {"payload", {{"text", "x"}, {"image_pgm_b64", "Zg=="}}}},
          "identity");
  EXPECT_TRUE(r.contains("error"));
  r = toy({{"id", 1}, {"task", "generate"}, {"payload", {{"image_pgm_b64", "!!"}}}},
          "identity");
  EXPECT_TRUE(r.contains("error"));
  // Unusable id: the error response cannot echo it back.
  r = toy({{"task", "generate"}, {"payload", {{"text", "x"}}}}, "identity");
  EXPECT_TRUE(r.contains("error"));
  EXPECT_FALSE(r.contains("id"));
  r = toy({{"id", -4}, {"task", "generate"}, {"payload", {{"text", "x"}}}}, "identity");
  EXPECT_TRUE(r.contains("error"));
  EXPECT_FALSE(r.contains("id"));
}

// ---- in-process adapter ----------------------------------------------------

TEST(InProcess, UnknownModelThrows) {
  EXPECT_THROW(dmark::InProcessAdapter("resnet"), dmark::AdapterError);
}

TEST(InProcess, TextAndImageQueries) {
  dmark::InProcessAdapter identity("identity");
  EXPECT_EQ(identity.query_text("generate", "abc").output.value(), "abc");

  dmark::InProcessAdapter ocr("ocr");
  const dmark::Canvas canvas = dmark::render("ok", 4);
  EXPECT_EQ(ocr.query_image("generate", dmark::encode_pgm(canvas)).output.value(), "ok");

  dmark::InProcessAdapter toxic("toxic");
  const dmark::AdapterResult r = toxic.query_text("classify", "have a nice day");
  EXPECT_LT(r.probs.at(dmark::kToxicLabel), 0.5);
}

TEST(InProcess, ServerErrorSurfacesAsAdapterError) {
  dmark::InProcessAdapter toxic("toxic");
  EXPECT_THROW(toxic.query_text("generate", "x"), dmark::AdapterError);
}

// ---- rendered queries ------------------------------------------------------

TEST(QueryRendered, ReassemblesMultiCanvasGenerate) {
  dmark::InProcessAdapter ocr("ocr");
  const dmark::AdapterResult r = dmark::query_rendered(ocr, "generate", "aaa bbb", 3);
  EXPECT_EQ(r.output.value(), "aaa bbb");
}

TEST(QueryRendered, MarksRideAlongAndFlipGlyphs) {
  // U+0335 overlays a short stroke: the OCR template match lands on e.
  dmark::InProcessAdapter ocr("ocr");
  const dmark::AdapterResult r =
      dmark::query_rendered(ocr, "generate", "o\xcc\xb5k", 4);
  EXPECT_EQ(r.output.value(), "ek");
}

TEST(QueryRendered, WhitespaceOnlyMakesBlankCanvas) {
  dmark::InProcessAdapter ocr("ocr");
  const dmark::AdapterResult r = dmark::query_rendered(ocr, "generate", "   ", 4);
  EXPECT_EQ(r.output.value(), "");
}

TEST(QueryRendered, ClassifyDemandsSingleChunk) {
  dmark::InProcessAdapter toxic("ocr-toxic");
  const dmark::AdapterResult one = dmark::query_rendered(toxic, "classify", "idiot", 40);
  EXPECT_GT(one.probs.at(dmark::kToxicLabel), 0.5);
  EXPECT_THROW(dmark::query_rendered(toxic, "classify", "you utter fool", 4),
               dmark::AdapterError);
}

TEST(QueryRendered, CanvasCapEnforced) {
  dmark::InProcessAdapter ocr("ocr");
  EXPECT_THROW(dmark::query_rendered(ocr, "generate", "a b c d e", 2, 4),
               dmark::AdapterError);
  EXPECT_NO_THROW(dmark::query_rendered(ocr, "generate", "a b c d e", 2, 5));
}

// ---- line protocol over a scripted transport --------------------------------

class MockTransport : public dmark::LineTransport {
 public:
  using Responder = std::function<void(const json&, MockTransport&)>;

  explicit MockTransport(Responder responder) : responder_(std::move(responder)) {}

  void push(const json& response) { push_raw(response.dump()); }

  void push_raw(const std::string& line) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      inbox_.push_back(line);
    }
    cv_.notify_all();
  }

  void push_eof() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      eof_pending_ = true;
    }
    cv_.notify_all();
  }

  void send(const std::string& line) override {
    const json request = json::parse(line);
    std::size_t count;
    {
      std::lock_guard<std::mutex> lock(mu_);
      sent_.push_back(request);
      count = sent_.size();
    }
    (void)count;
    if (responder_) responder_(request, *this);
  }

  bool receive(std::string& line) override {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return closed_ || eof_pending_ || !inbox_.empty(); });
    if (!inbox_.empty()) {
      line = inbox_.front();
      inbox_.pop_front();
      return true;
    }
    if (eof_pending_) {
      eof_pending_ = false;  // one-shot: the next receive blocks again
      return false;
    }
    return false;  // closed
  }

  bool restart() override {
    ++restarts_;
    return restart_ok;
  }

  void shutdown() override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  std::string describe() const override { return "mock"; }

  std::vector<json> sent() {
    std::lock_guard<std::mutex> lock(mu_);
    return sent_;
  }

  int restarts() const { return restarts_.load(); }

  bool restart_ok = true;

 private:
  Responder responder_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
  std::vector<json> sent_;
  std::atomic<int> restarts_{0};
  bool eof_pending_ = false;
  bool closed_ = false;
};

// Builds an adapter over a mock transport; keeps a raw pointer for scripting.
struct MockRig {
  MockTransport* transport;
  dmark::LineProtocolAdapter adapter;

  explicit MockRig(MockTransport::Responder responder, long timeout_ms = 5000)
      : MockRig(std::make_unique<MockTransport>(std::move(responder)), timeout_ms) {}

 private:
  MockRig(std::unique_ptr<MockTransport> t, long timeout_ms)
      : transport(t.get()), adapter(std::move(t), timeout_ms) {}
};

json echo_response(const json& request) {
  return {{"id", request["id"]}, {"output", request["payload"]["text"]}};
}

TEST(LineProtocol, MatchesResponsesById) {
  unsetenv("DIACRITIC_ADAPTER_TIMEOUT_MS");
  std::mutex mu;
  std::vector<json> held;
  MockRig rig([&](const json& request, MockTransport& t) {
    std::lock_guard<std::mutex> lock(mu);
    held.push_back(request);
    if (held.size() == 2) {
      // Answer in reverse arrival order; ids must still route correctly.
      t.push(echo_response(held[1]));
      t.push(echo_response(held[0]));
    }
  });

  std::string got_a, got_b;
  std::thread a([&] { got_a = rig.adapter.query_text("generate", "alpha").output.value(); });
  std::thread b([&] { got_b = rig.adapter.query_text("generate", "beta").output.value(); });
  a.join();
  b.join();
  EXPECT_EQ(got_a, "alpha");
  EXPECT_EQ(got_b, "beta");
}

TEST(LineProtocol, RequestShape) {
  MockRig rig([](const json& request, MockTransport& t) { t.push(echo_response(request)); });
  rig.adapter.query_text("generate", "shape");
  const std::vector<json> sent = rig.transport->sent();
  ASSERT_EQ(sent.size(), 1u);
  EXPECT_TRUE(sent[0]["id"].is_number_unsigned());
  EXPECT_EQ(sent[0]["task"], "generate");
  EXPECT_EQ(sent[0]["payload"]["text"], "shape");
  EXPECT_EQ(sent[0]["render"], false);
}

TEST(LineProtocol, TimeoutThrows) {
  unsetenv("DIACRITIC_ADAPTER_TIMEOUT_MS");
  MockRig rig([](const json&, MockTransport&) { /* never answers */ }, 200);
  try {
    rig.adapter.query_text("generate", "x");
    FAIL() << "expected timeout";
  } catch (const dmark::AdapterError& e) {
    EXPECT_NE(std::string(e.what()).find("timeout"), std::string::npos);
  }
}

TEST(LineProtocol, MalformedResponseFailsPending) {
  MockRig rig([](const json&, MockTransport& t) { t.push_raw("not json at all"); });
  EXPECT_THROW(rig.adapter.query_text("generate", "x"), dmark::AdapterError);
}

TEST(LineProtocol, StringIdIsMalformed) {
  MockRig rig([](const json& request, MockTransport& t) {
    t.push({{"id", std::to_string(request["id"].get<std::uint64_t>())}, {"output", "x"}});
  });
  EXPECT_THROW(rig.adapter.query_text("generate", "x"), dmark::AdapterError);
}

TEST(LineProtocol, UnknownIdsAreDropped) {
  MockRig rig([](const json& request, MockTransport& t) {
    t.push({{"id", 999999}, {"output", "stray"}});
    t.push(echo_response(request));
  });
  EXPECT_EQ(rig.adapter.query_text("generate", "keep").output.value(), "keep");
}

TEST(LineProtocol, ErrorFieldBecomesAdapterError) {
  MockRig rig([](const json& request, MockTransport& t) {
    t.push({{"id", request["id"]}, {"error", "model exploded"}});
  });
  try {
    rig.adapter.query_text("generate", "x");
    FAIL() << "expected error";
  } catch (const dmark::AdapterError& e) {
    EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
  }
}

TEST(LineProtocol, ProbSumValidation) {
  MockRig rig([](const json& request, MockTransport& t) {
    t.push({{"id", request["id"]}, {"probs", {{"a", 0.6}, {"b", 0.6}}}});
  });
  EXPECT_THROW(rig.adapter.query_text("classify", "x"), dmark::AdapterError);
}

TEST(LineProtocol, EofRestartsOnceAndResends) {
  MockRig rig([](const json& request, MockTransport& t) {
    const std::vector<json> sent = t.sent();
    if (sent.size() == 1) {
      t.push_eof();  // channel dies before the first answer
    } else {
      t.push(echo_response(request));  // resent copy gets a reply
    }
  });
  EXPECT_EQ(rig.adapter.query_text("generate", "survive").output.value(), "survive");
  EXPECT_EQ(rig.transport->restarts(), 1);
  const std::vector<json> sent = rig.transport->sent();
  ASSERT_EQ(sent.size(), 2u);
  EXPECT_EQ(sent[0]["id"], sent[1]["id"]);  // identical resend
}

TEST(LineProtocol, SecondEofIsFatal) {
  MockRig rig([](const json&, MockTransport& t) { t.push_eof(); });
  EXPECT_THROW(rig.adapter.query_text("generate", "x"), dmark::AdapterError);
  EXPECT_EQ(rig.transport->restarts(), 1);
  // The adapter is dead: later queries refuse immediately.
  EXPECT_THROW(rig.adapter.query_text("generate", "y"), dmark::AdapterError);
}

TEST(LineProtocol, FailedRestartIsFatal) {
  MockRig rig([](const json&, MockTransport& t) { t.push_eof(); });
  rig.transport->restart_ok = false;
  EXPECT_THROW(rig.adapter.query_text("generate", "x"), dmark::AdapterError);
}

// ---- subprocess transport against the real binary ---------------------------

std::vector<std::string> serve_argv(const std::string& model) {
  return {DMARK_BIN_PATH, "serve-toy", "--model", model};
}

TEST(Subprocess, RoundTripThroughRealServer) {
  unsetenv("DIACRITIC_ADAPTER_TIMEOUT_MS");
  dmark::LineProtocolAdapter adapter(
      std::make_unique<dmark::SubprocessTransport>(serve_argv("identity")), 15000);
  EXPECT_EQ(adapter.query_text("generate", "over the wire").output.value(), "over the wire");
  EXPECT_EQ(adapter.query_text("generate", "second call").output.value(), "second call");
}

TEST(Subprocess, ToxicProbsOverTheWire) {
  dmark::LineProtocolAdapter adapter(
      std::make_unique<dmark::SubprocessTransport>(serve_argv("toxic")), 15000);
  const dmark::AdapterResult r = adapter.query_text("classify", "you stupid machine");
  EXPECT_GT(r.probs.at(dmark::kToxicLabel), 0.5);
  EXPECT_NEAR(r.probs.at(dmark::kToxicLabel) + r.probs.at(dmark::kNonToxicLabel), 1.0, 1e-9);
}

TEST(Subprocess, ImageQueryOverTheWire) {
  dmark::LineProtocolAdapter adapter(
      std::make_unique<dmark::SubprocessTransport>(serve_argv("ocr")), 15000);
  const dmark::Canvas canvas = dmark::render("wire", 6);
  EXPECT_EQ(adapter.query_image("generate", dmark::encode_pgm(canvas)).output.value(), "wire");
}

TEST(Subprocess, ServerErrorLineMapsToAdapterError) {
  dmark::LineProtocolAdapter adapter(
      std::make_unique<dmark::SubprocessTransport>(serve_argv("toxic")), 15000);
  EXPECT_THROW(adapter.query_text("generate", "wrong task"), dmark::AdapterError);
}

TEST(Subprocess, CatEchoAndManualRestart) {
  dmark::SubprocessTransport cat({"/bin/cat"});
  cat.send("ping");
  std::string line;
  ASSERT_TRUE(cat.receive(line));
  EXPECT_EQ(line, "ping");
  ASSERT_TRUE(cat.restart());
  cat.send("pong");
  ASSERT_TRUE(cat.receive(line));
  EXPECT_EQ(line, "pong");
}

TEST(Subprocess, ImmediateExitReadsAsEof) {
  dmark::SubprocessTransport t({"/bin/true"});
  std::string line;
  EXPECT_FALSE(t.receive(line));
}

TEST(Subprocess, ExecFailureReadsAsEof) {
  dmark::SubprocessTransport t({"/nonexistent/binary/for/this/test"});
  std::string line;
  EXPECT_FALSE(t.receive(line));
}

}  // namespace
