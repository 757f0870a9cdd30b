#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "intentdisc/errors.hpp"
#include "intentdisc/gateway.hpp"

using namespace intentdisc;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("intentdisc_gw_" + name);
  fs::remove(p);
  return p;
}

RenderedPrompt prompt(std::string text) {
  RenderedPrompt p;
  p.text = std::move(text);
  return p;
}

Exchange exchange(const std::string& hash, const std::string& response) {
  Exchange e;
  e.prompt_hash = hash;
  e.model_name = "m";
  e.request_text = "req";
  e.response_text = response;
  e.provenance = Provenance::live;
  e.timestamp = "2023-01-01T00:00:00Z";
  return e;
}

// Chat-completions stub: answers 429 for the first `failures` calls, then echoes the prompt.
struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> calls{0};
  std::atomic<int> failures{0};
  std::string last_body;
  std::string last_auth;
  std::mutex mutex;

  StubServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++calls;
      {
        std::lock_guard lock(mutex);
        last_body = req.body;
        last_auth = req.get_header_value("Authorization");
      }
      if (n <= failures) {
        res.status = 429;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      const std::string content = "echo: " + body["messages"][0]["content"].get<std::string>();
      res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump(),
                      "application/json");
    });
    server.Post("/bad/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }
};

ProviderConfig stub_config(int port, const std::string& prefix = "") {
  ProviderConfig c;
  c.base_url = "http://127.0.0.1:" + std::to_string(port) + prefix + "/v1";
  c.model_name = "stub-model";
  c.api_key_env = "INTENTDISC_TEST_KEY";
  c.backoff_base_seconds = 0.001;
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST_CASE("prompt hash covers model, text and temperature") {
  const auto h = prompt_hash("m", "hello", std::nullopt);
  CHECK(h.size() == 64);
  CHECK(h == prompt_hash("m", "hello", std::nullopt));
  CHECK(h != prompt_hash("m2", "hello", std::nullopt));
  CHECK(h != prompt_hash("m", "hello ", std::nullopt));
  CHECK(h != prompt_hash("m", "hello", 0.0));
  CHECK(prompt_hash("m", "hello", 0.0) != prompt_hash("m", "hello", 0.7));
  // No ambiguity from naive concatenation.
  CHECK(prompt_hash("ab", "c", std::nullopt) != prompt_hash("a", "bc", std::nullopt));
}

TEST_CASE("provider config validation and json") {
  ProviderConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_retries = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ProviderConfig{};
  c.timeout_seconds = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ProviderConfig{};
  c.max_concurrency = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto parsed = nlohmann::json::parse(R"({"model":"x","timeout":3,"temperature":0.2})").get<ProviderConfig>();
  CHECK(parsed.model_name == "x");
  CHECK(parsed.timeout_seconds == 3);
  CHECK(parsed.temperature == 0.2);
  CHECK(parsed.max_retries == 3);
  const auto back = nlohmann::json(parsed).get<ProviderConfig>();
  CHECK(back.model_name == "x");
  CHECK(back.temperature == 0.2);
}

TEST_CASE("store: append, latest wins, reopen") {
  const auto path = temp_file("store.jsonl");
  {
    auto store = ExchangeStore::open(path);
    store->append(exchange("h1", "first"));
    store->append(exchange("h2", "other"));
    store->append(exchange("h1", "second"));
    CHECK(store->find("h1")->response_text == "second");
    CHECK_FALSE(store->find("h3"));
  }
  auto again = ExchangeStore::open(path);
  CHECK(again->size() == 3);
  CHECK(again->find("h1")->response_text == "second");
  CHECK(again->corrupt_lines() == 0);
  fs::remove(path);
}

TEST_CASE("store: a corrupt line is skipped, the rest stay usable") {
  const auto path = temp_file("corrupt.jsonl");
  {
    std::ofstream out(path);
    for (int i = 0; i < 10; ++i) {
      if (i == 4) {
        out << "{\"prompt_hash\": \"h4\", \"response_te\n";
        continue;
      }
      out << nlohmann::json(exchange("h" + std::to_string(i), "r" + std::to_string(i))).dump() << "\n";
    }
  }
  auto store = ExchangeStore::open(path);
  CHECK(store->size() == 9);
  CHECK(store->corrupt_lines() == 1);
  CHECK(store->find("h9")->response_text == "r9");
  CHECK_FALSE(store->find("h4"));
  fs::remove(path);
}

TEST_CASE("exchange json keeps the response verbatim") {
  Exchange e = exchange("h", "  spaced\n\tresponse  ");
  e.temperature = 0.5;
  e.retries = 2;
  const auto back = nlohmann::json(e).get<Exchange>();
  CHECK(back.response_text == e.response_text);
  CHECK(back.temperature == 0.5);
  CHECK(back.retries == 2);
  CHECK(back.provenance == Provenance::live);
}

TEST_CASE("scripted fixture matching") {
  const std::string h = prompt_hash("gpt-3.5-turbo-0301", "exact prompt", std::nullopt);
  auto fixture = std::make_shared<ScriptedFixture>(ScriptedFixture::from_json(nlohmann::json::parse(
      R"({"entries":[{"contains":"apple","responses":["A1","A2"]},{"prompt_hash":")" + h +
      R"(","response":"EXACT"},{"response":"ANY"}]})")));
  Session s;
  s.mode = SessionMode::scripted;
  s.fixture = fixture;
  Gateway g(ProviderConfig{}, s);
  CHECK(g.complete(prompt("exact prompt with apple")).response_text == "A1");
  CHECK(g.complete(prompt("exact prompt")).response_text == "EXACT");
  CHECK(g.complete(prompt("an apple")).response_text == "A2");
  CHECK_THROWS_AS(g.complete(prompt("an apple")), FixtureExhausted);
  CHECK(g.complete(prompt("banana")).response_text == "ANY");
  CHECK_THROWS_AS(g.complete(prompt("banana")), FixtureExhausted);
  CHECK_THROWS_AS(g.complete(prompt("exact prompt")), FixtureExhausted);
  CHECK(g.stats().scripted == 4);
  CHECK_THROWS_AS(ScriptedFixture::from_json(nlohmann::json::parse(R"({"nope":1})")), DataError);
}

TEST_CASE("replay serves recorded exchanges and fails loudly on a miss") {
  const auto path = temp_file("replay.jsonl");
  ProviderConfig cfg;
  auto store = ExchangeStore::open(path);
  store->append(exchange(prompt_hash(cfg.model_name, "known", cfg.temperature), "recorded"));
  Session s;
  s.mode = SessionMode::replay;
  s.store = store;
  Gateway g(cfg, s);
  const auto e = g.complete(prompt("known"));
  CHECK(e.response_text == "recorded");
  CHECK(e.provenance == Provenance::replay);
  CHECK_THROWS_AS(g.complete(prompt("unknown")), ReplayMiss);
  try {
    g.complete(prompt("unknown"));
  } catch (const ReplayMiss& m) {
    CHECK(m.hash() == prompt_hash(cfg.model_name, "unknown", cfg.temperature));
  }
  CHECK_THROWS_AS(Gateway(cfg, Session{SessionMode::replay, nullptr, nullptr, true}), ConfigError);
  fs::remove(path);
}

TEST_CASE("prompt length cap") {
  ProviderConfig cfg;
  cfg.max_prompt_chars = 5;
  Session s;
  s.mode = SessionMode::scripted;
  s.fixture = std::make_shared<ScriptedFixture>(
      ScriptedFixture::from_json(nlohmann::json::parse(R"({"entries":[{"responses":["x","y"]}]})")));
  Gateway g(cfg, s);
  CHECK(g.complete(prompt("short")).response_text == "x");
  CHECK_THROWS_AS(g.complete(prompt("too long")), ConfigError);
}

TEST_CASE("live calls retry transient failures and record the exchange") {
  StubServer stub;
  stub.failures = 1;
  ::setenv("INTENTDISC_TEST_KEY", "sk-test", 1);
  const auto path = temp_file("live.jsonl");
  Session s;
  s.mode = SessionMode::live_record;
  s.store = ExchangeStore::open(path);
  Gateway g(stub_config(stub.port), s);
  const auto e = g.complete(prompt("hello"));
  CHECK(e.response_text == "echo: hello");
  CHECK(e.retries == 1);
  CHECK(e.provenance == Provenance::live);
  CHECK(stub.calls == 2);
  {
    std::lock_guard lock(stub.mutex);
    CHECK(stub.last_auth == "Bearer sk-test");
    const auto body = nlohmann::json::parse(stub.last_body);
    CHECK(body["model"] == "stub-model");
    CHECK_FALSE(body.contains("temperature"));
  }
  // A second identical prompt is answered from the store.
  const auto again = g.complete(prompt("hello"));
  CHECK(again.provenance == Provenance::replay);
  CHECK(stub.calls == 2);
  CHECK(ExchangeStore::open(path)->find(e.prompt_hash)->response_text == "echo: hello");

  // The recorded store then replays without the server.
  Session r;
  r.mode = SessionMode::replay;
  r.store = ExchangeStore::open(path);
  CHECK(Gateway(stub_config(stub.port), r).complete(prompt("hello")).response_text == "echo: hello");
  fs::remove(path);
}

TEST_CASE("live calls: temperature, exhaustion, hard failures, missing key") {
  StubServer stub;
  ::setenv("INTENTDISC_TEST_KEY", "sk-test", 1);
  Session s;
  s.mode = SessionMode::live_record;

  ProviderConfig warm = stub_config(stub.port);
  warm.temperature = 0.3;
  Gateway(warm, s).complete(prompt("t"));
  {
    std::lock_guard lock(stub.mutex);
    CHECK(nlohmann::json::parse(stub.last_body)["temperature"] == 0.3);
  }

  stub.calls = 0;
  stub.failures = 100;
  ProviderConfig few = stub_config(stub.port);
  few.max_retries = 2;
  CHECK_THROWS_AS(Gateway(few, s).complete(prompt("x")), ProviderError);
  CHECK(stub.calls == 3);

  stub.calls = 0;
  CHECK_THROWS_AS(Gateway(stub_config(stub.port, "/bad"), s).complete(prompt("x")), ProviderError);

  ::unsetenv("INTENTDISC_TEST_KEY");
  CHECK_THROWS_AS(Gateway(stub_config(stub.port), s).complete(prompt("x")), ConfigError);

  ProviderConfig closed = stub_config(1);
  closed.api_key_env = "";
  closed.max_retries = 0;
  closed.timeout_seconds = 1;
  CHECK_THROWS_AS(Gateway(closed, s).complete(prompt("x")), ProviderError);
}

TEST_CASE("complete_all keeps order under concurrency") {
  StubServer stub;
  ::setenv("INTENTDISC_TEST_KEY", "sk-test", 1);
  ProviderConfig cfg = stub_config(stub.port);
  cfg.max_concurrency = 4;
  Session s;
  s.mode = SessionMode::live_record;
  Gateway g(cfg, s);
  std::vector<RenderedPrompt> prompts;
  for (int i = 0; i < 12; ++i) prompts.push_back(prompt("p" + std::to_string(i)));
  const auto out = g.complete_all(prompts);
  REQUIRE(out.size() == 12);
  for (int i = 0; i < 12; ++i) CHECK(out[static_cast<std::size_t>(i)].response_text == "echo: p" + std::to_string(i));
  CHECK(g.stats().live == 12);
}
