#include "intentdisc/gateway.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include <httplib.h>

#include "intentdisc/errors.hpp"
#include "intentdisc/hash.hpp"
#include "intentdisc/rng.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

using nlohmann::json;

void ProviderConfig::validate() const {
  if (max_retries < 0) throw ConfigError("provider max_retries must be >= 0");
  if (!(timeout_seconds > 0.0)) throw ConfigError("provider timeout must be > 0");
  if (max_concurrency < 1) throw ConfigError("provider max_concurrency must be >= 1");
  if (backoff_base_seconds < 0.0) throw ConfigError("provider backoff must be >= 0");
  if (model_name.empty()) throw ConfigError("provider model name is empty");
}

void to_json(json& j, const ProviderConfig& c) {
  j = json{{"base_url", c.base_url},
           {"model", c.model_name},
           {"api_key_env", c.api_key_env},
           {"max_retries", c.max_retries},
           {"timeout", c.timeout_seconds},
           {"backoff_base", c.backoff_base_seconds},
           {"max_concurrency", c.max_concurrency},
           {"max_prompt_chars", c.max_prompt_chars},
           {"temperature", c.temperature ? json(*c.temperature) : json(nullptr)}};
}

void from_json(const json& j, ProviderConfig& c) {
  if (j.contains("base_url")) c.base_url = j.at("base_url").get<std::string>();
  if (j.contains("model")) c.model_name = j.at("model").get<std::string>();
  if (j.contains("model_name")) c.model_name = j.at("model_name").get<std::string>();
  if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
  if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
  if (j.contains("timeout")) c.timeout_seconds = j.at("timeout").get<double>();
  if (j.contains("timeout_seconds")) c.timeout_seconds = j.at("timeout_seconds").get<double>();
  if (j.contains("backoff_base")) c.backoff_base_seconds = j.at("backoff_base").get<double>();
  if (j.contains("max_concurrency")) c.max_concurrency = j.at("max_concurrency").get<int>();
  if (j.contains("max_prompt_chars")) c.max_prompt_chars = j.at("max_prompt_chars").get<std::size_t>();
  if (j.contains("temperature")) {
    const auto& t = j.at("temperature");
    c.temperature = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
  }
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::live: return "live";
    case Provenance::replay: return "replay";
    case Provenance::scripted: return "scripted";
  }
  return "live";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "live") return Provenance::live;
  if (s == "replay") return Provenance::replay;
  if (s == "scripted") return Provenance::scripted;
  throw DataError("unknown provenance \"" + std::string(s) + "\"");
}

std::string_view to_string(SessionMode m) noexcept {
  switch (m) {
    case SessionMode::live_record: return "live";
    case SessionMode::replay: return "replay";
    case SessionMode::scripted: return "scripted";
  }
  return "replay";
}

SessionMode session_mode_from_string(std::string_view s) {
  if (s == "live" || s == "live+record" || s == "record") return SessionMode::live_record;
  if (s == "replay") return SessionMode::replay;
  if (s == "scripted") return SessionMode::scripted;
  throw ConfigError("unknown session mode \"" + std::string(s) + "\" (expected live, replay or scripted)");
}

void to_json(json& j, const Exchange& e) {
  j = json{{"prompt_hash", e.prompt_hash},
           {"model", e.model_name},
           {"request", e.request_text},
           {"response", e.response_text},
           {"provenance", std::string(to_string(e.provenance))},
           {"timestamp", e.timestamp},
           {"retries", e.retries},
           {"temperature", e.temperature ? json(*e.temperature) : json(nullptr)}};
}

void from_json(const json& j, Exchange& e) {
  e.prompt_hash = j.at("prompt_hash").get<std::string>();
  e.model_name = j.at("model").get<std::string>();
  e.request_text = j.at("request").get<std::string>();
  e.response_text = j.at("response").get<std::string>();
  e.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  e.timestamp = j.value("timestamp", std::string());
  e.retries = j.value("retries", 0);
  if (j.contains("temperature") && !j.at("temperature").is_null()) e.temperature = j.at("temperature").get<double>();
}

std::string prompt_hash(std::string_view model_name, std::string_view prompt_text, std::optional<double> temperature) {
  const json key = json::array({model_name, prompt_text, temperature ? json(*temperature) : json(nullptr)});
  return sha256_hex(key.dump());
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::shared_ptr<ExchangeStore> ExchangeStore::open(const std::filesystem::path& path) {
  std::shared_ptr<ExchangeStore> store(new ExchangeStore(path));
  std::ifstream in(path);
  if (in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      try {
        Exchange e = json::parse(line).get<Exchange>();
        store->latest_[e.prompt_hash] = store->exchanges_.size();
        store->exchanges_.push_back(std::move(e));
      } catch (const std::exception&) {
        ++store->corrupt_lines_;
        std::cerr << "warning: " << path.string() << ":" << lineno << ": skipping corrupt exchange record\n";
      }
    }
  } else {
    std::ofstream create(path, std::ios::app);
    if (!create) throw ConfigError("cannot create exchange store " + path.string());
  }
  return store;
}

void ExchangeStore::append(const Exchange& e) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw ProviderError("cannot append to exchange store " + path_.string());
  out << json(e).dump() << '\n';
  out.flush();
  if (!out) throw ProviderError("failed writing exchange store " + path_.string());
  latest_[e.prompt_hash] = exchanges_.size();
  exchanges_.push_back(e);
}

std::optional<Exchange> ExchangeStore::find(const std::string& hash) const {
  std::lock_guard lock(mutex_);
  const auto it = latest_.find(hash);
  if (it == latest_.end()) return std::nullopt;
  return exchanges_[it->second];
}

std::size_t ExchangeStore::size() const {
  std::lock_guard lock(mutex_);
  return exchanges_.size();
}

ScriptedFixture ScriptedFixture::from_json(const json& doc) {
  ScriptedFixture fixture;
  try {
    for (const auto& e : doc.at("entries")) {
      Entry entry;
      if (e.contains("prompt_hash")) entry.prompt_hash = e.at("prompt_hash").get<std::string>();
      if (e.contains("contains")) entry.contains = e.at("contains").get<std::string>();
      if (e.contains("response")) entry.responses.push_back(e.at("response").get<std::string>());
      if (e.contains("responses")) {
        for (const auto& r : e.at("responses")) entry.responses.push_back(r.get<std::string>());
      }
      fixture.entries_.push_back(std::move(entry));
    }
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed scripted fixture: ") + ex.what());
  }
  return fixture;
}

ScriptedFixture ScriptedFixture::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_file(path.string())));
  } catch (const json::parse_error& e) {
    throw DataError("scripted fixture " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::string ScriptedFixture::next(const std::string& hash, std::string_view prompt_text) {
  std::lock_guard lock(mutex_);
  auto matches = [&](const Entry& e) {
    if (e.prompt_hash) return *e.prompt_hash == hash;
    if (e.contains) return prompt_text.find(*e.contains) != std::string_view::npos;
    return true;
  };
  // Exact-hash entries take precedence over substring and catch-all entries.
  Entry* chosen = nullptr;
  for (auto& e : entries_) {
    if (e.prompt_hash && *e.prompt_hash == hash) {
      chosen = &e;
      break;
    }
  }
  if (!chosen) {
    for (auto& e : entries_) {
      if (!e.prompt_hash && matches(e)) {
        chosen = &e;
        break;
      }
    }
  }
  if (!chosen) throw FixtureExhausted("scripted fixture has no entry for prompt hash " + hash);
  if (chosen->next >= chosen->responses.size()) {
    throw FixtureExhausted("scripted fixture exhausted for prompt hash " + hash);
  }
  return chosen->responses[chosen->next++];
}

Gateway::Gateway(ProviderConfig config, Session session) : config_(std::move(config)), session_(std::move(session)) {
  config_.validate();
  if (session_.mode == SessionMode::replay && !session_.store) throw ConfigError("replay mode needs an exchange store");
  if (session_.mode == SessionMode::scripted && !session_.fixture) throw ConfigError("scripted mode needs a fixture");
}

Exchange Gateway::complete(const RenderedPrompt& prompt) {
  if (config_.max_prompt_chars > 0 && prompt.text.size() > config_.max_prompt_chars) {
    throw ConfigError("prompt of " + std::to_string(prompt.text.size()) + " characters exceeds the cap of " +
                      std::to_string(config_.max_prompt_chars));
  }
  const std::string hash = prompt_hash(config_.model_name, prompt.text, config_.temperature);
  Exchange e;
  switch (session_.mode) {
    case SessionMode::scripted: {
      e.prompt_hash = hash;
      e.model_name = config_.model_name;
      e.request_text = prompt.text;
      e.response_text = session_.fixture->next(hash, prompt.text);
      e.provenance = Provenance::scripted;
      e.timestamp = utc_timestamp();
      e.temperature = config_.temperature;
      break;
    }
    case SessionMode::replay: {
      auto found = session_.store->find(hash);
      if (!found) throw ReplayMiss(hash);
      e = std::move(*found);
      e.provenance = Provenance::replay;
      break;
    }
    case SessionMode::live_record: {
      if (session_.store && session_.reuse_recorded) {
        if (auto found = session_.store->find(hash)) {
          e = std::move(*found);
          e.provenance = Provenance::replay;
          break;
        }
      }
      e = call_live(hash, prompt.text);
      if (session_.store) session_.store->append(e);
      break;
    }
  }
  std::lock_guard lock(stats_mutex_);
  switch (e.provenance) {
    case Provenance::live: ++stats_.live; break;
    case Provenance::replay: ++stats_.replay; break;
    case Provenance::scripted: ++stats_.scripted; break;
  }
  if (e.provenance == Provenance::live) stats_.retries += static_cast<std::size_t>(e.retries);
  return e;
}

std::vector<Exchange> Gateway::complete_all(const std::vector<RenderedPrompt>& prompts) {
  std::vector<Exchange> out(prompts.size());
  if (session_.mode != SessionMode::live_record || config_.max_concurrency <= 1 || prompts.size() <= 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) out[i] = complete(prompts[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_concurrency), prompts.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) {
          try {
            out[i] = complete(prompts[i]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next = prompts.size();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

GatewayStats Gateway::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /v1/chat/completions
};

Endpoint endpoint_for(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("provider base_url lacks a scheme: " + base_url);
  const auto path_start = base_url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  ep.path = prefix + "/chat/completions";
  return ep;
}

bool transient_status(int status) { return status == 408 || status == 409 || status == 429 || status >= 500; }

}  // namespace

Exchange Gateway::call_live(const std::string& hash, const std::string& text) {
  const Endpoint ep = endpoint_for(config_.base_url);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) throw ConfigError("environment variable " + config_.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  json body = {{"model", config_.model_name},
               {"messages", json::array({json{{"role", "user"}, {"content", text}}})}};
  if (config_.temperature) body["temperature"] = *config_.temperature;
  const std::string payload = body.dump();

  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  auto jitter = stream_for(static_cast<std::uint64_t>(
                               std::chrono::steady_clock::now().time_since_epoch().count()),
                           hash);
  std::string last_failure;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = config_.backoff_base_seconds * std::pow(2.0, attempt - 1) * (0.5 + jitter.unit());
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    auto res = client.Post(ep.path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      Exchange e;
      try {
        const json reply = json::parse(res->body);
        e.response_text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& ex) {
        throw ProviderError(std::string("unexpected chat-completions response: ") + ex.what());
      }
      e.prompt_hash = hash;
      e.model_name = config_.model_name;
      e.request_text = text;
      e.provenance = Provenance::live;
      e.timestamp = utc_timestamp();
      e.retries = attempt;
      e.temperature = config_.temperature;
      return e;
    }
    last_failure = "HTTP " + std::to_string(res->status);
    if (!transient_status(res->status)) throw ProviderError("provider request failed: " + last_failure);
  }
  throw ProviderError("provider request failed after " + std::to_string(config_.max_retries) +
                      " retries: " + last_failure);
}

}  // namespace intentdisc
