#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "intentdisc/prompt.hpp"

namespace intentdisc {

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-3.5-turbo-0301";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_retries = 3;
  double timeout_seconds = 60.0;
  std::optional<double> temperature;  // omitted from requests when absent
  double backoff_base_seconds = 1.0;
  int max_concurrency = 4;
  std::size_t max_prompt_chars = 0;   // 0 disables the check

  /// Throws ConfigError when max_retries < 0, timeout <= 0 or concurrency < 1.
  void validate() const;
};

void to_json(nlohmann::json& j, const ProviderConfig& c);
/// Missing keys keep their defaults; "model" and "timeout" are accepted as aliases.
void from_json(const nlohmann::json& j, ProviderConfig& c);

enum class Provenance { live, replay, scripted };
std::string_view to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view s);

struct Exchange {
  std::string prompt_hash;
  std::string model_name;
  std::string request_text;
  std::string response_text;  // verbatim, never trimmed
  Provenance provenance = Provenance::scripted;
  std::string timestamp;      // ISO-8601 UTC
  int retries = 0;
  std::optional<double> temperature;
};

void to_json(nlohmann::json& j, const Exchange& e);
void from_json(const nlohmann::json& j, Exchange& e);

/// SHA-256 over (model_name, prompt text, temperature). The model name is part of the
/// key so responses from different models never alias; SHA-256 collisions are assumed away.
std::string prompt_hash(std::string_view model_name, std::string_view prompt_text, std::optional<double> temperature);

/// Append-only JSON-lines store of exchanges. Appends are serialized; the latest
/// exchange for a hash wins on lookup.
class ExchangeStore {
 public:
  /// Opens (creating if needed) the store. Corrupt lines are skipped and counted.
  static std::shared_ptr<ExchangeStore> open(const std::filesystem::path& path);

  void append(const Exchange& e);
  std::optional<Exchange> find(const std::string& hash) const;
  std::size_t size() const;
  std::size_t corrupt_lines() const noexcept { return corrupt_lines_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  explicit ExchangeStore(std::filesystem::path path) : path_(std::move(path)) {}

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::vector<Exchange> exchanges_;
  std::map<std::string, std::size_t> latest_;
  std::size_t corrupt_lines_ = 0;
};

/// Canned responses for offline runs. Entries match a prompt by exact hash, by a
/// substring of the prompt text, or unconditionally; each entry hands out its
/// responses in order and fails once they are used up.
class ScriptedFixture {
 public:
  struct Entry {
    std::optional<std::string> prompt_hash;
    std::optional<std::string> contains;
    std::vector<std::string> responses;
    std::size_t next = 0;
  };

  ScriptedFixture() = default;
  ScriptedFixture(ScriptedFixture&& other) noexcept : entries_(std::move(other.entries_)) {}

  static ScriptedFixture load(const std::filesystem::path& path);
  static ScriptedFixture from_json(const nlohmann::json& doc);

  /// Next response for the prompt. Throws FixtureExhausted when nothing is left.
  std::string next(const std::string& hash, std::string_view prompt_text);

 private:
  std::mutex mutex_;
  std::vector<Entry> entries_;
};

enum class SessionMode { live_record, replay, scripted };
SessionMode session_mode_from_string(std::string_view s);
std::string_view to_string(SessionMode m) noexcept;

struct Session {
  SessionMode mode = SessionMode::replay;
  std::shared_ptr<ExchangeStore> store;       // live_record (optional) and replay (required)
  std::shared_ptr<ScriptedFixture> fixture;   // scripted
  bool reuse_recorded = true;                 // live_record: answer from the store when the hash is known
};

struct GatewayStats {
  std::size_t live = 0;
  std::size_t replay = 0;
  std::size_t scripted = 0;
  std::size_t retries = 0;
};

/// Executes chat-completion calls or serves them from a store/fixture.
/// Shareable across threads.
class Gateway {
 public:
  Gateway(ProviderConfig config, Session session);

  Exchange complete(const RenderedPrompt& prompt);
  /// Same order as `prompts`. Live calls run up to max_concurrency at a time; other
  /// modes run sequentially so scripted responses are handed out deterministically.
  std::vector<Exchange> complete_all(const std::vector<RenderedPrompt>& prompts);

  GatewayStats stats() const;
  const ProviderConfig& config() const noexcept { return config_; }

 private:
  Exchange call_live(const std::string& hash, const std::string& text);

  ProviderConfig config_;
  Session session_;
  mutable std::mutex stats_mutex_;
  GatewayStats stats_;
};

}  // namespace intentdisc
