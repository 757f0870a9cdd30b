#pragma once

#include <stdexcept>
#include <string>

namespace intentdisc {

// Root of every error the library raises. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or input data (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input files: corpora, splits, embeddings (exit code 2).
class DataError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Provider, replay store or scripted fixture failure (exit code 3).
class ProviderError : public Error {
 public:
  using Error::Error;
};

class ReplayMiss : public ProviderError {
 public:
  explicit ReplayMiss(const std::string& hash)
      : ProviderError("replay miss: no recorded exchange for prompt hash " + hash), hash_(hash) {}
  const std::string& hash() const noexcept { return hash_; }

 private:
  std::string hash_;
};

class FixtureExhausted : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// A model response that cannot be interpreted at all (exit code 4).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace intentdisc
