#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "repodoc/prompt.hpp"

namespace repodoc {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  long max_completion_tokens = kDefaultCompletionReserve;
  double temperature = 0.2;
  std::string object_id;  // for error messages only

  bool operator==(const CompletionRequest&) const = default;
};

struct CompletionResponse {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  std::string model;

  bool operator==(const CompletionResponse&) const = default;
};

/// Thrown by providers for failures worth retrying (network, 429, 5xx).
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Provider {
 public:
  virtual ~Provider() = default;
  /// Throws TransientError, or Error(Auth/Provider) for permanent failures.
  virtual CompletionResponse send(const CompletionRequest& request) = 0;
};

/// Offline provider. Reads the object name, kind, parameter bullets and the
/// Output Example instruction from the prompt's format block and answers with
/// a compliant five-section doc.
class MockProvider final : public Provider {
 public:
  /// `fail_ids`: object ids (or "*" for all) whose requests fail transiently.
  explicit MockProvider(std::vector<std::string> fail_ids = {});
  CompletionResponse send(const CompletionRequest& request) override;

 private:
  std::vector<std::string> fail_ids_;
};

/// OpenAI-style chat-completion endpoint: POST <base_url>/chat/completions.
class HttpProvider final : public Provider {
 public:
  HttpProvider(std::string base_url, std::string api_key,
               std::chrono::seconds timeout = std::chrono::seconds(120));
  CompletionResponse send(const CompletionRequest& request) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // base path without trailing '/'
  std::string api_key_;
  std::chrono::seconds timeout_;
};

/// Renders the doc the mock would answer for a prompt.
std::string mock_document(std::string_view prompt);

struct UsageLedger {
  long attempts = 0;  // provider calls, retries included
  long requests = 0;  // successful completions
  long failures = 0;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  bool operator==(const UsageLedger&) const = default;
};

struct GatewayOptions {
  int retries = 3;          // extra attempts after the first
  int max_concurrency = 4;
  std::chrono::milliseconds base_backoff{1000};  // doubled per retry
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class Gateway {
 public:
  Gateway(std::unique_ptr<Provider> provider, GatewayOptions options = {}, Sleeper sleeper = {});

  /// Retries transient failures with exponential backoff. Throws
  /// Error(Usage) on a malformed request, Error(Auth) on rejected
  /// credentials and Error(Provider) once retries are exhausted.
  CompletionResponse complete(const CompletionRequest& request);

  [[nodiscard]] UsageLedger usage() const;

 private:
  std::unique_ptr<Provider> provider_;
  GatewayOptions options_;
  Sleeper sleeper_;
  mutable std::mutex mutex_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
  UsageLedger ledger_;
};

/// "mock:" / "mock:fail" / "mock:fail=<id>,<id>" select the mock provider;
/// anything else is an HTTP base URL using REPODOC_API_KEY.
std::unique_ptr<Provider> make_provider(std::string_view base_url);

/// Smallest tier that leaves room for the completion; Error(OverBudget) if
/// none does.
ModelTier select_model(long token_estimate, std::span<const ModelTier> tiers,
                       long reserve = kDefaultCompletionReserve);

}  // namespace repodoc
