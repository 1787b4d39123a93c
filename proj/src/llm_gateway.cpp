#include "repodoc/llm_gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "repodoc/error.hpp"

namespace repodoc {

namespace {

std::string_view line_at(std::string_view text, std::size_t pos) {
  const auto end = text.find('\n', pos);
  return text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
}

std::string between(std::string_view text, std::string_view open, char close) {
  const auto b = text.find(open);
  if (b == std::string_view::npos) return {};
  const auto start = b + open.size();
  const auto e = text.find(close, start);
  if (e == std::string_view::npos) return {};
  return std::string(text.substr(start, e - start));
}

}  // namespace

// --- mock --------------------------------------------------------------------

std::string mock_document(std::string_view prompt) {
  const std::string name = between(prompt, "whose name is \"", '"');
  const bool is_class = prompt.find("generate a document for a Class,") != std::string_view::npos;

  std::string_view block;
  if (const auto b = prompt.find("The standard format is as follows:"); b != std::string_view::npos) {
    const auto e = prompt.find("\nPlease note:", b);
    block = prompt.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b);
  }
  std::vector<std::string> params;
  for (std::size_t pos = 0; pos < block.size();) {
    const std::string_view line = line_at(block, pos);
    if (line.starts_with("- `")) {
      const auto close = line.find('`', 3);
      if (close != std::string_view::npos) params.emplace_back(line.substr(3, close - 3));
    }
    pos += line.size() + 1;
  }
  const bool output = block.find("**Output Example**:") != std::string_view::npos;

  std::string out = "**" + name + "**: The function of " + name + " is " + name + " stub.\n\n";
  out += is_class ? "**Attributes**:" : "**parameters**:";
  if (params.empty()) {
    out += " None.\n";
  } else {
    out += "\n";
    for (const auto& p : params) out += "- `" + p + "`: stub description of " + p + ".\n";
  }
  out += "\n**Code Description**: " + name + " is a " + (is_class ? "class" : "function") +
         " stub for offline runs.\n\n";
  out += "**Note**: Generated by the mock provider.\n";
  if (output) out += "\n**Output Example**: " + name + " stub output.\n";
  return out;
}

MockProvider::MockProvider(std::vector<std::string> fail_ids) : fail_ids_(std::move(fail_ids)) {}

CompletionResponse MockProvider::send(const CompletionRequest& request) {
  for (const auto& f : fail_ids_) {
    if (f == "*" || f == request.object_id) throw TransientError("mock failure for " + request.object_id);
  }
  CompletionResponse r;
  r.text = mock_document(request.prompt);
  r.prompt_tokens = estimate_tokens(request.prompt);
  r.completion_tokens = estimate_tokens(r.text);
  r.model = request.model;
  return r;
}

// --- http --------------------------------------------------------------------

HttpProvider::HttpProvider(std::string base_url, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme = base_url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorKind::Usage, "provider base_url needs a scheme: " + base_url);
  const auto path = base_url.find('/', scheme + 3);
  origin_ = base_url.substr(0, path);
  path_ = path == std::string::npos ? "" : base_url.substr(path);
  while (path_.ends_with('/')) path_.pop_back();
}

CompletionResponse HttpProvider::send(const CompletionRequest& request) {
  httplib::Client client(origin_);
  if (!client.is_valid()) throw Error(ErrorKind::Usage, "unsupported provider URL " + origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  const nlohmann::json body = {{"model", request.model},
                               {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
                               {"max_tokens", request.max_completion_tokens},
                               {"temperature", request.temperature}};
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto res = client.Post(path_ + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw TransientError("request failed: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorKind::Auth, "provider rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientError("provider returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::Provider, "provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    CompletionResponse r;
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    const auto usage = j.value("usage", nlohmann::json::object());
    r.prompt_tokens = usage.value("prompt_tokens", estimate_tokens(request.prompt));
    r.completion_tokens = usage.value("completion_tokens", estimate_tokens(r.text));
    r.model = j.value("model", request.model);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Provider, std::string("malformed provider response: ") + e.what());
  }
}

// --- gateway -----------------------------------------------------------------

Gateway::Gateway(std::unique_ptr<Provider> provider, GatewayOptions options, Sleeper sleeper)
    : provider_(std::move(provider)), options_(options), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  options_.max_concurrency = std::max(1, options_.max_concurrency);
  options_.retries = std::max(0, options_.retries);
}

CompletionResponse Gateway::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) throw Error(ErrorKind::Usage, "completion request with empty prompt");
  if (request.max_completion_tokens < 1) throw Error(ErrorKind::Usage, "max_completion_tokens must be >= 1");

  {
    std::unique_lock lock(mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < options_.max_concurrency; });
    ++in_flight_;
  }
  struct Release {
    Gateway& g;
    ~Release() {
      {
        std::lock_guard lock(g.mutex_);
        --g.in_flight_;
      }
      g.slots_cv_.notify_one();
    }
  } release{*this};

  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) sleeper_(options_.base_backoff * (1 << (attempt - 1)));
    {
      std::lock_guard lock(mutex_);
      ++ledger_.attempts;
    }
    try {
      CompletionResponse r = provider_->send(request);
      std::lock_guard lock(mutex_);
      ++ledger_.requests;
      ledger_.prompt_tokens += r.prompt_tokens;
      ledger_.completion_tokens += r.completion_tokens;
      return r;
    } catch (const TransientError& e) {
      last_error = e.what();
    } catch (const Error&) {
      std::lock_guard lock(mutex_);
      ++ledger_.failures;
      throw;
    }
  }
  {
    std::lock_guard lock(mutex_);
    ++ledger_.failures;
  }
  throw Error(ErrorKind::Provider, request.object_id + ": giving up after " +
                                       std::to_string(options_.retries + 1) + " attempts: " + last_error);
}

UsageLedger Gateway::usage() const {
  std::lock_guard lock(mutex_);
  return ledger_;
}

std::unique_ptr<Provider> make_provider(std::string_view base_url) {
  if (base_url.starts_with("mock:")) {
    const std::string_view rest = base_url.substr(5);
    std::vector<std::string> fail;
    if (rest == "fail") {
      fail.emplace_back("*");
    } else if (rest.starts_with("fail=")) {
      std::string_view ids = rest.substr(5);
      while (!ids.empty()) {
        const auto comma = ids.find(',');
        fail.emplace_back(ids.substr(0, comma));
        ids = comma == std::string_view::npos ? std::string_view{} : ids.substr(comma + 1);
      }
    } else if (!rest.empty()) {
      throw Error(ErrorKind::Usage, "unknown mock provider mode: " + std::string(base_url));
    }
    return std::make_unique<MockProvider>(std::move(fail));
  }
  const char* key = std::getenv("REPODOC_API_KEY");
  if (key == nullptr || *key == '\0') throw Error(ErrorKind::Auth, "REPODOC_API_KEY is not set");
  return std::make_unique<HttpProvider>(std::string(base_url), key);
}

ModelTier select_model(long token_estimate, std::span<const ModelTier> tiers, long reserve) {
  if (auto t = select_tier(token_estimate, tiers, reserve)) return *t;
  throw Error(ErrorKind::OverBudget, "estimate of " + std::to_string(token_estimate) +
                                         " tokens exceeds every model tier");
}

}  // namespace repodoc
