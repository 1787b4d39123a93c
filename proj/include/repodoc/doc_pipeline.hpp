#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "repodoc/doc_store.hpp"
#include "repodoc/error.hpp"
#include "repodoc/llm_gateway.hpp"
#include "repodoc/prompt.hpp"

namespace repodoc {

struct PipelineOptions {
  std::vector<ModelTier> tiers = {{"gpt-3.5-turbo", 4096}, {"gpt-3.5-turbo-16k", 16384}};
  long completion_reserve = kDefaultCompletionReserve;
  double temperature = 0.2;
  bool child_docs = false;
  std::string doc_language = "English";
  unsigned jobs = 1;
  /// When set, exactly these ids are regenerated and every other object is
  /// left as is (update mode). Otherwise objects are skipped by hash.
  std::optional<std::set<std::string>> only;
  /// Timestamp source for generated_at; defaults to the UTC wall clock.
  std::function<std::string()> clock;
};

struct GenerationFailure {
  std::string id;
  ErrorKind kind = ErrorKind::Provider;
  std::string message;
  bool operator==(const GenerationFailure&) const = default;
};

struct RunReport {
  std::vector<std::string> generated;  // completion order
  std::vector<std::string> skipped;
  std::vector<GenerationFailure> failures;
  std::vector<std::pair<std::string, std::vector<Reduction>>> reductions;
  long gateway_calls = 0;
  long prompt_tokens = 0;
  long completion_tokens = 0;

  [[nodiscard]] bool ok() const { return failures.empty(); }
};

nlohmann::json report_to_json(const RunReport& report);

/// True when `id` is documented, its source hash is unchanged and its
/// callers/callees (and members, with child docs) match the stored snapshot.
bool is_up_to_date(const RepoGraph& graph, const DocStore& store, const std::string& id, bool child_docs);

/// Generates documentation for every object of `graph` in dependency order
/// and updates `store` in memory (records and graph snapshot). Records of
/// objects that no longer exist are dropped. Per-object provider and budget
/// errors are collected in the report; the run continues with the failed doc
/// shown as "None" to dependents.
RunReport generate_all(const RepoGraph& graph, Gateway& gateway, DocStore& store, const PipelineOptions& options);

std::string utc_timestamp();

}  // namespace repodoc
