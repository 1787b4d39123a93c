#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repodoc/doc_pipeline.hpp"
#include "repodoc/llm_gateway.hpp"
#include "repodoc/prompt.hpp"

namespace repodoc {

inline constexpr std::string_view kConfigFileName = ".repodoc.json";

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::vector<ModelTier> tiers = {{"gpt-3.5-turbo", 4096}, {"gpt-3.5-turbo-16k", 16384}};
  double temperature = 0.2;
  int retries = 3;
  int max_concurrency = 4;
};

struct Config {
  std::filesystem::path repo_root;
  std::vector<std::string> ignore;
  std::filesystem::path doc_dir = "markdown_docs";  // relative to repo_root
  std::filesystem::path store_path{std::string(kDefaultStorePath)};
  ProviderConfig provider;
  std::string doc_language = "English";
  bool child_docs_enabled = false;
  long completion_reserve_tokens = kDefaultCompletionReserve;

  [[nodiscard]] std::filesystem::path doc_dir_abs() const;
  [[nodiscard]] std::filesystem::path store_path_abs() const;
  /// The store directory (".project_doc_record").
  [[nodiscard]] std::filesystem::path record_dir_abs() const;

  [[nodiscard]] PipelineOptions pipeline_options(unsigned jobs) const;
  [[nodiscard]] GatewayOptions gateway_options() const;
};

/// Reads `config_path` (default: <repo_root>/.repodoc.json) over the
/// defaults. A missing default file means all defaults; a missing explicit
/// file, malformed JSON (reported with line/column), unknown keys or invalid
/// values throw Error(Usage).
Config load_config(const std::filesystem::path& repo_root,
                   const std::optional<std::filesystem::path>& config_path = std::nullopt);

/// Applies a JSON object onto `config`; same validation as load_config.
void apply_config_json(Config& config, const nlohmann::json& j);

}  // namespace repodoc
