#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "repodoc/doc_format.hpp"
#include "repodoc/project_graph.hpp"

namespace repodoc {

inline constexpr std::string_view kDefaultStorePath = ".project_doc_record/project_hierarchy.json";

struct DocRecord {
  std::string id;
  ObjectKind kind = ObjectKind::Function;
  std::string name_label;
  std::string name_header;
  std::string param_label;  // "parameters" or "Attributes"
  std::string param_text;   // section content as generated
  std::vector<std::pair<std::string, std::string>> param_section;
  std::string code_description;
  std::string note;
  std::optional<std::string> output_example;
  std::string source_hash;  // empty marks a record that must be regenerated
  std::string model;
  std::string generated_at;
  std::string raw_text;

  bool operator==(const DocRecord&) const = default;
};

struct DocStore {
  RepoGraph graph;  // snapshot used by the last run
  std::map<std::string, DocRecord> records;

  [[nodiscard]] const DocRecord* record(std::string_view id) const;
  bool operator==(const DocStore&) const = default;
};

/// SHA-256 (hex) of the snippet after stripping trailing whitespace per line
/// and normalizing line endings to LF.
std::string hash_source(std::string_view snippet);

DocRecord make_record(const CodeObject& object, std::string_view raw_text, std::string model,
                      std::string generated_at);

nlohmann::json store_to_json(const DocStore& store);
DocStore store_from_json(const nlohmann::json& j);

/// Writes to a temporary sibling file, then renames over `path`.
void save_store(const DocStore& store, const std::filesystem::path& path);

/// Missing file yields an empty store; an unreadable or malformed one throws
/// Error(Store).
DocStore load_store(const std::filesystem::path& path);

/// Replaces `path` atomically with `content`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace repodoc
