#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "repodoc/doc_store.hpp"

namespace repodoc {

struct DocPage {
  std::string source_file;
  std::string output_path;  // relative to the doc dir, e.g. "util/b.md"
  std::string body;
  bool operator==(const DocPage&) const = default;
};

/// "a/b.py" -> "a/b.md".
std::string page_path_for(std::string_view source_file);

/// Markdown for one object: heading ("<level> ClassDef|FunctionDef <name>")
/// then its sections with bold labels.
std::string render_object(const CodeObject& object, const DocRecord* record, int depth);

/// One page per File node; objects in source order, heading level 2 + depth
/// capped at 6.
DocPage compile_file_doc(const RepoGraph& graph, std::string_view file_id, const DocStore& store);

std::string render_summary(const std::vector<DocPage>& pages);

struct SiteResult {
  std::vector<std::string> pages;    // every emitted file, relative to out_dir, sorted
  std::vector<std::string> written;  // files whose content changed
  std::vector<std::string> removed;  // stale pages deleted
};

/// Writes every page plus SUMMARY.md under `out_dir`, rewriting only changed
/// files and deleting stale .md files. Throws Error(Io) when out_dir cannot
/// be written.
SiteResult write_site(const RepoGraph& graph, const DocStore& store, const std::filesystem::path& out_dir);

}  // namespace repodoc
