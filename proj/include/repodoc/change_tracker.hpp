#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "repodoc/config.hpp"
#include "repodoc/doc_pipeline.hpp"
#include "repodoc/llm_gateway.hpp"
#include "repodoc/markdown_publisher.hpp"

namespace repodoc {

enum class ChangeKind { Added, Modified, Deleted, Renamed };

std::string_view to_string(ChangeKind kind);

struct FileChange {
  std::string path;
  ChangeKind kind = ChangeKind::Modified;
  bool operator==(const FileChange&) const = default;
};

using EdgeKey = std::pair<std::string, std::string>;  // (caller, callee)

struct ChangeSet {
  std::set<std::string> added_objects;
  std::set<std::string> removed_objects;
  std::set<std::string> modified_objects;
  std::set<EdgeKey> edge_added;
  std::set<EdgeKey> edge_removed;
  bool operator==(const ChangeSet&) const = default;
};

/// Listed in priority order: an id matching several triggers keeps the first.
enum class Trigger { SourceModified, NewObject, ReferrerRemoved, NewReference };

std::string_view to_string(Trigger t);

struct UpdatePlan {
  std::vector<std::pair<std::string, Trigger>> regenerate;  // sorted by (trigger, id)
  std::vector<std::string> delete_docs;                       // sorted
  bool operator==(const UpdatePlan&) const = default;
};

/// Absolute work tree root; throws Error(NotGitRepo) outside a repository.
std::filesystem::path git_toplevel(const std::filesystem::path& dir);

/// Index vs HEAD (or the empty tree before the first commit), restricted to
/// analyzed-language files. Renames are reported as Deleted + Added.
std::vector<FileChange> staged_changes(const std::filesystem::path& repo_root,
                                       std::span<const std::string> ignore = {});

/// Analyzed-language files in the index with their staged content, sorted by path.
std::vector<std::pair<std::string, std::string>> index_sources(const std::filesystem::path& repo_root,
                                                               std::span<const std::string> ignore = {});

ChangeSet diff_objects(const RepoGraph& old_graph, const RepoGraph& new_graph);

UpdatePlan plan_updates(const ChangeSet& changes);

struct UpdateReport {
  std::vector<FileChange> staged;
  UpdatePlan plan;
  /// Objects without a usable record that were regenerated alongside the
  /// plan (left over from an earlier failed run).
  std::vector<std::string> repaired;
  RunReport run;
  SiteResult site;
  std::vector<std::string> parse_errors;  // "file: message"
};

/// Single-flight incremental update from the staged state. On any failure
/// the store and pages are left untouched and an Error is thrown.
UpdateReport run_update(const Config& config, Gateway& gateway, unsigned jobs = 1);

/// Holds .project_doc_record/.lock for its lifetime.
class UpdateLock {
 public:
  explicit UpdateLock(const std::filesystem::path& record_dir);
  UpdateLock(const UpdateLock&) = delete;
  UpdateLock& operator=(const UpdateLock&) = delete;
  ~UpdateLock();

 private:
  std::filesystem::path path_;
};

inline constexpr std::string_view kHookMarker = "# installed by repodoc";
inline constexpr std::string_view kChainedHookName = "pre-commit.repodoc-chained";

/// Text of the pre-commit script that runs `<cli> update`.
std::string render_hook(const std::filesystem::path& cli_path, const std::filesystem::path& hooks_dir);

/// Writes <hooks>/pre-commit. A foreign hook is moved to
/// pre-commit.repodoc-chained and run first; an existing repodoc hook is
/// rewritten in place.
std::filesystem::path install_hook(const std::filesystem::path& repo_root, const std::filesystem::path& cli_path);

}  // namespace repodoc
