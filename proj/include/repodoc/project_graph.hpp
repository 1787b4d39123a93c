#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "repodoc/source_model.hpp"

namespace repodoc {

enum class NodeKind { Repo, Dir, File, Class, Function };

std::string_view to_string(NodeKind kind);

inline constexpr std::string_view kRepoRootId = ".";

struct TreeNode {
  std::string id;
  NodeKind kind = NodeKind::Repo;
  std::vector<std::string> children;  // sorted
  std::string parent;                 // empty for the root

  bool operator==(const TreeNode&) const = default;
};

struct ReferenceEdge {
  std::string caller;
  std::string callee;
  std::string site_file;
  int site_line = 0;

  bool operator==(const ReferenceEdge&) const = default;
};

/// An unresolved call, kept for inspection.
struct ResolveDiagnostic {
  std::string scope_id;
  std::string call;  // dotted chain as written
  int line = 0;
  std::string reason;
};

struct ProjectTree {
  std::map<std::string, TreeNode> nodes;
  std::map<std::string, CodeObject> objects;
};

class RepoGraph {
 public:
  std::map<std::string, TreeNode> tree;
  std::map<std::string, CodeObject> objects;
  std::vector<ReferenceEdge> edges;  // kept, sorted by (caller, callee)
  std::vector<ReferenceEdge> removed_edges;

  [[nodiscard]] const CodeObject* object(std::string_view id) const;
  [[nodiscard]] std::vector<std::string> callers(std::string_view id) const;
  [[nodiscard]] std::vector<std::string> callees(std::string_view id) const;
  /// Class/Function children of an object, sorted by id.
  [[nodiscard]] std::vector<std::string> member_objects(std::string_view id) const;

  bool operator==(const RepoGraph&) const = default;
};

struct PruneResult {
  std::vector<ReferenceEdge> kept;
  std::vector<ReferenceEdge> removed;  // in detection order
};

/// Repo root, one Dir per path component, one File per file, parsed objects
/// under their parents. Throws Error(Internal) on duplicate ids.
ProjectTree build_tree(std::span<const std::string> files, std::span<const FileParse> parses);

/// Resolves every call site in every object body to an in-repository
/// Class/Function. Edges are deduplicated on (caller, callee), self-edges
/// dropped, result sorted by (caller, callee).
std::vector<ReferenceEdge> resolve_references(const ProjectTree& tree,
                                              std::span<const FileParse> parses,
                                              std::vector<ResolveDiagnostic>* diagnostics = nullptr);

/// Depth-first traversal over callee edges (roots and neighbours in
/// lexicographic order); each back edge is removed when found.
PruneResult prune_cycles(std::span<const ReferenceEdge> edges);

/// Removes reference edges that close a cycle together with containment
/// (member before owner), e.g. a method instantiating its own class.
/// Expects `edges` to be acyclic among themselves.
PruneResult prune_containment_conflicts(const ProjectTree& tree, std::span<const ReferenceEdge> edges);

RepoGraph build_graph(std::span<const std::string> files, std::span<const FileParse> parses,
                      std::vector<ResolveDiagnostic>* diagnostics = nullptr);

/// Bottom-to-top generation order over Class/Function ids: callees before
/// callers, members before their owner, ties by id. Throws Error(Internal) on
/// a cycle.
std::vector<std::string> topological_order(const RepoGraph& graph);

nlohmann::json graph_to_json(const RepoGraph& graph);
RepoGraph graph_from_json(const nlohmann::json& j);
std::string graph_to_dot(const RepoGraph& graph);

}  // namespace repodoc
