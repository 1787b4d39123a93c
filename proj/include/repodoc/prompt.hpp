#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repodoc/doc_store.hpp"
#include "repodoc/project_graph.hpp"

namespace repodoc {

struct ModelTier {
  std::string name;
  long context_window = 0;  // tokens
  bool operator==(const ModelTier&) const = default;
};

inline constexpr long kDefaultCompletionReserve = 1024;

/// A caller or callee shown to the model.
struct RefBlock {
  std::string id;
  std::string name;
  std::string doc;                     // generated doc text, or "None"
  std::optional<std::string> snippet;  // dropped by budget reductions
  bool operator==(const RefBlock&) const = default;
};

struct ChildDoc {
  std::string id;
  std::string doc;
  bool operator==(const ChildDoc&) const = default;
};

struct PromptContext {
  CodeObject target;
  std::string hierarchy_render;  // ancestor chain + target's members
  std::string hierarchy_chain;   // ancestor chain down to the target only
  std::vector<RefBlock> callee_blocks;
  std::vector<RefBlock> caller_blocks;
  std::optional<std::vector<ChildDoc>> child_docs;
  std::string doc_language = "English";
  bool operator==(const PromptContext&) const = default;
};

struct AssembleOptions {
  bool child_docs = false;
  std::string doc_language = "English";
  /// Ids whose generation failed in this run; rendered as "None" instead of
  /// raising a scheduling error.
  const std::set<std::string>* failed = nullptr;
};

/// Throws Error(Scheduling) when a callee (or member, with child docs on) has
/// no record and did not fail.
PromptContext assemble_context(const RepoGraph& graph, const DocStore& store, std::string_view id,
                               const AssembleOptions& options = {});

/// Indented hierarchy lines (4 spaces per level) from the top directory down
/// to the target, marked with '*', followed by its members when requested.
std::string render_hierarchy(const RepoGraph& graph, std::string_view id, bool with_members);

std::string render_prompt(const PromptContext& ctx);

/// The "standard format" block embedded in every prompt.
std::string render_format_block(const CodeObject& target);

long estimate_tokens(std::string_view text);

/// Smallest tier with context_window >= estimate + reserve.
std::optional<ModelTier> select_tier(long token_estimate, std::span<const ModelTier> tiers,
                                     long reserve = kDefaultCompletionReserve);

enum class Reduction { DropCallerSnippets, DropCallers, DropCalleeSnippets, CollapseHierarchy, DropChildDocs };

std::string_view to_string(Reduction r);

struct FitResult {
  PromptContext ctx;
  ModelTier tier;
  std::vector<Reduction> applied;
  long estimate = 0;  // of the final prompt
};

/// Picks the smallest fitting tier; if none fits, applies reductions in fixed
/// order (skipping steps that change nothing) until the prompt fits. Throws
/// Error(OverBudget) naming the object when nothing helps.
FitResult fit_to_budget(const PromptContext& ctx, std::span<const ModelTier> tiers,
                        long reserve = kDefaultCompletionReserve);

}  // namespace repodoc
