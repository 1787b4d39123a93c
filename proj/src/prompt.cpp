#include "repodoc/prompt.hpp"

#include <algorithm>

#include "repodoc/error.hpp"

namespace repodoc {

namespace {

std::string last_segment(std::string_view id) {
  const auto slash = id.rfind('/');
  return std::string(slash == std::string_view::npos ? id : id.substr(slash + 1));
}

std::string kind_word(ObjectKind kind) { return kind == ObjectKind::Class ? "Class" : "Function"; }

void render_block(std::string& out, const RefBlock& b) {
  out += "OBJ_NAME: " + b.name + "\n";
  out += "OBJ_PATH: " + b.id + "\n";
  out += "Document: \n" + b.doc + "\n";
  if (b.snippet) {
    out += "[Code begin of " + b.name + "]\n";
    out += "```\n" + *b.snippet + "\n```==========\n";
    out += "[Code end of " + b.name + "]\n";
  }
  out += "\n";
}

RefBlock make_block(const RepoGraph& graph, const DocStore& store, const std::string& id, bool required,
                    const AssembleOptions& options, std::string_view target) {
  const CodeObject* obj = graph.object(id);
  if (obj == nullptr) throw Error(ErrorKind::Internal, "edge to unknown object " + id);
  RefBlock b{id, obj->name, "None", obj->snippet};
  const DocRecord* rec = store.record(id);
  const bool failed = options.failed != nullptr && options.failed->contains(id);
  if (rec != nullptr && !failed) {
    b.doc = rec->raw_text;
  } else if (required && !failed) {
    throw Error(ErrorKind::Scheduling,
                "no documentation for " + id + " while generating " + std::string(target));
  }
  return b;
}

}  // namespace

std::string render_hierarchy(const RepoGraph& graph, std::string_view id, bool with_members) {
  std::vector<std::string> chain;
  std::string cur(id);
  while (!cur.empty() && cur != kRepoRootId) {
    auto it = graph.tree.find(cur);
    if (it == graph.tree.end()) throw Error(ErrorKind::Internal, "unknown tree node " + cur);
    chain.push_back(cur);
    cur = it->second.parent;
  }
  std::reverse(chain.begin(), chain.end());

  std::string out;
  for (std::size_t depth = 0; depth < chain.size(); ++depth) {
    out += std::string(depth * 4, ' ');
    if (depth + 1 == chain.size()) out += "*";
    out += last_segment(chain[depth]) + "\n";
  }
  if (with_members) {
    for (const auto& child : graph.member_objects(id)) {
      out += std::string(chain.size() * 4, ' ') + last_segment(child) + "\n";
    }
  }
  return out;
}

PromptContext assemble_context(const RepoGraph& graph, const DocStore& store, std::string_view id,
                               const AssembleOptions& options) {
  const CodeObject* target = graph.object(id);
  if (target == nullptr) throw Error(ErrorKind::Internal, "unknown object " + std::string(id));
  PromptContext ctx;
  ctx.target = *target;
  ctx.hierarchy_render = render_hierarchy(graph, id, true);
  ctx.hierarchy_chain = render_hierarchy(graph, id, false);
  ctx.doc_language = options.doc_language;
  for (const auto& callee : graph.callees(id)) {
    ctx.callee_blocks.push_back(make_block(graph, store, callee, true, options, id));
  }
  for (const auto& caller : graph.callers(id)) {
    ctx.caller_blocks.push_back(make_block(graph, store, caller, false, options, id));
  }
  if (options.child_docs) {
    std::vector<ChildDoc> docs;
    for (const auto& child : graph.member_objects(id)) {
      RefBlock b = make_block(graph, store, child, true, options, id);
      docs.push_back({child, std::move(b.doc)});
    }
    ctx.child_docs = std::move(docs);
  }
  return ctx;
}

std::string render_format_block(const CodeObject& target) {
  const std::string kind = kind_word(target.kind);
  std::string out = "The standard format is as follows:\n\n";
  out += "**" + target.name + "**: The function of " + target.name + " is XXX\n";
  if (target.kind == ObjectKind::Class) {
    out += "**Attributes**: The attributes of this Class.\n";
  } else {
    out += "**parameters**: The parameters of this Function.\n";
  }
  if (target.params.empty()) {
    out += "- None\n";
  } else {
    for (const auto& p : target.params) out += "- `" + p + "`: XXX\n";
  }
  out += "**Code Description**: The description of this " + kind + ".\n";
  out += "(Detailed and CERTAIN code analysis and description...)\n";
  out += "**Note**: Points to note about the use of the code\n";
  if (target.has_return) {
    out += "**Output Example**: Mock up a possible appearance of the code's return value.\n";
  }
  return out;
}

std::string render_prompt(const PromptContext& ctx) {
  const CodeObject& t = ctx.target;
  const std::string kind = kind_word(t.kind);
  std::string out;
  out +=
      "You are an AI documentation assistant, and your task is to generate documentation based on the "
      "given code of an object. The purpose of the documentation is to help developers and beginners "
      "understand the function and specific usage of the code.\n\n";
  out +=
      "Currently, you are in a project, and the related hierarchical structure of this project is as "
      "follows (The current object is marked with an *):\n";
  out += ctx.hierarchy_render + "\n";
  out += "The path of the document you need to generate in this project is:\n" + t.doc_path + ".\n\n";
  out += "Now you need to generate a document for a " + kind + ", whose name is \"" + t.name + "\".\n\n";
  out += "The content of the code is as follows:\n\n" + t.snippet + "\n\n";

  if (!ctx.callee_blocks.empty()) {
    out += "As you can see, the code calls the following objects, their code and docs are as following:\n\n";
    for (const auto& b : ctx.callee_blocks) render_block(out, b);
  }
  if (!ctx.caller_blocks.empty()) {
    out += "Also, the code has been called by the following objects, their code and docs are as following:\n\n";
    for (const auto& b : ctx.caller_blocks) render_block(out, b);
  }
  if (ctx.child_docs && !ctx.child_docs->empty()) {
    out += "The members of this object are documented as following:\n\n";
    for (const auto& c : *ctx.child_docs) {
      out += "OBJ_PATH: " + c.id + "\nDocument: \n" + c.doc + "\n\n";
    }
  }

  out +=
      "Please generate a detailed explanation document for this object based on the code of the target "
      "object itself and combine it with its calling situation in the project.\n\n";
  out += "Please write out the function of this " + kind +
         " in bold plain text, followed by a detailed analysis in plain text (including all details), in "
         "language " +
         ctx.doc_language + " to serve as the documentation for this part of the code.\n\n";
  out += render_format_block(t) + "\n";
  out += "Please note:\n";
  out += "- Any part of the content you generate SHOULD NOT CONTAIN Markdown hierarchical heading and divider syntax.\n";
  out +=
      "- Write mainly in the desired language. If necessary, you can write with some English words in the "
      "analysis and description to enhance the document's readability because you do not need to translate "
      "the function name or variable name into the target language.\n\n";
  out +=
      "Keep in mind that your audience is document readers, so use a deterministic tone to generate precise "
      "content and don't let them know you're provided with code snippet and documents. AVOID ANY "
      "SPECULATION and inaccurate descriptions! Now, provide the documentation for the target object in " +
      ctx.doc_language + " in a professional way.\n";
  return out;
}

long estimate_tokens(std::string_view text) { return static_cast<long>((text.size() + 3) / 4); }

std::optional<ModelTier> select_tier(long token_estimate, std::span<const ModelTier> tiers, long reserve) {
  for (const auto& t : tiers) {
    if (t.context_window >= token_estimate + reserve) return t;
  }
  return std::nullopt;
}

std::string_view to_string(Reduction r) {
  switch (r) {
    case Reduction::DropCallerSnippets: return "drop-caller-snippets";
    case Reduction::DropCallers: return "drop-callers";
    case Reduction::DropCalleeSnippets: return "drop-callee-snippets";
    case Reduction::CollapseHierarchy: return "collapse-hierarchy";
    case Reduction::DropChildDocs: return "drop-child-docs";
  }
  return "?";
}

namespace {

bool apply(Reduction r, PromptContext& ctx) {
  auto drop_snippets = [](std::vector<RefBlock>& blocks) {
    bool changed = false;
    for (auto& b : blocks) {
      changed = changed || b.snippet.has_value();
      b.snippet.reset();
    }
    return changed;
  };
  switch (r) {
    case Reduction::DropCallerSnippets: return drop_snippets(ctx.caller_blocks);
    case Reduction::DropCallers: {
      const bool changed = !ctx.caller_blocks.empty();
      ctx.caller_blocks.clear();
      return changed;
    }
    case Reduction::DropCalleeSnippets: return drop_snippets(ctx.callee_blocks);
    case Reduction::CollapseHierarchy: {
      const bool changed = ctx.hierarchy_render != ctx.hierarchy_chain;
      ctx.hierarchy_render = ctx.hierarchy_chain;
      return changed;
    }
    case Reduction::DropChildDocs: {
      const bool changed = ctx.child_docs && !ctx.child_docs->empty();
      ctx.child_docs.reset();
      return changed;
    }
  }
  return false;
}

}  // namespace

FitResult fit_to_budget(const PromptContext& ctx, std::span<const ModelTier> tiers, long reserve) {
  if (tiers.empty()) throw Error(ErrorKind::Usage, "no model tiers configured");
  FitResult result{ctx, {}, {}, estimate_tokens(render_prompt(ctx))};
  static constexpr Reduction kOrder[] = {Reduction::DropCallerSnippets, Reduction::DropCallers,
                                         Reduction::DropCalleeSnippets, Reduction::CollapseHierarchy,
                                         Reduction::DropChildDocs};
  std::size_t step = 0;
  while (true) {
    if (auto tier = select_tier(result.estimate, tiers, reserve)) {
      result.tier = *tier;
      return result;
    }
    while (step < std::size(kOrder) && !apply(kOrder[step], result.ctx)) ++step;
    if (step == std::size(kOrder)) {
      throw Error(ErrorKind::OverBudget,
                  ctx.target.id + ": prompt needs " + std::to_string(result.estimate) + "+" +
                      std::to_string(reserve) + " tokens, largest tier " + tiers.back().name + " has " +
                      std::to_string(tiers.back().context_window));
    }
    result.applied.push_back(kOrder[step++]);
    result.estimate = estimate_tokens(render_prompt(result.ctx));
  }
}

}  // namespace repodoc
