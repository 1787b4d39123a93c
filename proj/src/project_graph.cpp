#include "repodoc/project_graph.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <variant>

#include "repodoc/error.hpp"

namespace repodoc {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Repo: return "Repo";
    case NodeKind::Dir: return "Dir";
    case NodeKind::File: return "File";
    case NodeKind::Class: return "Class";
    case NodeKind::Function: return "Function";
  }
  return "?";
}

namespace {

std::optional<NodeKind> node_kind_from_string(std::string_view s) {
  for (auto k : {NodeKind::Repo, NodeKind::Dir, NodeKind::File, NodeKind::Class, NodeKind::Function}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string parent_dir(std::string_view path) {
  const auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string(kRepoRootId) : std::string(path.substr(0, slash));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

// --- RepoGraph queries -------------------------------------------------------

const CodeObject* RepoGraph::object(std::string_view id) const {
  auto it = objects.find(std::string(id));
  return it == objects.end() ? nullptr : &it->second;
}

std::vector<std::string> RepoGraph::callers(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.callee == id) out.push_back(e.caller);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> RepoGraph::callees(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.caller == id) out.push_back(e.callee);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> RepoGraph::member_objects(std::string_view id) const {
  std::vector<std::string> out;
  auto it = tree.find(std::string(id));
  if (it == tree.end()) return out;
  for (const auto& child : it->second.children) {
    if (objects.contains(child)) out.push_back(child);
  }
  return out;
}

// --- tree --------------------------------------------------------------------

ProjectTree build_tree(std::span<const std::string> files, std::span<const FileParse> parses) {
  ProjectTree t;
  t.nodes.emplace(std::string(kRepoRootId), TreeNode{std::string(kRepoRootId), NodeKind::Repo, {}, ""});
  auto add = [&](const std::string& id, NodeKind kind, const std::string& parent) {
    auto [it, inserted] = t.nodes.emplace(id, TreeNode{id, kind, {}, parent});
    if (!inserted) {
      if (it->second.kind == kind && (kind == NodeKind::Dir)) return;
      throw Error(ErrorKind::Internal, "duplicate node id in project tree: " + id);
    }
    auto parent_it = t.nodes.find(parent);
    if (parent_it == t.nodes.end()) {
      throw Error(ErrorKind::Internal, "missing parent '" + parent + "' for node " + id);
    }
    parent_it->second.children.push_back(id);
  };

  for (const auto& file : files) {
    std::string prefix;
    std::size_t start = 0;
    while (true) {
      const auto slash = file.find('/', start);
      if (slash == std::string::npos) break;
      const std::string dir = file.substr(0, slash);
      add(dir, NodeKind::Dir, prefix.empty() ? std::string(kRepoRootId) : prefix);
      prefix = dir;
      start = slash + 1;
    }
    add(file, NodeKind::File, parent_dir(file));
  }
  for (const auto& fp : parses) {
    if (!t.nodes.contains(fp.file)) {
      throw Error(ErrorKind::Internal, "parse result for unscanned file " + fp.file);
    }
    for (const auto& obj : fp.objects) {
      add(obj.id, obj.kind == ObjectKind::Class ? NodeKind::Class : NodeKind::Function, obj.parent_id);
      t.objects.emplace(obj.id, obj);
    }
  }
  for (auto& [id, node] : t.nodes) std::sort(node.children.begin(), node.children.end());
  return t;
}

// --- resolution --------------------------------------------------------------

namespace {

struct ModuleEntry {
  std::string file;  // empty for a namespace directory
};

struct ObjectTarget {
  std::string id;
};
struct ModuleTarget {
  std::string name;
};
struct Unresolved {
  std::string reason;
};
using Target = std::variant<ObjectTarget, ModuleTarget, Unresolved>;

class Resolver {
 public:
  Resolver(const ProjectTree& tree, std::span<const FileParse> parses) : tree_(tree) {
    for (const auto& fp : parses) {
      for (const auto& s : fp.scopes) scopes_[s.owner_id] = &s;
      register_module(fp.file);
    }
  }

  Target resolve_call(const std::string& file, const std::string& owner, std::span<const std::string> chain,
                      int depth = 0) const {
    if (depth > 16) return Unresolved{"resolution depth exceeded"};
    // Innermost scope first; enclosing class bodies are invisible to methods.
    std::vector<std::string> scope_ids;
    for (std::string id = owner; id != file;) {
      const CodeObject& obj = tree_.objects.at(id);
      if (id == owner || obj.kind != ObjectKind::Class) scope_ids.push_back(id);
      id = obj.parent_id;
    }
    scope_ids.push_back(file);

    const std::string& head = chain.front();
    for (const auto& sid : scope_ids) {
      const ScopeFacts* sf = scope(sid);
      if (sf && !sf->receiver.empty() && sf->receiver == head) {
        if (chain.size() == 1) return Unresolved{"call of the receiver itself"};
        const std::string& cls = tree_.objects.at(sid).parent_id;
        return members(ObjectTarget{cls}, chain.subspan(1), depth + 1);
      }
      const std::string child = sid + "/" + head;
      if (tree_.objects.contains(child)) return members(ObjectTarget{child}, chain.subspan(1), depth + 1);
      if (sf) {
        const ImportBinding* binding = nullptr;
        for (const auto& b : sf->imports) {
          if (b.local_name == head) binding = &b;
        }
        if (binding) return members(resolve_import(*binding, file), chain.subspan(1), depth + 1);
        if (std::binary_search(sf->variables.begin(), sf->variables.end(), head)) {
          return Unresolved{"bound to a variable in scope " + sid};
        }
      }
    }
    return Unresolved{"external or builtin name"};
  }

 private:
  const ScopeFacts* scope(const std::string& id) const {
    auto it = scopes_.find(id);
    return it == scopes_.end() ? nullptr : it->second;
  }

  void register_module(const std::string& file) {
    std::string stem = file.substr(0, file.size() - 3);  // drop ".py"
    std::string dotted = stem;
    std::replace(dotted.begin(), dotted.end(), '/', '.');
    if (dotted == "__init__") return;
    if (dotted.ends_with(".__init__")) dotted.resize(dotted.size() - 9);
    modules_[dotted].file = file;
    for (auto dot = dotted.find('.'); dot != std::string::npos; dot = dotted.find('.', dot + 1)) {
      modules_.try_emplace(dotted.substr(0, dot));
    }
  }

  Target resolve_import(const ImportBinding& b, const std::string& file) const {
    std::vector<std::string> candidates;
    if (b.module.starts_with(".")) {
      std::size_t level = 0;
      while (level < b.module.size() && b.module[level] == '.') ++level;
      std::vector<std::string> base;
      std::string dir = parent_dir(file);
      if (dir != kRepoRootId) {
        std::stringstream ss(dir);
        for (std::string part; std::getline(ss, part, '/');) base.push_back(part);
      }
      if (level - 1 > base.size()) return Unresolved{"relative import beyond repository root"};
      base.resize(base.size() - (level - 1));
      const std::string rest = b.module.substr(level);
      if (!rest.empty()) base.push_back(rest);
      candidates.push_back(join(base, "."));
    } else {
      candidates.push_back(b.module);
      std::string dir = parent_dir(file);
      if (dir != kRepoRootId) {
        std::replace(dir.begin(), dir.end(), '/', '.');
        candidates.push_back(dir + "." + b.module);
      }
    }
    for (const auto& name : candidates) {
      const bool root_package = name.empty();
      if (!root_package && !modules_.contains(name)) continue;
      if (!b.member) return ModuleTarget{name};
      const std::string sub = root_package ? *b.member : name + "." + *b.member;
      if (modules_.contains(sub)) return ModuleTarget{sub};
      if (root_package) return Unresolved{"name not found in package"};
      return members(ModuleTarget{name}, std::span<const std::string>(&*b.member, 1), 0);
    }
    return Unresolved{"module outside the repository: " + b.module};
  }

  Target members(Target t, std::span<const std::string> rest, int depth) const {
    if (depth > 16) return Unresolved{"resolution depth exceeded"};
    if (rest.empty() || std::holds_alternative<Unresolved>(t)) return t;
    const std::string& name = rest.front();
    if (auto* m = std::get_if<ModuleTarget>(&t)) {
      const ModuleEntry& entry = modules_.at(m->name);
      if (!entry.file.empty()) {
        const std::string obj = entry.file + "/" + name;
        if (tree_.objects.contains(obj)) return members(ObjectTarget{obj}, rest.subspan(1), depth + 1);
      }
      const std::string sub = m->name + "." + name;
      if (modules_.contains(sub)) return members(ModuleTarget{sub}, rest.subspan(1), depth + 1);
      if (!entry.file.empty()) {
        if (const ScopeFacts* sf = scope(entry.file)) {
          for (const auto& b : sf->imports) {
            if (b.local_name == name) return Unresolved{"re-exported name " + m->name + "." + name};
          }
        }
      }
      return Unresolved{"name not found in module " + m->name};
    }
    const auto& id = std::get<ObjectTarget>(t).id;
    const CodeObject& obj = tree_.objects.at(id);
    if (obj.kind != ObjectKind::Class) return Unresolved{"attribute of a function"};
    const std::string member = id + "/" + name;
    if (tree_.objects.contains(member)) return members(ObjectTarget{member}, rest.subspan(1), depth + 1);
    if (const ScopeFacts* sf = scope(id)) {
      for (const auto& base : sf->bases) {
        Target bt = resolve_call(obj.file, obj.parent_id == obj.file ? obj.file : obj.parent_id, base,
                                 depth + 1);
        if (auto* bo = std::get_if<ObjectTarget>(&bt)) {
          if (tree_.objects.at(bo->id).kind != ObjectKind::Class || bo->id == id) continue;
          Target found = members(bt, rest, depth + 1);
          if (std::holds_alternative<ObjectTarget>(found)) return found;
        }
      }
    }
    return Unresolved{"attribute not found on class " + id};
  }

  const ProjectTree& tree_;
  std::map<std::string, const ScopeFacts*> scopes_;
  std::map<std::string, ModuleEntry> modules_;
};

}  // namespace

std::vector<ReferenceEdge> resolve_references(const ProjectTree& tree, std::span<const FileParse> parses,
                                              std::vector<ResolveDiagnostic>* diagnostics) {
  const Resolver resolver(tree, parses);
  std::map<std::pair<std::string, std::string>, ReferenceEdge> edges;
  for (const auto& fp : parses) {
    for (const auto& sf : fp.scopes) {
      if (sf.owner_id == fp.file) continue;  // module-level code is not an object
      for (const auto& call : sf.calls) {
        const Target t = resolver.resolve_call(fp.file, sf.owner_id, call.chain);
        if (const auto* obj = std::get_if<ObjectTarget>(&t)) {
          if (obj->id == sf.owner_id) continue;
          edges.try_emplace({sf.owner_id, obj->id}, ReferenceEdge{sf.owner_id, obj->id, fp.file, call.line});
        } else if (diagnostics) {
          const auto* u = std::get_if<Unresolved>(&t);
          diagnostics->push_back(ResolveDiagnostic{sf.owner_id, join(call.chain, "."), call.line,
                                                   u ? u->reason : "resolves to a module"});
        }
      }
    }
  }
  std::vector<ReferenceEdge> out;
  out.reserve(edges.size());
  for (auto& [key, e] : edges) out.push_back(std::move(e));
  return out;
}

// --- cycle pruning -----------------------------------------------------------

PruneResult prune_cycles(std::span<const ReferenceEdge> edges) {
  std::map<std::string, std::vector<std::string>> adj;
  std::set<std::string> nodes;
  for (const auto& e : edges) {
    adj[e.caller].push_back(e.callee);
    nodes.insert(e.caller);
    nodes.insert(e.callee);
  }
  for (auto& [n, out] : adj) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  enum class State { New, Active, Done };
  std::map<std::string, State> state;
  std::vector<std::pair<std::string, std::string>> removed_order;
  PruneResult result;

  struct Frame {
    std::string node;
    std::size_t next = 0;
  };
  for (const auto& root : nodes) {
    if (state[root] != State::New) continue;
    std::vector<Frame> stack{{root, 0}};
    state[root] = State::Active;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& out = adj[f.node];
      if (f.next == out.size()) {
        state[f.node] = State::Done;
        stack.pop_back();
        continue;
      }
      const std::string v = out[f.next++];
      const State s = state[v];
      if (s == State::Active) {
        removed_order.emplace_back(f.node, v);
      } else if (s == State::New) {
        state[v] = State::Active;
        stack.push_back({v, 0});
      }
    }
  }
  const std::set<std::pair<std::string, std::string>> removed_set(removed_order.begin(),
                                                                  removed_order.end());
  for (const auto& e : edges) {
    if (!removed_set.contains({e.caller, e.callee})) result.kept.push_back(e);
  }
  for (const auto& key : removed_order) {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const ReferenceEdge& e) {
      return e.caller == key.first && e.callee == key.second;
    });
    result.removed.push_back(*it);
  }
  return result;
}

PruneResult prune_containment_conflicts(const ProjectTree& tree, std::span<const ReferenceEdge> edges) {
  std::vector<ReferenceEdge> kept(edges.begin(), edges.end());
  PruneResult result;

  while (true) {
    // Dependency neighbours: members (containment) and callees (reference).
    struct Next {
      std::string id;
      bool reference;
    };
    std::map<std::string, std::vector<Next>> adj;
    for (const auto& [id, obj] : tree.objects) {
      adj[id];
      if (obj.parent_id != obj.file) adj[obj.parent_id].push_back({id, false});
    }
    for (const auto& e : kept) adj[e.caller].push_back({e.callee, true});
    for (auto& [id, out] : adj) {
      std::sort(out.begin(), out.end(), [](const Next& a, const Next& b) {
        return a.id != b.id ? a.id < b.id : a.reference < b.reference;
      });
    }

    enum class State { New, Active, Done };
    std::map<std::string, State> state;
    struct Frame {
      std::string node;
      bool entered_by_reference;
      std::size_t next = 0;
    };
    std::optional<std::pair<std::string, std::string>> cut;
    for (const auto& [root, unused] : adj) {
      if (cut) break;
      if (state[root] != State::New) continue;
      std::vector<Frame> stack{{root, false, 0}};
      state[root] = State::Active;
      while (!stack.empty() && !cut) {
        Frame& f = stack.back();
        const auto& out = adj[f.node];
        if (f.next == out.size()) {
          state[f.node] = State::Done;
          stack.pop_back();
          continue;
        }
        const Next v = out[f.next++];
        const State s = state[v.id];
        if (s == State::New) {
          state[v.id] = State::Active;
          stack.push_back({v.id, v.reference, 0});
          continue;
        }
        if (s != State::Active) continue;
        if (v.reference) {
          cut = {f.node, v.id};
          break;
        }
        // Containment back edge: cut the reference edge nearest the top of
        // the cycle path instead.
        std::size_t k = stack.size();
        while (k > 0 && stack[k - 1].node != v.id) --k;
        for (std::size_t i = stack.size() - 1; i >= k && i > 0; --i) {
          if (stack[i].entered_by_reference) {
            cut = {stack[i - 1].node, stack[i].node};
            break;
          }
        }
        if (!cut) throw Error(ErrorKind::Internal, "containment cycle without reference edge");
      }
    }
    if (!cut) break;
    auto it = std::find_if(kept.begin(), kept.end(), [&](const ReferenceEdge& e) {
      return e.caller == cut->first && e.callee == cut->second;
    });
    result.removed.push_back(*it);
    kept.erase(it);
  }
  result.kept = std::move(kept);
  return result;
}

RepoGraph build_graph(std::span<const std::string> files, std::span<const FileParse> parses,
                      std::vector<ResolveDiagnostic>* diagnostics) {
  ProjectTree tree = build_tree(files, parses);
  auto refs = resolve_references(tree, parses, diagnostics);
  PruneResult first = prune_cycles(refs);
  PruneResult second = prune_containment_conflicts(tree, first.kept);

  RepoGraph g;
  g.tree = std::move(tree.nodes);
  g.objects = std::move(tree.objects);
  g.edges = std::move(second.kept);
  g.removed_edges = std::move(first.removed);
  g.removed_edges.insert(g.removed_edges.end(), second.removed.begin(), second.removed.end());
  return g;
}

// --- ordering ----------------------------------------------------------------

std::vector<std::string> topological_order(const RepoGraph& graph) {
  std::map<std::string, std::size_t> unmet;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto& [id, obj] : graph.objects) {
    unmet[id];
    if (graph.objects.contains(obj.parent_id)) {
      ++unmet[obj.parent_id];
      dependents[id].push_back(obj.parent_id);
    }
  }
  for (const auto& e : graph.edges) {
    if (!graph.objects.contains(e.caller) || !graph.objects.contains(e.callee)) continue;
    ++unmet[e.caller];
    dependents[e.callee].push_back(e.caller);
  }
  std::set<std::string> ready;
  for (const auto& [id, n] : unmet) {
    if (n == 0) ready.insert(id);
  }
  std::vector<std::string> order;
  order.reserve(unmet.size());
  while (!ready.empty()) {
    std::string id = *ready.begin();
    ready.erase(ready.begin());
    for (const auto& d : dependents[id]) {
      if (--unmet[d] == 0) ready.insert(d);
    }
    order.push_back(std::move(id));
  }
  if (order.size() != unmet.size()) {
    throw Error(ErrorKind::Internal, "dependency cycle survived pruning");
  }
  return order;
}

// --- serialization -----------------------------------------------------------

namespace {

nlohmann::json edge_to_json(const ReferenceEdge& e) {
  return {{"caller", e.caller}, {"callee", e.callee}, {"site", {{"file", e.site_file}, {"line", e.site_line}}}};
}

ReferenceEdge edge_from_json(const nlohmann::json& j) {
  return ReferenceEdge{j.at("caller").get<std::string>(), j.at("callee").get<std::string>(),
                       j.at("site").at("file").get<std::string>(), j.at("site").at("line").get<int>()};
}

}  // namespace

nlohmann::json graph_to_json(const RepoGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, node] : graph.tree) {
    nlohmann::json n = {{"id", id}, {"kind", to_string(node.kind)}, {"parent", node.parent},
                        {"children", node.children}};
    if (const CodeObject* obj = graph.object(id)) {
      n["name"] = obj->name;
      n["file"] = obj->file;
      n["line_span"] = {obj->line_span.start, obj->line_span.end};
      n["params"] = obj->params;
      n["has_return"] = obj->has_return;
      n["snippet"] = obj->snippet;
    }
    nodes.push_back(std::move(n));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges) edges.push_back(edge_to_json(e));
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& e : graph.removed_edges) removed.push_back(edge_to_json(e));
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"removed_edges", std::move(removed)}};
}

RepoGraph graph_from_json(const nlohmann::json& j) {
  RepoGraph g;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.id = n.at("id").get<std::string>();
    const auto kind = node_kind_from_string(n.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorKind::Store, "unknown node kind for " + node.id);
    node.kind = *kind;
    node.parent = n.at("parent").get<std::string>();
    node.children = n.at("children").get<std::vector<std::string>>();
    if (node.kind == NodeKind::Class || node.kind == NodeKind::Function) {
      CodeObject obj;
      obj.id = node.id;
      obj.kind = node.kind == NodeKind::Class ? ObjectKind::Class : ObjectKind::Function;
      obj.name = n.at("name").get<std::string>();
      obj.file = n.at("file").get<std::string>();
      const auto span = n.at("line_span");
      obj.line_span = {span.at(0).get<int>(), span.at(1).get<int>()};
      obj.params = n.at("params").get<std::vector<std::string>>();
      obj.has_return = n.at("has_return").get<bool>();
      obj.snippet = n.value("snippet", std::string{});
      obj.parent_id = node.parent;
      obj.doc_path = node.id;
      g.objects.emplace(obj.id, std::move(obj));
    }
    g.tree.emplace(node.id, std::move(node));
  }
  for (const auto& e : j.at("edges")) g.edges.push_back(edge_from_json(e));
  for (const auto& e : j.value("removed_edges", nlohmann::json::array())) {
    g.removed_edges.push_back(edge_from_json(e));
  }
  return g;
}

std::string graph_to_dot(const RepoGraph& graph) {
  auto q = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << "digraph repodoc {\n  rankdir=LR;\n";
  for (const auto& [id, node] : graph.tree) {
    const char* shape = node.kind == NodeKind::Class      ? "box"
                        : node.kind == NodeKind::Function ? "ellipse"
                                                          : "folder";
    os << "  " << q(id) << " [shape=" << shape << "];\n";
  }
  for (const auto& [id, node] : graph.tree) {
    for (const auto& c : node.children) os << "  " << q(id) << " -> " << q(c) << " [style=dotted];\n";
  }
  for (const auto& e : graph.edges) os << "  " << q(e.caller) << " -> " << q(e.callee) << ";\n";
  for (const auto& e : graph.removed_edges) {
    os << "  " << q(e.caller) << " -> " << q(e.callee) << " [style=dashed, color=red];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace repodoc
