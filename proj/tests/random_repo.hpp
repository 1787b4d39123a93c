#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "repodoc/project_graph.hpp"
#include "repodoc/source_model.hpp"

namespace repodoc::testing {

/// A small generated Python repository whose call graph is a known DAG.
struct RandomRepo {
  std::map<std::string, std::string> files;        // path -> source
  std::set<std::pair<std::string, std::string>> edges;  // (caller id, callee id)
  std::vector<std::string> ids;

  [[nodiscard]] RepoGraph graph() const {
    std::vector<std::string> paths;
    std::vector<FileParse> parses;
    for (const auto& [p, text] : files) {
      paths.push_back(p);
      parses.push_back(parse_file(p, text));
    }
    return build_graph(paths, parses);
  }
};

/// Up to `max_nodes` objects spread over up to three modules. Node i may call
/// any top-level function j < i, so references never form a cycle; roughly a
/// third of the nodes are methods grouped into classes.
inline RandomRepo random_repo(std::mt19937& rng, int max_nodes) {
  std::uniform_int_distribution<int> node_count(2, max_nodes);
  std::uniform_int_distribution<int> module_count(1, 3);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const int n = node_count(rng);
  const int modules = module_count(rng);

  struct Node {
    int module = 0;
    int klass = -1;  // class index within the module, or -1 for a function
    std::string id;
    std::string name;
    std::vector<int> callees;
  };
  std::vector<Node> nodes(n);
  std::vector<int> classes_in_module(modules, 0);
  for (int i = 0; i < n; ++i) {
    Node& node = nodes[i];
    node.module = static_cast<int>(rng() % modules);
    const std::string file = "m" + std::to_string(node.module) + ".py";
    if (coin(rng) < 0.33) {
      // join the module's newest class or open a new one
      if (classes_in_module[node.module] == 0 || coin(rng) < 0.5) ++classes_in_module[node.module];
      node.klass = classes_in_module[node.module] - 1;
      node.name = "meth" + std::to_string(i);
      node.id = file + "/K" + std::to_string(node.module) + "_" + std::to_string(node.klass) + "/" + node.name;
    } else {
      node.name = "fn" + std::to_string(i);
      node.id = file + "/" + node.name;
    }
    for (int j = 0; j < i; ++j) {
      if (nodes[j].klass < 0 && coin(rng) < 0.2) node.callees.push_back(j);
    }
  }

  RandomRepo repo;
  for (int m = 0; m < modules; ++m) {
    std::set<std::string> imports;
    std::string functions;
    std::map<int, std::string> class_bodies;
    for (int i = 0; i < n; ++i) {
      const Node& node = nodes[i];
      if (node.module != m) continue;
      std::string expr;
      for (int j : node.callees) {
        if (nodes[j].module != m) {
          imports.insert("from m" + std::to_string(nodes[j].module) + " import " + nodes[j].name + "\n");
        }
        expr += (expr.empty() ? "" : " + ") + nodes[j].name + "()";
        repo.edges.insert({node.id, nodes[j].id});
      }
      if (expr.empty()) expr = std::to_string(i);
      if (node.klass < 0) {
        functions += "\n\ndef " + node.name + "():\n    return " + expr + "\n";
      } else {
        class_bodies[node.klass] += "\n    def " + node.name + "(self):\n        return " + expr + "\n";
      }
      repo.ids.push_back(node.id);
    }
    std::string text;
    for (const auto& line : imports) text += line;
    text += functions;
    for (const auto& [k, body] : class_bodies) {
      const std::string cls = "K" + std::to_string(m) + "_" + std::to_string(k);
      text += "\n\nclass " + cls + ":\n" + body;
      repo.ids.push_back("m" + std::to_string(m) + ".py/" + cls);
    }
    repo.files["m" + std::to_string(m) + ".py"] = text;
  }
  return repo;
}

/// Positions in `order` violate no callee-before-caller or member-before-owner
/// constraint of `graph`. Returns the first violation, or an empty string.
inline std::string scheduling_violation(const RepoGraph& graph, const std::vector<std::string>& order) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& e : graph.edges) {
    if (!pos.count(e.caller) || !pos.count(e.callee)) return "missing " + e.caller + " or " + e.callee;
    if (pos[e.callee] >= pos[e.caller]) return "callee " + e.callee + " after caller " + e.caller;
  }
  for (const auto& [id, obj] : graph.objects) {
    const CodeObject* parent = graph.object(obj.parent_id);
    if (parent == nullptr) continue;
    if (!pos.count(id) || !pos.count(parent->id)) return "missing " + id;
    if (pos[id] >= pos[parent->id]) return "member " + id + " after owner " + parent->id;
  }
  return {};
}

}  // namespace repodoc::testing
