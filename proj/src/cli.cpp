#include "repodoc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "repodoc/change_tracker.hpp"
#include "repodoc/config.hpp"
#include "repodoc/doc_pipeline.hpp"
#include "repodoc/eval_harness.hpp"
#include "repodoc/markdown_publisher.hpp"

namespace repodoc {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string repo = ".";
  std::string config;
  unsigned jobs = 1;
  bool json = false;
};

Config load(const GlobalOptions& g) {
  return load_config(g.repo, g.config.empty() ? std::nullopt : std::optional<fs::path>(g.config));
}

struct Analysis {
  std::vector<std::string> files;
  std::vector<FileParse> parses;
  RepoGraph graph;
  std::vector<std::string> parse_errors;
};

Analysis analyze(const Config& config, unsigned jobs) {
  Analysis a;
  a.files = scan_repository(config.repo_root, config.ignore);
  a.parses = parse_files(config.repo_root, a.files, jobs);
  for (const auto& p : a.parses) {
    if (p.parse_error) a.parse_errors.push_back(p.file + ": " + *p.parse_error);
  }
  a.graph = build_graph(a.files, a.parses);
  return a;
}

Gateway make_gateway(const Config& config) {
  return Gateway(make_provider(config.provider.base_url), config.gateway_options());
}

void print_run(std::ostream& out, const RunReport& r) {
  out << "generated " << r.generated.size() << ", skipped " << r.skipped.size() << ", failed "
      << r.failures.size() << ", gateway calls " << r.gateway_calls << ", tokens " << r.prompt_tokens << "+"
      << r.completion_tokens << "\n";
  for (const auto& id : r.generated) out << "  generated " << id << "\n";
  for (const auto& [id, steps] : r.reductions) {
    out << "  reduced " << id << ":";
    for (auto s : steps) out << " " << to_string(s);
    out << "\n";
  }
}

int finish_run(std::ostream& err, const RunReport& run, const std::vector<std::string>& parse_errors) {
  for (const auto& e : parse_errors) err << "parse error: " << e << "\n";
  for (const auto& f : run.failures) err << "failed: " << f.message << "\n";
  if (!run.ok()) return kExitProvider;
  if (!parse_errors.empty()) return kExitParseDiagnostics;
  return kExitOk;
}

int cmd_generate(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const Config config = load(g);
  const Analysis a = analyze(config, g.jobs);
  DocStore store = load_store(config.store_path_abs());
  Gateway gateway = make_gateway(config);
  const RunReport run = generate_all(a.graph, gateway, store, config.pipeline_options(g.jobs));
  save_store(store, config.store_path_abs());
  const SiteResult site = write_site(a.graph, store, config.doc_dir_abs());
  if (g.json) {
    nlohmann::json j = report_to_json(run);
    j["pages_written"] = site.written;
    j["pages_removed"] = site.removed;
    j["parse_errors"] = a.parse_errors;
    out << j.dump(2) << "\n";
  } else {
    print_run(out, run);
    out << "pages written " << site.written.size() << " of " << site.pages.size() << "\n";
  }
  return finish_run(err, run, a.parse_errors);
}

int cmd_update(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const Config config = load(g);
  Gateway gateway = make_gateway(config);
  const UpdateReport r = run_update(config, gateway, g.jobs);
  if (g.json) {
    nlohmann::json regen = nlohmann::json::array();
    for (const auto& [id, t] : r.plan.regenerate) regen.push_back({{"id", id}, {"trigger", to_string(t)}});
    nlohmann::json staged = nlohmann::json::array();
    for (const auto& c : r.staged) staged.push_back({{"path", c.path}, {"change", to_string(c.kind)}});
    out << nlohmann::json{{"staged", staged},
                          {"regenerate", regen},
                          {"delete_docs", r.plan.delete_docs},
                          {"repaired", r.repaired},
                          {"run", report_to_json(r.run)},
                          {"pages_written", r.site.written},
                          {"parse_errors", r.parse_errors}}
               .dump(2)
        << "\n";
  } else if (r.staged.empty()) {
    out << "no staged source changes\n";
  } else {
    for (const auto& [id, t] : r.plan.regenerate) out << "regenerate " << id << " (" << to_string(t) << ")\n";
    for (const auto& id : r.plan.delete_docs) out << "delete " << id << "\n";
    for (const auto& id : r.repaired) out << "repair " << id << "\n";
    print_run(out, r.run);
  }
  return finish_run(err, r.run, r.parse_errors);
}

int cmd_install_hook(const GlobalOptions& g, const fs::path& self, std::ostream& out) {
  const Config config = load(g);
  const fs::path hook = install_hook(config.repo_root, self);
  out << "installed " << hook.string() << "\n";
  return kExitOk;
}

int cmd_graph(const GlobalOptions& g, const std::string& format, std::ostream& out, std::ostream& err) {
  const Config config = load(g);
  const Analysis a = analyze(config, g.jobs);
  if (format == "dot") {
    out << graph_to_dot(a.graph);
  } else {
    out << graph_to_json(a.graph).dump(2) << "\n";
  }
  for (const auto& e : a.parse_errors) err << "parse error: " << e << "\n";
  return a.parse_errors.empty() ? kExitOk : kExitParseDiagnostics;
}

int cmd_publish(const GlobalOptions& g, std::ostream& out) {
  const Config config = load(g);
  const DocStore store = load_store(config.store_path_abs());
  const SiteResult site = write_site(store.graph, store, config.doc_dir_abs());
  if (g.json) {
    out << nlohmann::json{{"pages", site.pages}, {"written", site.written}, {"removed", site.removed}}.dump(2) << "\n";
  } else {
    out << "pages written " << site.written.size() << " of " << site.pages.size() << ", removed "
        << site.removed.size() << "\n";
  }
  return kExitOk;
}

struct EvalOptions {
  std::string truth;
  std::string store;
  std::string docs;
  std::string predicted;
  std::string report;
  std::string metric = "jaccard";
};

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Usage, "cannot read " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, "malformed JSON in " + p.string() + ": " + e.what());
  }
}

RepoGraph truth_graph(const fs::path& p) {
  const nlohmann::json j = read_json(p);
  if (j.contains("records")) return store_from_json(j).graph;
  return graph_from_json(j);
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out) {
  const Config config = load(g);
  const fs::path store_path = o.store.empty() ? config.store_path_abs() : fs::path(o.store);
  const RepoGraph truth = o.truth.empty() ? load_store(store_path).graph : truth_graph(o.truth);

  std::map<std::string, std::string> docs;
  std::optional<PredictedTable> predicted;
  if (!o.docs.empty()) {
    docs = docs_from_pages(o.docs);
  } else {
    const DocStore evaluated = load_store(store_path);
    docs = docs_from_store(evaluated);
    predicted = references_of(evaluated.graph);
  }
  if (!o.predicted.empty()) predicted = predicted_from_json(read_json(o.predicted));

  const ParamMetric metric = o.metric == "precision" ? ParamMetric::Precision : ParamMetric::Jaccard;
  const EvalReport report = evaluate(truth, docs, predicted, metric);
  if (!o.report.empty()) write_file_atomic(o.report, report_to_json(report).dump(2) + "\n");
  if (g.json) {
    out << report_to_json(report).dump(2) << "\n";
  } else {
    out << render_report_table(report);
  }
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Provider:
    case ErrorKind::OverBudget: return kExitProvider;
    case ErrorKind::NotGitRepo: return kExitNotGitRepo;
    default: return kExitUsage;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const fs::path& self) {
  CLI::App app{"Repository documentation engine", "repodoc"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--repo", g.repo, "Repository root")->capture_default_str();
  app.add_option("--config", g.config, "Config file (default: <repo>/.repodoc.json)");
  app.add_option("--jobs", g.jobs, "Parallel parse/generation workers")->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "Machine-readable output");

  auto* generate = app.add_subcommand("generate", "Generate documentation for the whole repository");
  auto* update = app.add_subcommand("update", "Update documentation for staged changes");
  auto* hook = app.add_subcommand("install-hook", "Install the git pre-commit hook");
  auto* graph = app.add_subcommand("graph", "Print the project graph");
  std::string format = "json";
  graph->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  auto* eval = app.add_subcommand("eval", "Score documentation");
  EvalOptions eo;
  eval->add_option("--truth", eo.truth, "Truth store or graph JSON (default: the repository store)");
  eval->add_option("--store", eo.store, "Store whose docs and references are evaluated");
  eval->add_option("--docs", eo.docs, "Published docs directory to evaluate instead of a store");
  eval->add_option("--predicted", eo.predicted, "Predicted references JSON");
  eval->add_option("--report", eo.report, "Write the JSON report here");
  eval->add_option("--param-metric", eo.metric, "jaccard or precision")
      ->check(CLI::IsMember({"jaccard", "precision"}));
  auto* publish = app.add_subcommand("publish", "Rebuild Markdown pages from the store");
  for (auto* sub : {generate, update, hook, graph, eval, publish}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(g, out, err);
    if (update->parsed()) return cmd_update(g, out, err);
    if (hook->parsed()) return cmd_install_hook(g, self, out);
    if (graph->parsed()) return cmd_graph(g, format, out, err);
    if (eval->parsed()) return cmd_eval(g, eo, out);
    if (publish->parsed()) return cmd_publish(g, out);
  } catch (const Error& e) {
    err << "repodoc: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "repodoc: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace repodoc
