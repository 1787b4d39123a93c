// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "random_repo.hpp"
#include "repodoc/change_tracker.hpp"
#include "repodoc/config.hpp"
#include "repodoc/doc_pipeline.hpp"
#include "repodoc/eval_harness.hpp"
#include "repodoc/markdown_publisher.hpp"
#include "test_util.hpp"

using namespace repodoc;
using namespace repodoc::testing;

namespace {

using Clock = std::chrono::steady_clock;
using Failures = std::vector<std::string>;

#define CHECK(cond, msg)                                        \
  do {                                                          \
    if (!(cond)) failures.push_back(std::string(msg));          \
  } while (0)

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const fs::path kLabeled = fixture("labeled");

struct Truth {
  std::set<std::string> objects;
  std::set<EdgeKey> edges;
  std::set<EdgeKey> pruned;
};

Truth load_truth() {
  const auto j = nlohmann::json::parse(read_file(fixture("labeled_truth.json")));
  Truth t;
  for (const auto& id : j["objects"]) t.objects.insert(id.get<std::string>());
  for (const auto& e : j["edges"]) t.edges.insert({e[0].get<std::string>(), e[1].get<std::string>()});
  for (const auto& e : j["pruned"]) t.pruned.insert({e[0].get<std::string>(), e[1].get<std::string>()});
  return t;
}

std::map<std::string, std::string> read_sources(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& rel : scan_repository(root, {})) out[rel] = read_file(root / rel);
  return out;
}

RepoGraph graph_of(const std::map<std::string, std::string>& files) {
  std::vector<std::string> paths;
  std::vector<FileParse> parses;
  for (const auto& [p, text] : files) {
    paths.push_back(p);
    parses.push_back(parse_file(p, text));
  }
  return build_graph(paths, parses);
}

Gateway mock_gateway() { return Gateway(std::make_unique<MockProvider>(), {}, [](auto) {}); }

PipelineOptions fixed_clock(unsigned jobs = 1) {
  PipelineOptions o;
  o.jobs = jobs;
  o.clock = [] { return std::string("2024-01-01T00:00:00Z"); };
  return o;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos == std::string::npos) throw std::runtime_error("mutation anchor missing: " + from);
  return s.replace(pos, from.size(), to);
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  }
  return out;
}

ProcessResult cli(const std::vector<std::string>& args, const fs::path& cwd) {
  std::vector<std::string> argv = {REPODOC_CLI};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_process(argv, cwd);
}

void write_mock_config(const fs::path& root, const std::string& base_url = "mock:") {
  write_file(root / ".repodoc.json", R"({"provider": {"retries": 0, "base_url": ")" + base_url + "\"}}");
}

// --- 1 ----------------------------------------------------------------------

Failures resolver_recall() {
  Failures failures;
  const Truth truth = load_truth();
  CHECK(truth.objects.size() >= 15, "fixture has fewer than 15 objects");
  CHECK(truth.edges.size() + truth.pruned.size() >= 8, "fewer than 8 labeled edges");

  const auto t0 = Clock::now();
  const auto files = scan_repository(kLabeled, {});
  const RepoGraph g = build_graph(files, parse_files(kLabeled, files));
  RepoGraph labeled = g;
  labeled.edges.clear();
  for (const auto& [caller, callee] : truth.edges) labeled.edges.push_back({caller, callee, "", 0});
  const RecallResult r = reference_recall(references_of(g), labeled);
  const double elapsed = seconds_since(t0);

  std::set<std::string> ids;
  for (const auto& [id, _] : g.objects) ids.insert(id);
  CHECK(ids == truth.objects, "object set differs from the labels");
  std::set<EdgeKey> pruned;
  for (const auto& e : g.removed_edges) pruned.insert({e.caller, e.callee});
  CHECK(pruned == truth.pruned, "pruned edge set differs from the labeled 2-cycle edge");
  CHECK(r.errors.empty(), "recall rows reported errors");
  CHECK(r.mean == 1.0, "mean recall " + std::to_string(r.mean) + " != 1.0");
  CHECK(elapsed < 1.0, "runtime " + std::to_string(elapsed) + "s >= 1s");
  std::cout << "    recall " << r.mean << " over " << r.per_object.size() << " objects, " << truth.edges.size()
            << " labeled edges + " << truth.pruned.size() << " pruned, " << elapsed << "s\n";
  return failures;
}

// --- 2 ----------------------------------------------------------------------

Failures topological_contract() {
  Failures failures;
  std::mt19937 rng(20240611);
  int checked = 0;
  for (int round = 0; round < 100; ++round) {
    const RandomRepo repo = random_repo(rng, 30);
    const RepoGraph g = repo.graph();
    std::set<EdgeKey> resolved;
    for (const auto& e : g.edges) resolved.insert({e.caller, e.callee});
    CHECK(resolved == repo.edges, "round " + std::to_string(round) + ": resolved edges differ from generator");

    std::vector<std::vector<std::string>> logs;
    for (unsigned jobs : {1u, 1u, 4u}) {
      Gateway gw = mock_gateway();
      DocStore store;
      const RunReport r = generate_all(g, gw, store, fixed_clock(jobs));
      CHECK(r.ok() && r.generated.size() == g.objects.size(), "round " + std::to_string(round) + ": incomplete run");
      const std::string v = scheduling_violation(g, r.generated);
      CHECK(v.empty(), "round " + std::to_string(round) + " jobs " + std::to_string(jobs) + ": " + v);
      logs.push_back(r.generated);
    }
    CHECK(logs[0] == logs[1], "round " + std::to_string(round) + ": order differs across runs");
    ++checked;
  }
  std::cout << "    " << checked << " random DAG repos, serial runs twice plus a 4-worker run each\n";
  return failures;
}

// --- 3 ----------------------------------------------------------------------

Failures idempotence() {
  Failures failures;
  TempDir dir;
  copy_tree(kLabeled, dir.path());
  write_mock_config(dir.path());
  const ProcessResult first = cli({"--repo", dir.path().string(), "--json", "generate"}, dir.path());
  CHECK(first.exit_code == 0, "first generate failed: " + first.err);
  const auto pages = snapshot_dir(dir.path() / "markdown_docs");
  const std::string store = read_file(dir.path() / ".project_doc_record/project_hierarchy.json");
  const ProcessResult second = cli({"--repo", dir.path().string(), "--json", "generate"}, dir.path());
  CHECK(second.exit_code == 0, "second generate failed: " + second.err);
  if (first.exit_code == 0 && second.exit_code == 0) {
    const auto a = nlohmann::json::parse(first.out);
    const auto b = nlohmann::json::parse(second.out);
    CHECK(a["generated"].size() == 17, "first run did not generate every object");
    CHECK(b["gateway_calls"] == 0, "second run made " + b["gateway_calls"].dump() + " gateway calls");
    CHECK(b["generated"].empty(), "second run regenerated objects");
    std::cout << "    first run " << a["gateway_calls"] << " calls, second run " << b["gateway_calls"] << " calls\n";
  }
  CHECK(!pages.empty() && snapshot_dir(dir.path() / "markdown_docs") == pages, "published pages changed");
  CHECK(read_file(dir.path() / ".project_doc_record/project_hierarchy.json") == store, "store changed");
  return failures;
}

// --- 4 ----------------------------------------------------------------------

std::string normalized(const std::string& snippet) {
  std::istringstream in(snippet);
  std::string line, out;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    out += line + "\n";
  }
  return out;
}

/// The three triggers applied literally to two rebuilt graphs.
UpdatePlan trigger_oracle(const RepoGraph& before, const RepoGraph& after) {
  std::map<std::string, Trigger> chosen;
  auto offer = [&](const std::string& id, Trigger t) {
    auto it = chosen.find(id);
    if (it == chosen.end() || static_cast<int>(t) < static_cast<int>(it->second)) chosen[id] = t;
  };
  UpdatePlan plan;
  for (const auto& [id, obj] : after.objects) {
    auto old = before.objects.find(id);
    if (old == before.objects.end()) {
      offer(id, Trigger::NewObject);
    } else if (normalized(old->second.snippet) != normalized(obj.snippet)) {
      offer(id, Trigger::SourceModified);
    }
  }
  for (const auto& [id, _] : before.objects) {
    if (!after.objects.count(id)) plan.delete_docs.push_back(id);
  }
  std::set<EdgeKey> old_edges, new_edges;
  for (const auto& e : before.edges) old_edges.insert({e.caller, e.callee});
  for (const auto& e : after.edges) new_edges.insert({e.caller, e.callee});
  for (const auto& e : old_edges) {
    if (!new_edges.count(e) && after.objects.count(e.second)) offer(e.second, Trigger::ReferrerRemoved);
  }
  for (const auto& e : new_edges) {
    if (!old_edges.count(e) && after.objects.count(e.second)) offer(e.second, Trigger::NewReference);
  }
  for (const auto& [id, t] : chosen) plan.regenerate.emplace_back(id, t);
  std::sort(plan.regenerate.begin(), plan.regenerate.end(), [](const auto& a, const auto& b) {
    return std::make_pair(static_cast<int>(a.second), a.first) < std::make_pair(static_cast<int>(b.second), b.first);
  });
  std::sort(plan.delete_docs.begin(), plan.delete_docs.end());
  return plan;
}

std::string describe(const UpdatePlan& p) {
  std::string s;
  for (const auto& [id, t] : p.regenerate) s += " " + id + "(" + std::string(to_string(t)) + ")";
  for (const auto& id : p.delete_docs) s += " -" + id;
  return s.empty() ? " (nothing)" : s;
}

Failures update_minimality() {
  Failures failures;
  const auto base = read_sources(kLabeled);
  using Files = std::map<std::string, std::string>;
  std::vector<std::pair<std::string, std::function<Files(Files)>>> mutations = {
      {"body edit of callee apply_rate",
       [](Files f) {
         f["shop/models.py"] = replace_once(f["shop/models.py"], "return price * (1 - rate)",
                                            "return round(price * (1 - rate), 2)");
         return f;
       }},
      {"call added in banner",
       [](Files f) {
         f["util/fmt.py"] = replace_once(f["util/fmt.py"], "    print(text)\n", "    print(money(len(text)))\n");
         return f;
       }},
      {"call removed from receipt",
       [](Files f) {
         f["shop/cart.py"] = replace_once(f["shop/cart.py"], "return fmt.money(self.total())", "return str(self.total())");
         return f;
       }},
      {"object tax added",
       [](Files f) {
         f["shop/models.py"] += "\n\ndef tax(value):\n    return apply_rate(value, -0.2)\n";
         return f;
       }},
      {"object is_odd deleted",
       [](Files f) {
         std::string p = f["util/parse.py"];
         p = replace_once(p, "\n\ndef is_odd(n):\n    if n == 0:\n        return False\n    return is_even(n - 1)\n", "");
         p = replace_once(p, "    return is_odd(n - 1)", "    return n % 2 == 0");
         f["util/parse.py"] = p;
         return f;
       }},
      {"file util/fmt.py renamed to util/text.py",
       [](Files f) {
         f["util/text.py"] = f["util/fmt.py"];
         f.erase("util/fmt.py");
         f["app.py"] = replace_once(f["app.py"], "import util.fmt as fmt", "import util.text as fmt");
         f["shop/cart.py"] = replace_once(f["shop/cart.py"], "from util import fmt", "from util import text as fmt");
         return f;
       }},
  };

  const RepoGraph before = graph_of(base);
  for (const auto& [name, mutate] : mutations) {
    const RepoGraph after = graph_of(mutate(base));
    const UpdatePlan got = plan_updates(diff_objects(before, after));
    const UpdatePlan want = trigger_oracle(before, after);
    CHECK(got == want, name + ": plan" + describe(got) + " != oracle" + describe(want));
    std::cout << "    " << name << ":" << describe(got) << "\n";
  }

  // Dependency inversion, asserted exactly.
  const RepoGraph edited = graph_of(mutations[0].second(base));
  const UpdatePlan p = plan_updates(diff_objects(before, edited));
  const std::vector<std::pair<std::string, Trigger>> only_callee = {{"shop/models.py/apply_rate",
                                                                      Trigger::SourceModified}};
  CHECK(p.regenerate == only_callee, "callee body edit regenerated more than the callee:" + describe(p));
  for (const auto& caller : before.callers("shop/models.py/apply_rate")) {
    for (const auto& [id, t] : p.regenerate) CHECK(id != caller, "caller " + caller + " regenerated");
  }
  return failures;
}

// --- 5 ----------------------------------------------------------------------

/// Removes the line block that starts with `header` up to the next bold header.
std::string drop_section(const std::string& doc, const std::string& header) {
  std::istringstream in(doc);
  std::string line, out;
  bool dropping = false;
  while (std::getline(in, line)) {
    if (line.starts_with("**")) dropping = line.starts_with(header);
    if (!dropping) out += line + "\n";
  }
  return out;
}

Failures format_alignment() {
  Failures failures;
  const RepoGraph g = graph_of(read_sources(kLabeled));
  Gateway gw = mock_gateway();
  DocStore store;
  (void)generate_all(g, gw, store, fixed_clock());
  int compliant = 0, mutants = 0, detected = 0;
  for (const auto& [id, rec] : store.records) {
    const CodeObject& o = g.objects.at(id);
    if (check_format(rec.raw_text, o.kind, o.has_return).compliant()) ++compliant;

    std::vector<std::pair<Section, std::string>> labels = {{Section::Name, o.name},
                                                           {Section::Params, std::string(param_label(o.kind))},
                                                           {Section::CodeDescription, "Code Description"},
                                                           {Section::Note, "Note"}};
    if (o.has_return) labels.emplace_back(Section::OutputExample, "Output Example");
    std::vector<std::pair<Section, std::string>> cases;
    for (const auto& [section, label] : labels) {
      const std::string header = "**" + label + "**:";
      cases.emplace_back(section, drop_section(rec.raw_text, header));
      cases.emplace_back(section, replace_once(rec.raw_text, header, label + ":"));
    }
    if (!o.has_return) cases.emplace_back(Section::OutputExample, rec.raw_text + "\n**Output Example**: 42\n");
    for (const auto& [section, text] : cases) {
      ++mutants;
      const FormatCheck c = check_format(text, o.kind, o.has_return);
      if (!c.compliant() && c.sections.at(section) != SectionStatus::Ok) {
        ++detected;
      } else {
        failures.push_back(id + ": " + std::string(to_string(section)) + " mutation not detected");
      }
    }
  }
  CHECK(compliant == static_cast<int>(store.records.size()),
        std::to_string(compliant) + "/" + std::to_string(store.records.size()) + " mock docs compliant");
  std::cout << "    " << compliant << "/" << store.records.size() << " mock docs compliant, " << detected << "/"
            << mutants << " mutants detected\n";
  return failures;
}

// --- 6 ----------------------------------------------------------------------

Failures parameter_metric() {
  Failures failures;
  const std::string clean_input =
      "**Function Name**: clean_input\n\n"
      "**Parameters**:\n"
      "- `config`: An instance of the `Config` class, which holds the configuration settings for the "
      "application.\n"
      "- `prompt`: A string that represents the prompt to be displayed to the user. It defaults to an empty "
      "string if not provided.\n\n"
      "**Code Description**:\nThe `clean_input` function is an asynchronous function.\n\n"
      "**Note**:\n- Proper handling of `KeyboardInterrupt` ensures a graceful shutdown.\n\n"
      "**Output Example**:\n- If the user inputs \"Hello\", the function returns \"Hello\".\n";
  const auto names = extract_params(clean_input);
  CHECK(names == (std::vector<std::string>{"config", "prompt"}), "clean_input params not [config, prompt]");

  const RepoGraph g = graph_of(read_sources(kLabeled));
  Gateway gw = mock_gateway();
  DocStore store;
  (void)generate_all(g, gw, store, fixed_clock());
  const EvalReport r = evaluate(g, docs_from_store(store), std::nullopt);
  CHECK(r.mean_param_accuracy == 1.0, "mean param accuracy " + std::to_string(r.mean_param_accuracy));
  const double h = param_accuracy({"x", "phantom"}, {"x"});
  CHECK(h == 0.5, "hallucination case scored " + std::to_string(h));
  std::cout << "    clean_input -> [" << (names.size() > 0 ? names[0] : "") << ", "
            << (names.size() > 1 ? names[1] : "") << "], mock mean " << r.mean_param_accuracy
            << ", {x, phantom} vs {x} = " << h << "\n";
  return failures;
}

// --- 7 ----------------------------------------------------------------------

Failures hook_round_trip() {
  Failures failures;
  TempDir dir;
  const fs::path root = dir.path();
  copy_tree(kLabeled, root);
  write_mock_config(root);
  init_git_repo(root);
  const ProcessResult gen = cli({"--repo", root.string(), "generate"}, root);
  CHECK(gen.exit_code == 0, "initial generate failed: " + gen.err);
  git(root, {"add", "-A"});
  git(root, {"commit", "-q", "-m", "initial"});
  const DocStore before = load_store(root / ".project_doc_record/project_hierarchy.json");

  const ProcessResult hook = cli({"install-hook", "--repo", root.string()}, root);
  CHECK(hook.exit_code == 0, "install-hook failed: " + hook.err);

  const std::string fmt = read_file(root / "util/fmt.py");
  write_file(root / "util/fmt.py", replace_once(replace_once(fmt, "def banner(text):", "def banner(text, ch=\"=\"):"),
                                                "line = \"=\" * len(text)", "line = ch * len(text)"));
  git(root, {"add", "util/fmt.py"});
  const ProcessResult commit = run_process({"git", "commit", "-m", "banner fill character"}, root);
  const std::string output = commit.out + commit.err;
  CHECK(commit.exit_code == 0, "commit failed: " + output);
  CHECK(output.find("Passed") != std::string::npos, "hook output lacks \"Passed\"");

  std::set<std::string> committed;
  {
    std::istringstream in(git(root, {"show", "--name-only", "--format=", "HEAD"}));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) committed.insert(line);
    }
  }
  const std::set<std::string> expected_files = {".project_doc_record/project_hierarchy.json",
                                                "markdown_docs/util/fmt.md", "util/fmt.py"};
  CHECK(committed == expected_files, "commit holds an unexpected file set");

  const DocStore after = load_store(root / ".project_doc_record/project_hierarchy.json");
  const UpdatePlan planned = plan_updates(diff_objects(before.graph, after.graph));
  std::set<std::string> planned_ids;
  for (const auto& [id, _] : planned.regenerate) planned_ids.insert(id);
  std::set<std::string> changed;
  for (const auto& [id, rec] : after.records) {
    const DocRecord* old = before.record(id);
    if (old == nullptr || !(*old == rec)) changed.insert(id);
  }
  CHECK(planned_ids == std::set<std::string>{"util/fmt.py/banner"}, "unexpected plan");
  CHECK(changed == planned_ids, "regenerated records differ from the plan");
  const DocRecord* banner = after.record("util/fmt.py/banner");
  CHECK(banner && banner->param_section.size() == 2, "banner doc lacks the new parameter");
  CHECK(git(root, {"status", "--porcelain"}).empty(), "work tree not clean after commit");
  std::cout << "    commit files:";
  for (const auto& f : committed) std::cout << " " << f;
  std::cout << "\n";
  return failures;
}

// --- 8 ----------------------------------------------------------------------

Failures persistence() {
  Failures failures;
  TempDir dir;
  const RepoGraph g = graph_of(read_sources(kLabeled));
  Gateway gw = mock_gateway();
  DocStore store;
  (void)generate_all(g, gw, store, fixed_clock());
  const fs::path path = dir.path() / "store.json";
  save_store(store, path);
  CHECK(load_store(path) == store, "store round trip not structurally equal");

  const std::string full = read_file(path);
  write_file(path, full.substr(0, full.size() / 3));
  try {
    (void)load_store(path);
    failures.push_back("corrupt store loaded without error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Store, "corrupt store raised the wrong error kind");
    CHECK(std::string(e.what()).find("regenerate") != std::string::npos, "corrupt store error lacks guidance");
  }

  // failed update leaves the store byte-identical
  const fs::path root = dir.path() / "repo";
  copy_tree(kLabeled, root);
  write_mock_config(root);
  init_git_repo(root);
  CHECK(cli({"--repo", root.string(), "generate"}, root).exit_code == 0, "initial generate failed");
  git(root, {"add", "-A"});
  git(root, {"commit", "-q", "-m", "initial"});
  const std::string store_before = read_file(root / ".project_doc_record/project_hierarchy.json");
  const auto pages_before = snapshot_dir(root / "markdown_docs");
  write_mock_config(root, "mock:fail");
  write_file(root / "shop/models.py",
             replace_once(read_file(root / "shop/models.py"), "return price * (1 - rate)", "return price"));
  git(root, {"add", "shop/models.py"});
  const ProcessResult upd = cli({"--repo", root.string(), "update"}, root);
  CHECK(upd.exit_code == 3, "failed update exit code " + std::to_string(upd.exit_code));
  CHECK(read_file(root / ".project_doc_record/project_hierarchy.json") == store_before,
        "store changed after a failed update");
  CHECK(snapshot_dir(root / "markdown_docs") == pages_before, "pages changed after a failed update");
  return failures;
}

// --- 9 ----------------------------------------------------------------------

Failures end_to_end_runtime() {
  Failures failures;
  TempDir dir;
  copy_tree(kLabeled, dir.path());
  const auto t0 = Clock::now();
  const Config config = [&] {
    write_mock_config(dir.path());
    return load_config(dir.path());
  }();
  const auto files = scan_repository(dir.path(), config.ignore);
  const RepoGraph g = build_graph(files, parse_files(dir.path(), files));
  Gateway gw(make_provider(config.provider.base_url), config.gateway_options());
  DocStore store = load_store(config.store_path_abs());
  const RunReport r = generate_all(g, gw, store, config.pipeline_options(1));
  save_store(store, config.store_path_abs());
  const SiteResult site = write_site(g, store, config.doc_dir_abs());
  const double elapsed = seconds_since(t0);
  CHECK(r.ok() && r.generated.size() == g.objects.size(), "pipeline did not document every object");
  CHECK(site.pages.size() == 7, "expected 6 pages plus SUMMARY.md, got " + std::to_string(site.pages.size()));
  CHECK(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s >= 5s");
  std::cout << "    " << r.generated.size() << " docs, " << site.pages.size() << " pages in " << elapsed << "s\n";
  return failures;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Failures()>>> criteria = {
      {"resolver recall", resolver_recall},
      {"topological contract", topological_contract},
      {"idempotence", idempotence},
      {"update minimality", update_minimality},
      {"format alignment", format_alignment},
      {"parameter metric", parameter_metric},
      {"hook round trip", hook_round_trip},
      {"persistence", persistence},
      {"end-to-end runtime", end_to_end_runtime},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Failures f;
    try {
      f = criteria[i].second();
    } catch (const std::exception& e) {
      f.push_back(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (f.empty() ? "PASS" : "FAIL") << "\n";
    for (const auto& msg : f) std::cout << "    - " << msg << "\n";
    failed += !f.empty();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
