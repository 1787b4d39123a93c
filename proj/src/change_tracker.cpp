#include "repodoc/change_tracker.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "repodoc/error.hpp"
#include "repodoc/process.hpp"

namespace repodoc {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

ProcessResult git(const fs::path& root, std::vector<std::string> args, std::string_view input = {}) {
  args.insert(args.begin(), "git");
  return run_process(args, root, input);
}

ProcessResult git_checked(const fs::path& root, std::vector<std::string> args, std::string_view input = {}) {
  ProcessResult r = git(root, args, input);
  if (r.exit_code != 0) {
    std::string cmd = "git";
    for (const auto& a : args) cmd += " " + a;
    throw Error(ErrorKind::Io, cmd + " failed: " + r.err);
  }
  return r;
}

std::vector<std::string> split_nul(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto end = s.find('\0', pos);
    out.push_back(s.substr(pos, end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string relative_to(const fs::path& p, const fs::path& root) {
  return p.lexically_relative(root).generic_string();
}

}  // namespace

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added: return "Added";
    case ChangeKind::Modified: return "Modified";
    case ChangeKind::Deleted: return "Deleted";
    case ChangeKind::Renamed: return "Renamed";
  }
  return "?";
}

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::SourceModified: return "SourceModified";
    case Trigger::NewObject: return "NewObject";
    case Trigger::ReferrerRemoved: return "ReferrerRemoved";
    case Trigger::NewReference: return "NewReference";
  }
  return "?";
}

fs::path git_toplevel(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::NotGitRepo, "not a directory: " + dir.string());
  const ProcessResult r = git(dir, {"rev-parse", "--show-toplevel"});
  if (r.exit_code != 0) throw Error(ErrorKind::NotGitRepo, "not a git repository: " + dir.string());
  std::string top = r.out;
  while (!top.empty() && (top.back() == '\n' || top.back() == '\r')) top.pop_back();
  return fs::path(top);
}

std::vector<FileChange> staged_changes(const fs::path& repo_root, std::span<const std::string> ignore) {
  (void)git_toplevel(repo_root);
  const bool has_head = git(repo_root, {"rev-parse", "--verify", "-q", "HEAD"}).exit_code == 0;
  const ProcessResult r = git_checked(repo_root, {"diff", "--cached", "--name-status", "--no-renames", "--relative",
                                                  "-z", has_head ? "HEAD" : std::string(kEmptyTree)});
  const auto fields = split_nul(r.out);
  std::vector<FileChange> out;
  for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
    const std::string& status = fields[i];
    const std::string& path = fields[i + 1];
    if (!is_analyzed_path(path, ignore)) continue;
    ChangeKind kind = ChangeKind::Modified;
    if (status.starts_with('A')) kind = ChangeKind::Added;
    if (status.starts_with('D')) kind = ChangeKind::Deleted;
    out.push_back({path, kind});
  }
  std::sort(out.begin(), out.end(), [](const FileChange& a, const FileChange& b) {
    return a.path != b.path ? a.path < b.path : a.kind < b.kind;
  });
  return out;
}

std::vector<std::pair<std::string, std::string>> index_sources(const fs::path& repo_root,
                                                               std::span<const std::string> ignore) {
  const ProcessResult r = git_checked(repo_root, {"ls-files", "-s", "-z"});
  std::vector<std::pair<std::string, std::string>> entries;  // (path, blob)
  for (const auto& rec : split_nul(r.out)) {
    // "<mode> <sha> <stage>\t<path>"
    const auto tab = rec.find('\t');
    if (tab == std::string::npos) continue;
    std::istringstream meta(rec.substr(0, tab));
    std::string mode, sha, stage;
    meta >> mode >> sha >> stage;
    const std::string path = rec.substr(tab + 1);
    if (stage != "0" || !mode.starts_with("100") || !is_analyzed_path(path, ignore)) continue;
    entries.emplace_back(path, sha);
  }
  std::sort(entries.begin(), entries.end());

  std::string request;
  for (const auto& [path, sha] : entries) request += sha + "\n";
  const ProcessResult blobs = git_checked(repo_root, {"cat-file", "--batch"}, request);

  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  for (const auto& [path, sha] : entries) {
    const auto nl = blobs.out.find('\n', pos);
    if (nl == std::string::npos) throw Error(ErrorKind::Io, "truncated git cat-file output");
    std::istringstream header(blobs.out.substr(pos, nl - pos));
    std::string got_sha, type;
    std::size_t size = 0;
    header >> got_sha >> type >> size;
    if (got_sha != sha || type != "blob") throw Error(ErrorKind::Io, "unexpected git cat-file output for " + path);
    out.emplace_back(path, blobs.out.substr(nl + 1, size));
    pos = nl + 1 + size + 1;
  }
  return out;
}

ChangeSet diff_objects(const RepoGraph& old_graph, const RepoGraph& new_graph) {
  ChangeSet cs;
  for (const auto& [id, obj] : new_graph.objects) {
    const CodeObject* before = old_graph.object(id);
    if (before == nullptr) {
      cs.added_objects.insert(id);
    } else if (hash_source(before->snippet) != hash_source(obj.snippet)) {
      cs.modified_objects.insert(id);
    }
  }
  for (const auto& [id, obj] : old_graph.objects) {
    if (!new_graph.objects.contains(id)) cs.removed_objects.insert(id);
  }
  std::set<EdgeKey> old_edges, new_edges;
  for (const auto& e : old_graph.edges) old_edges.emplace(e.caller, e.callee);
  for (const auto& e : new_graph.edges) new_edges.emplace(e.caller, e.callee);
  std::set_difference(new_edges.begin(), new_edges.end(), old_edges.begin(), old_edges.end(),
                      std::inserter(cs.edge_added, cs.edge_added.end()));
  std::set_difference(old_edges.begin(), old_edges.end(), new_edges.begin(), new_edges.end(),
                      std::inserter(cs.edge_removed, cs.edge_removed.end()));
  return cs;
}

UpdatePlan plan_updates(const ChangeSet& changes) {
  std::map<std::string, Trigger> chosen;
  auto offer = [&](const std::string& id, Trigger t) {
    if (changes.removed_objects.contains(id)) return;
    auto [it, inserted] = chosen.emplace(id, t);
    if (!inserted && t < it->second) it->second = t;
  };
  for (const auto& id : changes.modified_objects) offer(id, Trigger::SourceModified);
  for (const auto& id : changes.added_objects) offer(id, Trigger::NewObject);
  for (const auto& [caller, callee] : changes.edge_removed) offer(callee, Trigger::ReferrerRemoved);
  for (const auto& [caller, callee] : changes.edge_added) offer(callee, Trigger::NewReference);

  UpdatePlan plan;
  for (const auto& [id, t] : chosen) plan.regenerate.emplace_back(id, t);
  std::sort(plan.regenerate.begin(), plan.regenerate.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  plan.delete_docs.assign(changes.removed_objects.begin(), changes.removed_objects.end());
  return plan;
}

UpdateLock::UpdateLock(const fs::path& record_dir) : path_(record_dir / ".lock") {
  std::error_code ec;
  fs::create_directories(record_dir, ec);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY | O_CLOEXEC, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw Error(ErrorKind::Usage,
                  "another update is running (remove " + path_.string() + " if that is not the case)");
    }
    throw Error(ErrorKind::Io, "cannot create " + path_.string() + ": " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  (void)!::write(fd, pid.data(), pid.size());
  ::close(fd);
}

UpdateLock::~UpdateLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

UpdateReport run_update(const Config& config, Gateway& gateway, unsigned jobs) {
  const fs::path root = config.repo_root;
  (void)git_toplevel(root);
  UpdateLock lock(config.record_dir_abs());

  UpdateReport report;
  report.staged = staged_changes(root, config.ignore);
  if (report.staged.empty()) return report;

  DocStore store = load_store(config.store_path_abs());

  const auto sources = index_sources(root, config.ignore);
  std::vector<std::string> files;
  std::vector<FileParse> parses;
  for (const auto& [path, text] : sources) {
    files.push_back(path);
    parses.push_back(parse_file(path, text));
    if (parses.back().parse_error) report.parse_errors.push_back(path + ": " + *parses.back().parse_error);
  }
  const RepoGraph graph = build_graph(files, parses);

  report.plan = plan_updates(diff_objects(store.graph, graph));
  std::set<std::string> only;
  for (const auto& [id, trigger] : report.plan.regenerate) only.insert(id);
  for (const auto& [id, obj] : graph.objects) {
    const DocRecord* rec = store.record(id);
    if ((rec == nullptr || rec->source_hash.empty()) && only.insert(id).second) report.repaired.push_back(id);
  }

  PipelineOptions options = config.pipeline_options(jobs);
  options.only = std::move(only);
  report.run = generate_all(graph, gateway, store, options);
  if (!report.run.ok()) {
    std::string msg = "update aborted, documentation left unchanged;";
    for (const auto& f : report.run.failures) msg += " " + f.message + ";";
    throw Error(ErrorKind::Provider, msg);
  }

  save_store(store, config.store_path_abs());
  report.site = write_site(graph, store, config.doc_dir_abs());
  git_checked(root, {"add", "-A", "--", relative_to(config.doc_dir_abs(), root),
                     relative_to(config.store_path_abs(), root)});
  return report;
}

std::string render_hook(const fs::path& cli_path, const fs::path& hooks_dir) {
  std::string s = "#!/bin/sh\n";
  s += std::string(kHookMarker) + "\n";
  s += "chained=" + shell_quote((hooks_dir / kChainedHookName).string()) + "\n";
  s += "if [ -x \"$chained\" ]; then\n";
  s += "    \"$chained\" \"$@\" || exit $?\n";
  s += "fi\n";
  s += shell_quote(cli_path.string()) + " update --repo \"$(git rev-parse --show-toplevel)\" || exit $?\n";
  s += "echo \"repodoc: documentation update Passed\"\n";
  return s;
}

fs::path install_hook(const fs::path& repo_root, const fs::path& cli_path) {
  (void)git_toplevel(repo_root);
  std::string rel = git_checked(repo_root, {"rev-parse", "--git-path", "hooks"}).out;
  while (!rel.empty() && (rel.back() == '\n' || rel.back() == '\r')) rel.pop_back();
  fs::path hooks = fs::path(rel).is_absolute() ? fs::path(rel) : fs::absolute(repo_root) / rel;
  hooks = hooks.lexically_normal();
  std::error_code ec;
  if (!fs::is_directory(hooks, ec)) throw Error(ErrorKind::Io, "hooks directory missing: " + hooks.string());

  const fs::path hook = hooks / "pre-commit";
  if (fs::exists(hook, ec)) {
    std::ifstream in(hook, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (ss.str().find(kHookMarker) == std::string::npos) {
      const fs::path chained = hooks / kChainedHookName;
      if (fs::exists(chained, ec)) {
        throw Error(ErrorKind::Usage, "both " + hook.string() + " and " + chained.string() +
                                          " exist; refusing to overwrite either");
      }
      fs::rename(hook, chained);
    }
  }
  write_file_atomic(hook, render_hook(fs::absolute(cli_path), hooks));
  fs::permissions(hook, fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec |
                            fs::perms::others_read | fs::perms::others_exec);
  return hook;
}

}  // namespace repodoc
