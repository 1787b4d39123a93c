#include "repodoc/markdown_publisher.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "repodoc/error.hpp"

namespace repodoc {

namespace fs = std::filesystem;

namespace {

int object_depth(const RepoGraph& graph, const CodeObject& obj) {
  int depth = 0;
  for (const CodeObject* p = graph.object(obj.parent_id); p != nullptr; p = graph.object(p->parent_id)) ++depth;
  return depth;
}

void append_section(std::string& out, std::string_view label, std::string_view content) {
  out += "**";
  out += label;
  out += "**:";
  if (content.starts_with("- ") || content.starts_with("* ")) {
    out += "\n";
  } else if (!content.empty()) {
    out += " ";
  }
  out += content;
  out += "\n\n";
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string page_path_for(std::string_view source_file) {
  return fs::path(source_file).replace_extension(".md").generic_string();
}

std::string render_object(const CodeObject& object, const DocRecord* record, int depth) {
  const int level = std::min(2 + depth, 6);
  std::string out(static_cast<std::size_t>(level), '#');
  out += object.kind == ObjectKind::Class ? " ClassDef " : " FunctionDef ";
  out += object.name + "\n\n";
  if (record == nullptr) {
    out += "*Documentation for this object has not been generated yet.*\n\n";
    return out;
  }
  append_section(out, record->name_label.empty() ? object.name : record->name_label, record->name_header);
  append_section(out, record->param_label, record->param_text);
  append_section(out, "Code Description", record->code_description);
  append_section(out, "Note", record->note);
  if (record->output_example) append_section(out, "Output Example", *record->output_example);
  return out;
}

DocPage compile_file_doc(const RepoGraph& graph, std::string_view file_id, const DocStore& store) {
  DocPage page;
  page.source_file = std::string(file_id);
  page.output_path = page_path_for(file_id);

  struct Entry {
    int start;
    int depth;
    const CodeObject* obj;
  };
  std::vector<Entry> entries;
  for (const auto& [id, obj] : graph.objects) {
    if (obj.file == file_id) entries.push_back({obj.line_span.start, object_depth(graph, obj), &obj});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.start != b.start ? a.start < b.start : a.depth < b.depth;
  });

  page.body = "# " + page.source_file + "\n";
  for (const auto& e : entries) {
    page.body += "\n";
    std::string section = render_object(*e.obj, store.record(e.obj->id), e.depth);
    section.pop_back();  // single trailing newline per section
    page.body += section;
  }
  return page;
}

std::string render_summary(const std::vector<DocPage>& pages) {
  std::vector<const DocPage*> sorted;
  for (const auto& p : pages) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const DocPage* a, const DocPage* b) { return a->source_file < b->source_file; });

  std::string out = "# Summary\n\n";
  std::vector<std::string> open;  // directory components currently listed
  for (const DocPage* p : sorted) {
    std::vector<std::string> parts;
    std::string_view rest = p->source_file;
    for (auto slash = rest.find('/'); slash != std::string_view::npos; slash = rest.find('/')) {
      parts.emplace_back(rest.substr(0, slash));
      rest.remove_prefix(slash + 1);
    }
    std::size_t common = 0;
    while (common < open.size() && common < parts.size() && open[common] == parts[common]) ++common;
    open.resize(common);
    for (std::size_t i = common; i < parts.size(); ++i) {
      out += std::string(i * 2, ' ') + "- " + parts[i] + "/\n";
      open.push_back(parts[i]);
    }
    out += std::string(parts.size() * 2, ' ') + "- [" + std::string(rest) + "](" + p->output_path + ")\n";
  }
  return out;
}

SiteResult write_site(const RepoGraph& graph, const DocStore& store, const fs::path& out_dir) {
  std::vector<DocPage> pages;
  for (const auto& [id, node] : graph.tree) {
    if (node.kind == NodeKind::File) pages.push_back(compile_file_doc(graph, id, store));
  }
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& p : pages) files.emplace_back(p.output_path, p.body);
  files.emplace_back("SUMMARY.md", render_summary(pages));

  SiteResult result;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) throw Error(ErrorKind::Io, "cannot create doc dir " + out_dir.string());

  for (const auto& [rel, body] : files) {
    result.pages.push_back(rel);
    const fs::path target = out_dir / rel;
    if (fs::exists(target, ec) && read_all(target) == body) continue;
    fs::create_directories(target.parent_path(), ec);
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out << body;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "cannot write " + target.string());
    result.written.push_back(rel);
  }
  std::sort(result.pages.begin(), result.pages.end());
  std::sort(result.written.begin(), result.written.end());

  const std::set<std::string> keep(result.pages.begin(), result.pages.end());
  std::vector<fs::path> dirs;
  for (auto it = fs::recursive_directory_iterator(out_dir); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory()) {
      dirs.push_back(it->path());
      continue;
    }
    const std::string rel = fs::relative(it->path(), out_dir).generic_string();
    if (it->path().extension() == ".md" && !keep.contains(rel)) {
      fs::remove(it->path(), ec);
      result.removed.push_back(rel);
    }
  }
  std::sort(dirs.rbegin(), dirs.rend());
  for (const auto& d : dirs) {
    if (fs::is_empty(d, ec)) fs::remove(d, ec);
  }
  std::sort(result.removed.begin(), result.removed.end());
  return result;
}

}  // namespace repodoc
