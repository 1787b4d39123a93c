#include "repodoc/source_model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "repodoc/error.hpp"
#include "repodoc/python/syntax.hpp"

namespace repodoc {

namespace fs = std::filesystem;
using python::Module;
using python::Statement;
using python::StmtKind;
using python::Token;
using python::TokenKind;
using python::TokenRange;

std::string_view to_string(ObjectKind kind) {
  return kind == ObjectKind::Class ? "Class" : "Function";
}

std::optional<ObjectKind> object_kind_from_string(std::string_view s) {
  if (s == "Class") return ObjectKind::Class;
  if (s == "Function") return ObjectKind::Function;
  return std::nullopt;
}

// --- globbing ----------------------------------------------------------------

namespace {

bool match_class(std::string_view pat, std::size_t& pi, char c) {
  // pat[pi] == '['
  std::size_t i = pi + 1;
  bool negate = false;
  if (i < pat.size() && (pat[i] == '!' || pat[i] == '^')) {
    negate = true;
    ++i;
  }
  bool matched = false;
  bool first = true;
  while (i < pat.size() && (first || pat[i] != ']')) {
    first = false;
    if (i + 2 < pat.size() && pat[i + 1] == '-' && pat[i + 2] != ']') {
      matched = matched || (pat[i] <= c && c <= pat[i + 2]);
      i += 3;
    } else {
      matched = matched || pat[i] == c;
      ++i;
    }
  }
  pi = i + 1;  // past ']'
  return matched != negate;
}

// Matches one path segment (no '/') against a segment pattern.
bool match_segment(std::string_view pat, std::string_view s) {
  std::size_t pi = 0;
  std::size_t si = 0;
  std::size_t star_p = std::string_view::npos;
  std::size_t star_s = 0;
  while (si < s.size()) {
    if (pi < pat.size() && pat[pi] == '*') {
      star_p = pi++;
      star_s = si;
    } else if (pi < pat.size() && pat[pi] == '[' && pat.find(']', pi + 2) != std::string_view::npos) {
      std::size_t next = pi;
      if (match_class(pat, next, s[si])) {
        pi = next;
        ++si;
      } else if (star_p != std::string_view::npos) {
        pi = star_p + 1;
        si = ++star_s;
      } else {
        return false;
      }
    } else if (pi < pat.size() && (pat[pi] == '?' || pat[pi] == s[si])) {
      ++pi;
      ++si;
    } else if (star_p != std::string_view::npos) {
      pi = star_p + 1;
      si = ++star_s;
    } else {
      return false;
    }
  }
  while (pi < pat.size() && pat[pi] == '*') ++pi;
  return pi == pat.size();
}

std::vector<std::string_view> split_path(std::string_view p) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= p.size()) {
    const std::size_t slash = p.find('/', start);
    const std::size_t end = slash == std::string_view::npos ? p.size() : slash;
    if (end > start) out.push_back(p.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return out;
}

bool match_segments(std::span<const std::string_view> pat, std::span<const std::string_view> path) {
  if (pat.empty()) return path.empty();
  if (pat.front() == "**") {
    for (std::size_t k = 0; k <= path.size(); ++k) {
      if (match_segments(pat.subspan(1), path.subspan(k))) return true;
    }
    return false;
  }
  if (path.empty()) return false;
  return match_segment(pat.front(), path.front()) && match_segments(pat.subspan(1), path.subspan(1));
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
  while (pattern.starts_with("./")) pattern.remove_prefix(2);
  while (!pattern.empty() && pattern.back() == '/') pattern.remove_suffix(1);
  const auto segs = split_path(path);
  if (pattern.find('/') == std::string_view::npos) {
    return std::any_of(segs.begin(), segs.end(),
                       [&](std::string_view seg) { return match_segment(pattern, seg); });
  }
  const auto pat = split_path(pattern);
  // A match on any directory prefix excludes the whole subtree.
  for (std::size_t n = 1; n <= segs.size(); ++n) {
    if (match_segments(pat, std::span(segs).first(n))) return true;
  }
  return false;
}

// --- scanning ----------------------------------------------------------------

bool PythonFrontend::accepts(const fs::path& path) const { return path.extension() == ".py"; }

std::vector<std::string> scan_repository(const fs::path& root, std::span<const std::string> ignore) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::Usage, "repository root is not a directory: " + root.string());
  }
  const PythonFrontend frontend;
  auto ignored = [&](const std::string& rel) {
    return std::any_of(ignore.begin(), ignore.end(),
                       [&](const std::string& g) { return glob_match(g, rel); });
  };
  std::vector<std::string> out;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    const fs::path& p = it->path();
    const std::string name = p.filename().string();
    const std::string rel = fs::relative(p, root).generic_string();
    if (name.starts_with(".") || ignored(rel)) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && frontend.accepts(p)) out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_analyzed_path(std::string_view rel, std::span<const std::string> ignore) {
  const PythonFrontend frontend;
  if (rel.empty() || !frontend.accepts(fs::path(rel))) return false;
  std::size_t pos = 0;
  while (pos <= rel.size()) {
    std::size_t slash = rel.find('/', pos);
    if (slash == std::string_view::npos) slash = rel.size();
    const std::string_view segment = rel.substr(pos, slash - pos);
    const std::string_view prefix = rel.substr(0, slash);
    if (segment.empty() || segment.starts_with(".")) return false;
    for (const auto& g : ignore) {
      if (glob_match(g, prefix)) return false;
    }
    pos = slash + 1;
  }
  return true;
}

// --- parsing -----------------------------------------------------------------

std::string extract_lines(std::string_view text, LineSpan span) {
  std::size_t pos = 0;
  int line = 1;
  while (line < span.start && pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) return {};
    pos = nl + 1;
    ++line;
  }
  const std::size_t begin = pos;
  std::size_t end = text.size();
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) break;
    if (line == span.end) {
      end = nl;
      break;
    }
    pos = nl + 1;
    ++line;
  }
  std::string out(text.substr(begin, end - begin));
  if (!out.empty() && out.back() == '\r') out.pop_back();
  return out;
}

namespace {

bool returns_in(const std::vector<Statement>& body, const std::vector<Token>& toks) {
  for (const auto& st : body) {
    if (st.is_definition()) continue;
    for (std::size_t i = st.tokens.begin; i < st.tokens.end; ++i) {
      if (toks[i].is_name("yield")) return true;
    }
    if (st.kind == StmtKind::Simple && toks[st.tokens.begin].is_name("return") &&
        st.tokens.end - st.tokens.begin > 1) {
      return true;
    }
    if (returns_in(st.body, toks)) return true;
  }
  return false;
}

void collect_methods(const std::vector<Statement>& body, std::vector<const Statement*>& out) {
  for (const auto& st : body) {
    if (st.kind == StmtKind::FunctionDef) {
      out.push_back(&st);
    } else if (st.kind == StmtKind::Compound) {
      collect_methods(st.body, out);
    }
  }
}

class FactCollector {
 public:
  FactCollector(const std::string& file, std::string_view text, const Module& module)
      : file_(file), text_(text), toks_(module.tokens), module_(module) {}

  FileParse run() {
    FileParse fp;
    fp.file = file_;
    scopes_.push_back(ScopeFacts{file_, {}, {}, {}, {}, {}});
    walk(module_.body, -1, 0);
    fp.objects = std::move(objects_);
    for (auto& s : scopes_) {
      std::sort(s.variables.begin(), s.variables.end());
      s.variables.erase(std::unique(s.variables.begin(), s.variables.end()), s.variables.end());
    }
    fp.scopes = std::move(scopes_);
    fp.notes = std::move(notes_);
    return fp;
  }

 private:
  // `owner` indexes objects_ (-1 for module level); `scope` indexes scopes_.
  void walk(const std::vector<Statement>& body, int owner, std::size_t scope) {
    for (const auto& st : body) {
      if (st.is_definition()) {
        define(st, owner, scope);
        continue;
      }
      if (st.kind == StmtKind::Simple) {
        simple_facts(st.tokens, scopes_[scope]);
      } else {
        header_facts(st.tokens, scopes_[scope]);
        walk(st.body, owner, scope);
      }
    }
  }

  void define(const Statement& st, int owner, std::size_t scope) {
    for (const auto& d : st.decorators) collect_calls(d, scopes_[scope]);
    // Defaults, annotations and bases are evaluated in the enclosing scope.
    collect_calls({st.tokens.begin + (st.is_async ? 3 : 2), st.tokens.end}, scopes_[scope]);

    const std::string parent_id = owner < 0 ? file_ : objects_[owner].id;
    const std::string id = parent_id + "/" + st.name;
    if (auto it = scope_of_.find(id); it != scope_of_.end()) {
      // Redefinition in the same namespace (e.g. a property setter): fold it
      // into the first definition.
      notes_.push_back("line " + std::to_string(st.start_line) + ": redefinition of '" + id +
                       "' folded into its first definition");
      const int existing = object_index_.at(id);
      walk(st.body, existing, it->second);
      return;
    }

    CodeObject obj;
    obj.id = id;
    obj.kind = st.kind == StmtKind::ClassDef ? ObjectKind::Class : ObjectKind::Function;
    obj.name = st.name;
    obj.file = file_;
    obj.line_span = {st.start_line, st.end_line};
    obj.snippet = extract_lines(text_, obj.line_span);
    obj.parent_id = parent_id;
    obj.doc_path = id;
    obj.has_return = detect_has_return(st, module_);

    ScopeFacts facts;
    facts.owner_id = id;
    if (obj.kind == ObjectKind::Function) {
      obj.params = st.params;
      facts.variables = st.params;
      const bool method = owner >= 0 && objects_[owner].kind == ObjectKind::Class;
      if (method && !st.params.empty() && !st.has_decorator(toks_, "staticmethod")) {
        facts.receiver = st.params.front();
        obj.params.erase(obj.params.begin());
      }
    } else {
      facts.bases = st.bases;
    }

    const int index = static_cast<int>(objects_.size());
    objects_.push_back(std::move(obj));
    object_index_[id] = index;
    const std::size_t new_scope = scopes_.size();
    scopes_.push_back(std::move(facts));
    scope_of_[id] = new_scope;

    walk(st.body, index, new_scope);

    if (objects_[index].kind == ObjectKind::Class) {
      if (auto init = object_index_.find(id + "/__init__"); init != object_index_.end()) {
        objects_[index].params = objects_[init->second].params;
      }
    }
  }

  // Calls of the form NAME(.NAME)*( whose chain is not the tail of a larger
  // expression such as `f().g(`.
  void collect_calls(TokenRange r, ScopeFacts& scope) {
    for (std::size_t i = r.begin + 1; i < r.end; ++i) {
      if (!toks_[i].is_op("(") || toks_[i - 1].kind != TokenKind::Name) continue;
      std::size_t j = i - 1;
      std::vector<std::string> chain{toks_[j].text};
      while (j >= r.begin + 2 && toks_[j - 1].is_op(".") && toks_[j - 2].kind == TokenKind::Name) {
        j -= 2;
        chain.insert(chain.begin(), toks_[j].text);
      }
      if (j > r.begin && toks_[j - 1].is_op(".")) continue;
      if (std::any_of(chain.begin(), chain.end(),
                      [](const std::string& n) { return python::is_keyword(n); })) {
        continue;
      }
      scope.calls.push_back(CallSite{std::move(chain), toks_[i].line});
    }
  }

  void add_target_names(TokenRange r, ScopeFacts& scope) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const Token& t = toks_[i];
      if (t.kind != TokenKind::Name || python::is_keyword(t.text)) continue;
      if (i > r.begin && toks_[i - 1].is_op(".")) continue;
      if (i + 1 < r.end && (toks_[i + 1].is_op(".") || toks_[i + 1].is_op("[") ||
                            toks_[i + 1].is_op("("))) {
        continue;
      }
      scope.variables.push_back(t.text);
    }
  }

  void walrus_targets(TokenRange r, ScopeFacts& scope) {
    for (std::size_t i = r.begin + 1; i < r.end; ++i) {
      if (toks_[i].is_op(":=") && toks_[i - 1].kind == TokenKind::Name) {
        scope.variables.push_back(toks_[i - 1].text);
      }
    }
  }

  void as_targets(TokenRange r, ScopeFacts& scope) {
    for (std::size_t i = r.begin; i + 1 < r.end; ++i) {
      if (!toks_[i].is_name("as")) continue;
      std::size_t end = i + 2;
      if (toks_[i + 1].is_op("(")) {
        int depth = 0;
        for (end = i + 1; end < r.end; ++end) {
          if (toks_[end].is_op("(")) ++depth;
          if (toks_[end].is_op(")") && --depth == 0) break;
        }
      }
      add_target_names({i + 1, std::min(end, r.end)}, scope);
    }
  }

  void header_facts(TokenRange r, ScopeFacts& scope) {
    collect_calls(r, scope);
    walrus_targets(r, scope);
    std::size_t i = r.begin;
    if (toks_[i].is_name("async")) ++i;
    if (toks_[i].is_name("for")) {
      std::size_t in = i + 1;
      while (in < r.end && !toks_[in].is_name("in")) ++in;
      add_target_names({i + 1, in}, scope);
    } else if (toks_[i].is_name("with") || toks_[i].is_name("except")) {
      as_targets(r, scope);
    }
  }

  void simple_facts(TokenRange r, ScopeFacts& scope) {
    const Token& first = toks_[r.begin];
    if (first.is_name("import") || first.is_name("from")) {
      import_facts(r, scope);
      return;
    }
    collect_calls(r, scope);
    walrus_targets(r, scope);
    if (first.is_name("global") || first.is_name("nonlocal") || first.is_name("del")) return;
    // Assignment targets: everything before the last depth-0 '=' (or an
    // augmented / annotated assignment operator).
    int depth = 0;
    std::size_t last_eq = r.end;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const Token& t = toks_[i];
      if (t.is_op("(") || t.is_op("[") || t.is_op("{")) ++depth;
      if (t.is_op(")") || t.is_op("]") || t.is_op("}")) --depth;
      if (depth != 0 || t.kind != TokenKind::Op) continue;
      if (t.is_op("=")) last_eq = i;
      if (last_eq == r.end && t.text.size() >= 2 && t.text.back() == '=' && t.text != "==" &&
          t.text != "!=" && t.text != "<=" && t.text != ">=" && t.text != ":=") {
        last_eq = i;  // augmented assignment
        break;
      }
      if (t.is_op(":") && last_eq == r.end && i == r.begin + 1) {
        last_eq = i;  // annotated assignment `x: T = v`
        break;
      }
    }
    if (last_eq != r.end) add_target_names({r.begin, last_eq}, scope);
  }

  void import_facts(TokenRange r, ScopeFacts& scope) {
    auto read_dotted = [&](std::size_t& i) {
      std::string name;
      while (i < r.end && (toks_[i].kind == TokenKind::Name || toks_[i].is_op(".") ||
                           toks_[i].is_op("..."))) {
        if (toks_[i].is_name("import") || toks_[i].is_name("as")) break;
        name += toks_[i].text;
        ++i;
      }
      return name;
    };
    std::size_t i = r.begin;
    if (toks_[i].is_name("import")) {
      ++i;
      while (i < r.end) {
        const std::string module = read_dotted(i);
        std::string local = module.substr(0, module.find('.'));
        std::string bound = local;
        if (i < r.end && toks_[i].is_name("as") && i + 1 < r.end) {
          local = toks_[i + 1].text;
          bound = module;
          i += 2;
        }
        if (!module.empty()) scope.imports.push_back(ImportBinding{local, bound, std::nullopt});
        if (i < r.end && toks_[i].is_op(",")) ++i;
        else break;
      }
      return;
    }
    ++i;  // from
    const std::string module = read_dotted(i);
    if (i >= r.end || !toks_[i].is_name("import")) return;
    ++i;
    while (i < r.end) {
      const Token& t = toks_[i];
      if (t.is_op("(") || t.is_op(")") || t.is_op(",") || t.is_op("*")) {
        ++i;
        continue;
      }
      if (t.kind != TokenKind::Name) break;
      std::string member = t.text;
      std::string local = member;
      ++i;
      if (i + 1 < r.end && toks_[i].is_name("as")) {
        local = toks_[i + 1].text;
        i += 2;
      }
      scope.imports.push_back(ImportBinding{local, module, member});
    }
  }

  const std::string& file_;
  std::string_view text_;
  const std::vector<Token>& toks_;
  const Module& module_;
  std::vector<CodeObject> objects_;
  std::vector<ScopeFacts> scopes_;
  std::vector<std::string> notes_;
  std::map<std::string, std::size_t> scope_of_;
  std::map<std::string, int> object_index_;
};

}  // namespace

bool detect_has_return(const Statement& definition, const Module& module) {
  if (definition.kind == StmtKind::ClassDef) {
    std::vector<const Statement*> methods;
    collect_methods(definition.body, methods);
    return std::any_of(methods.begin(), methods.end(),
                       [&](const Statement* m) { return returns_in(m->body, module.tokens); });
  }
  return returns_in(definition.body, module.tokens);
}

FileParse PythonFrontend::parse(std::string_view path, std::string_view text) const {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  const std::string file(path);
  python::Module module;
  try {
    module = python::parse_module(text);
  } catch (const python::SyntaxError& e) {
    FileParse fp;
    fp.file = file;
    fp.parse_error = e.what();
    return fp;
  }
  return FactCollector(file, text, module).run();
}

FileParse parse_file(std::string_view path, std::string_view text) {
  return PythonFrontend().parse(path, text);
}

std::vector<FileParse> parse_files(const fs::path& root, std::span<const std::string> files,
                                   unsigned jobs) {
  std::vector<FileParse> out(files.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < files.size(); i += stride) {
      std::ifstream in(root / files[i], std::ios::binary);
      if (!in) {
        out[i].file = files[i];
        out[i].parse_error = "cannot read file";
        continue;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      out[i] = parse_file(files[i], ss.str());
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  if (jobs <= 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(work, t, jobs);
  for (auto& th : threads) th.join();
  return out;
}

}  // namespace repodoc
