#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace repodoc {

namespace python {
struct Module;
struct Statement;
}  // namespace python

enum class ObjectKind { Class, Function };

std::string_view to_string(ObjectKind kind);
std::optional<ObjectKind> object_kind_from_string(std::string_view s);

/// 1-based, inclusive.
struct LineSpan {
  int start = 0;
  int end = 0;
  bool operator==(const LineSpan&) const = default;
};

/// Meta information of one parsed class or function.
struct CodeObject {
  std::string id;  // "<file>/<dotted path with '/'>", e.g. "demo/a.py/C/m"
  ObjectKind kind = ObjectKind::Function;
  std::string name;
  std::string file;
  LineSpan line_span;
  std::string snippet;
  std::vector<std::string> params;  // receiver excluded; constructor params for classes
  bool has_return = false;
  std::string parent_id;  // enclosing object id, or the file path
  std::string doc_path;   // same as id

  bool operator==(const CodeObject&) const = default;
};

// --- reference facts -------------------------------------------------------
// Language-neutral description of what each scope binds and calls, consumed
// by the project-graph resolver.

struct ImportBinding {
  std::string local_name;
  std::string module;                // dotted; leading dots mark relative imports
  std::optional<std::string> member; // `from module import member`
  bool operator==(const ImportBinding&) const = default;
};

struct CallSite {
  std::vector<std::string> chain;  // f(...) -> {"f"}; self.m(...) -> {"self","m"}
  int line = 0;
  bool operator==(const CallSite&) const = default;
};

struct ScopeFacts {
  std::string owner_id;  // object id, or the file path for module scope
  std::string receiver;  // first parameter of a method, empty otherwise
  std::vector<CallSite> calls;
  std::vector<ImportBinding> imports;
  std::vector<std::string> variables;  // params and assignment targets, sorted unique
  std::vector<std::vector<std::string>> bases;  // ClassDef only
  bool operator==(const ScopeFacts&) const = default;
};

struct FileParse {
  std::string file;
  std::vector<CodeObject> objects;  // source order (pre-order)
  std::optional<std::string> parse_error;
  std::vector<ScopeFacts> scopes;   // module scope first, then objects in source order
  std::vector<std::string> notes;   // non-fatal remarks, e.g. folded redefinitions
  bool operator==(const FileParse&) const = default;
};

/// A parser for one analyzed language.
class LanguageFrontend {
 public:
  virtual ~LanguageFrontend() = default;
  [[nodiscard]] virtual bool accepts(const std::filesystem::path& path) const = 0;
  [[nodiscard]] virtual FileParse parse(std::string_view path, std::string_view text) const = 0;
};

class PythonFrontend final : public LanguageFrontend {
 public:
  [[nodiscard]] bool accepts(const std::filesystem::path& path) const override;
  [[nodiscard]] FileParse parse(std::string_view path, std::string_view text) const override;
};

/// Relative paths (with '/') of analyzed-language files under `root`, sorted.
/// Hidden directories/files and ignore-glob matches are excluded.
std::vector<std::string> scan_repository(const std::filesystem::path& root,
                                         std::span<const std::string> ignore);

/// Same filter as scan_repository, applied to a single relative path.
bool is_analyzed_path(std::string_view rel, std::span<const std::string> ignore);

/// fnmatch-style glob over a relative path: `*` and `?` stay within one path
/// segment, `**` spans segments, `[...]` classes are supported. A pattern
/// without '/' matches against any single path segment.
bool glob_match(std::string_view pattern, std::string_view path);

FileParse parse_file(std::string_view path, std::string_view text);

/// Reads and parses `files` (relative to root) using up to `jobs` threads.
/// The result is in the order of `files`.
std::vector<FileParse> parse_files(const std::filesystem::path& root,
                                   std::span<const std::string> files, unsigned jobs = 1);

/// True iff the definition's own body (nested definitions excluded) returns a
/// value or yields. For a ClassDef: true iff any directly defined method does.
bool detect_has_return(const python::Statement& definition, const python::Module& module);

/// Source text of lines [span.start, span.end], without the final newline.
std::string extract_lines(std::string_view text, LineSpan span);

}  // namespace repodoc
