#include "repodoc/doc_format.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace repodoc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim_block(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct HeaderMatch {
  std::string label;
  bool bold;
  std::string rest;
};

std::optional<HeaderMatch> match_header(std::string_view line) {
  const std::string_view l = trim(line);
  if (l.starts_with("**")) {
    const auto close = l.find("**", 2);
    if (close == std::string_view::npos || close == 2) return std::nullopt;
    std::string_view label = l.substr(2, close - 2);
    std::string_view rest = l.substr(close + 2);
    if (label.ends_with(':')) {
      label.remove_suffix(1);
    } else {
      rest = trim(rest);
      if (!rest.starts_with(':')) return std::nullopt;
      rest.remove_prefix(1);
    }
    label = trim(label);
    if (label.empty() || label.find('*') != std::string_view::npos) return std::nullopt;
    return HeaderMatch{std::string(label), true, std::string(trim(rest))};
  }
  const auto colon = l.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string_view label = trim(l.substr(0, colon));
  if (!fixed_section(label)) return std::nullopt;
  return HeaderMatch{std::string(label), false, std::string(trim(l.substr(colon + 1)))};
}

}  // namespace

std::string_view to_string(Section s) {
  switch (s) {
    case Section::Name: return "Name";
    case Section::Params: return "Parameters";
    case Section::CodeDescription: return "Code Description";
    case Section::Note: return "Note";
    case Section::OutputExample: return "Output Example";
  }
  return "?";
}

std::string_view param_label(ObjectKind kind) {
  return kind == ObjectKind::Class ? "Attributes" : "parameters";
}

std::optional<Section> fixed_section(std::string_view label) {
  const std::string l = lower(trim(label));
  if (l == "parameters" || l == "attributes") return Section::Params;
  if (l == "code description") return Section::CodeDescription;
  if (l == "note") return Section::Note;
  if (l == "output example") return Section::OutputExample;
  return std::nullopt;
}

std::vector<HeaderEntry> scan_headers(std::string_view text) {
  std::vector<HeaderEntry> out;
  std::string pending;
  int line_no = 0;
  std::size_t pos = 0;
  auto flush = [&] {
    if (!out.empty()) out.back().content = trim_block(pending);
    pending.clear();
  };
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    if (auto h = match_header(line)) {
      flush();
      out.push_back(HeaderEntry{h->label, h->bold, line_no, {}});
      pending = h->rest;
    } else {
      pending += "\n";
      pending += line;
    }
    pos = nl + 1;
  }
  flush();
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_param_bullets(std::string_view content) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view l = trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    if (!(l.starts_with("- ") || l.starts_with("* "))) continue;
    l = trim(l.substr(2));
    if (!l.starts_with('`')) continue;
    const auto close = l.find('`', 1);
    if (close == std::string_view::npos || close == 1) continue;
    const std::string_view name = l.substr(1, close - 1);
    std::string_view rest = trim(l.substr(close + 1));
    if (!rest.starts_with(':')) continue;
    rest.remove_prefix(1);
    out.emplace_back(std::string(trim(name)), std::string(trim(rest)));
  }
  return out;
}

ParsedDoc parse_doc(std::string_view text, ObjectKind kind, bool has_return) {
  ParsedDoc doc;
  std::set<Section> seen;
  for (const auto& h : scan_headers(text)) {
    const auto section = fixed_section(h.label);
    if (!section) {
      if (h.bold && !seen.contains(Section::Name)) {
        seen.insert(Section::Name);
        doc.name_label = h.label;
        doc.name_text = h.content;
      } else {
        doc.extra.push_back(h.label);
      }
      continue;
    }
    if (!seen.insert(*section).second) {
      doc.extra.push_back(h.label);
      continue;
    }
    switch (*section) {
      case Section::Params:
        doc.param_label = h.label;
        doc.param_text = h.content;
        for (auto& [name, desc] : parse_param_bullets(h.content)) {
          const bool dup = std::any_of(doc.params.begin(), doc.params.end(),
                                       [&](const auto& p) { return p.first == name; });
          if (!dup) doc.params.emplace_back(std::move(name), std::move(desc));
        }
        break;
      case Section::CodeDescription: doc.code_description = h.content; break;
      case Section::Note: doc.note = h.content; break;
      case Section::OutputExample:
        if (has_return) {
          doc.output_example = h.content;
        } else {
          doc.extra.push_back(h.label);
        }
        break;
      case Section::Name: break;
    }
  }
  for (Section s : kAllSections) {
    if (s == Section::OutputExample && !has_return) continue;
    if (!seen.contains(s)) doc.missing.push_back(s);
  }
  if (has_return && !doc.output_example) doc.output_example = "";
  if (doc.param_label.empty()) doc.param_label = std::string(param_label(kind));
  return doc;
}

}  // namespace repodoc
