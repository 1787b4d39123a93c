#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "repodoc/source_model.hpp"

namespace repodoc {

/// The five documentation sections, in their required order.
enum class Section { Name, Params, CodeDescription, Note, OutputExample };

inline constexpr Section kAllSections[] = {Section::Name, Section::Params, Section::CodeDescription,
                                           Section::Note, Section::OutputExample};

std::string_view to_string(Section s);

/// Parameter section label for an object kind: "parameters" or "Attributes".
std::string_view param_label(ObjectKind kind);

/// One line-start header found in a doc, with the text that follows it up to
/// the next header.
struct HeaderEntry {
  std::string label;  // as written, without markers
  bool bold = false;
  int line = 0;       // 1-based
  std::string content;  // trimmed
};

/// Line-start headers of a doc. Bold headers may carry any label; plain
/// "Label:" lines are reported only for the fixed section labels.
std::vector<HeaderEntry> scan_headers(std::string_view text);

/// Fixed section for a label (case-insensitive), or nullopt for free labels.
/// Both parameter labels map to Section::Params.
std::optional<Section> fixed_section(std::string_view label);

/// "- `name`: description" bullets of a parameter section's content.
std::vector<std::pair<std::string, std::string>> parse_param_bullets(std::string_view content);

struct ParsedDoc {
  std::string name_label;    // label of the leading bold header, e.g. "g"
  std::string name_text;
  std::string param_label;   // as written
  std::string param_text;
  std::vector<std::pair<std::string, std::string>> params;  // unique names, first wins
  std::string code_description;
  std::string note;
  std::optional<std::string> output_example;
  std::vector<Section> missing;
  std::vector<std::string> extra;  // labels of unexpected headers
  [[nodiscard]] bool complete() const { return missing.empty() && extra.empty(); }
};

/// Splits raw model output into its sections. Never throws; problems are
/// reported through `missing` and `extra`.
ParsedDoc parse_doc(std::string_view text, ObjectKind kind, bool has_return);

}  // namespace repodoc
