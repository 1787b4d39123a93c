#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "repodoc/doc_format.hpp"
#include "repodoc/doc_store.hpp"
#include "repodoc/project_graph.hpp"

namespace repodoc {

struct PredictedRefs {
  std::set<std::string> callers;
  std::set<std::string> callees;
};

using PredictedTable = std::map<std::string, PredictedRefs>;

struct RecallResult {
  std::map<std::string, double> per_object;  // only ids with >= 1 true reference
  std::map<std::string, std::string> errors;  // unknown ids
  double mean = 0.0;
};

/// Per-object recall over tagged caller/callee sets. Ids of `truth` with no
/// prediction count as empty predictions.
RecallResult reference_recall(const PredictedTable& predicted, const RepoGraph& truth);

/// Callers/callees of every object in `graph`.
PredictedTable references_of(const RepoGraph& graph);

enum class SectionStatus { Ok, Missing, NotBold, Empty, Unexpected };

std::string_view to_string(SectionStatus s);

struct FormatCheck {
  std::map<Section, SectionStatus> sections;  // the five sections
  std::vector<std::string> extra_headers;
  [[nodiscard]] bool compliant() const;
};

/// Required sections: name, parameters (Functions) / Attributes (Classes),
/// Code Description, Note, and Output Example iff has_return. An Output
/// Example on a non-returning object is reported as Unexpected.
FormatCheck check_format(std::string_view doc, ObjectKind kind, bool has_return);

/// "- `name`: ..." bullets under the parameters/Attributes section, in order,
/// duplicates kept.
std::vector<std::string> extract_params(std::string_view doc);

enum class ParamMetric { Jaccard, Precision };

/// Jaccard: |P∩T| / |P∪T|. Precision: |P∩T| / |P|. Both empty -> 1.0.
double param_accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth,
                      ParamMetric metric = ParamMetric::Jaccard);

struct ObjectRow {
  std::optional<double> recall;
  std::optional<FormatCheck> format;
  std::optional<double> param_accuracy;
};

struct EvalReport {
  std::map<std::string, ObjectRow> per_object;
  std::map<std::string, std::string> errors;
  double mean_recall = 0.0;
  std::size_t recall_rows = 0;
  std::map<Section, double> section_rate;  // over docs where the section is required/checked
  double format_rate = 0.0;                // fully compliant docs / docs
  double mean_param_accuracy = 0.0;
  std::size_t doc_rows = 0;
};

/// `docs`: id -> raw doc text. Objects of `truth` without a doc are skipped
/// for the format and parameter metrics.
EvalReport evaluate(const RepoGraph& truth, const std::map<std::string, std::string>& docs,
                    const std::optional<PredictedTable>& predicted, ParamMetric metric = ParamMetric::Jaccard);

/// Raw doc text of every record in a store.
std::map<std::string, std::string> docs_from_store(const DocStore& store);

/// Splits published pages back into per-object docs, keyed by id.
std::map<std::string, std::string> docs_from_pages(const std::filesystem::path& doc_dir);

/// {"<id>": {"callers": [...], "callees": [...]}}
PredictedTable predicted_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& report);
std::string render_report_table(const EvalReport& report);

}  // namespace repodoc
