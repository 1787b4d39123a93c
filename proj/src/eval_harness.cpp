#include "repodoc/eval_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "repodoc/error.hpp"

namespace repodoc {

namespace fs = std::filesystem;

namespace {

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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

// --- recall --------------------------------------------------------------------

PredictedTable references_of(const RepoGraph& graph) {
  PredictedTable out;
  for (const auto& [id, obj] : graph.objects) {
    auto callers = graph.callers(id);
    auto callees = graph.callees(id);
    out[id] = {{callers.begin(), callers.end()}, {callees.begin(), callees.end()}};
  }
  return out;
}

RecallResult reference_recall(const PredictedTable& predicted, const RepoGraph& truth) {
  RecallResult r;
  for (const auto& [id, refs] : predicted) {
    if (!truth.objects.contains(id)) r.errors[id] = "unknown object id";
  }
  double sum = 0.0;
  for (const auto& [id, obj] : truth.objects) {
    const auto callers = truth.callers(id);
    const auto callees = truth.callees(id);
    const std::size_t total = callers.size() + callees.size();
    if (total == 0) continue;
    std::size_t hit = 0;
    if (auto it = predicted.find(id); it != predicted.end()) {
      for (const auto& c : callers) hit += it->second.callers.contains(c);
      for (const auto& c : callees) hit += it->second.callees.contains(c);
    }
    const double recall = static_cast<double>(hit) / static_cast<double>(total);
    r.per_object[id] = recall;
    sum += recall;
  }
  r.mean = r.per_object.empty() ? 0.0 : sum / static_cast<double>(r.per_object.size());
  return r;
}

// --- format --------------------------------------------------------------------

std::string_view to_string(SectionStatus s) {
  switch (s) {
    case SectionStatus::Ok: return "ok";
    case SectionStatus::Missing: return "missing";
    case SectionStatus::NotBold: return "not-bold";
    case SectionStatus::Empty: return "empty";
    case SectionStatus::Unexpected: return "unexpected";
  }
  return "?";
}

bool FormatCheck::compliant() const {
  return extra_headers.empty() && std::all_of(sections.begin(), sections.end(), [](const auto& kv) {
           return kv.second == SectionStatus::Ok;
         });
}

FormatCheck check_format(std::string_view doc, ObjectKind kind, bool has_return) {
  FormatCheck check;
  for (Section s : kAllSections) check.sections[s] = SectionStatus::Missing;
  if (!has_return) check.sections[Section::OutputExample] = SectionStatus::Ok;
  const std::string expected_param = lower(param_label(kind));

  std::set<Section> seen;
  for (const auto& h : scan_headers(doc)) {
    auto section = fixed_section(h.label);
    if (section == Section::Params && lower(h.label) != expected_param) {
      check.extra_headers.push_back(h.label);
      continue;
    }
    if (!section) {
      if (!seen.contains(Section::Name)) {
        seen.insert(Section::Name);
        check.sections[Section::Name] = h.content.empty() ? SectionStatus::Empty : SectionStatus::Ok;
      } else {
        check.extra_headers.push_back(h.label);
      }
      continue;
    }
    if (!seen.insert(*section).second) {
      check.extra_headers.push_back(h.label);
      continue;
    }
    SectionStatus status = SectionStatus::Ok;
    if (*section == Section::OutputExample && !has_return) {
      status = SectionStatus::Unexpected;
    } else if (!h.bold) {
      status = SectionStatus::NotBold;
    } else if (h.content.empty()) {
      status = SectionStatus::Empty;
    }
    check.sections[*section] = status;
  }
  return check;
}

std::vector<std::string> extract_params(std::string_view doc) {
  std::vector<std::string> out;
  for (const auto& h : scan_headers(doc)) {
    if (fixed_section(h.label) != Section::Params) continue;
    for (auto& [name, desc] : parse_param_bullets(h.content)) out.push_back(std::move(name));
    break;
  }
  return out;
}

double param_accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth,
                      ParamMetric metric) {
  const std::set<std::string> p(predicted.begin(), predicted.end());
  const std::set<std::string> t(truth.begin(), truth.end());
  if (p.empty() && t.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : p) inter += t.contains(x);
  if (metric == ParamMetric::Precision) {
    return p.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(p.size());
  }
  const std::size_t uni = p.size() + t.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// --- report --------------------------------------------------------------------

EvalReport evaluate(const RepoGraph& truth, const std::map<std::string, std::string>& docs,
                    const std::optional<PredictedTable>& predicted, ParamMetric metric) {
  EvalReport report;
  if (predicted) {
    RecallResult rr = reference_recall(*predicted, truth);
    for (const auto& [id, v] : rr.per_object) report.per_object[id].recall = v;
    for (const auto& [id, e] : rr.errors) report.errors[id] = e;
    report.mean_recall = rr.mean;
    report.recall_rows = rr.per_object.size();
  }
  std::map<Section, std::size_t> ok_count;
  std::size_t compliant = 0;
  double param_sum = 0.0;
  for (const auto& [id, text] : docs) {
    const CodeObject* obj = truth.object(id);
    if (obj == nullptr) {
      report.errors[id] = "document for unknown object id";
      continue;
    }
    ObjectRow& row = report.per_object[id];
    row.format = check_format(text, obj->kind, obj->has_return);
    row.param_accuracy = param_accuracy(extract_params(text), obj->params, metric);
    for (const auto& [s, status] : row.format->sections) ok_count[s] += status == SectionStatus::Ok;
    compliant += row.format->compliant();
    param_sum += *row.param_accuracy;
    ++report.doc_rows;
  }
  if (report.doc_rows > 0) {
    const auto n = static_cast<double>(report.doc_rows);
    for (Section s : kAllSections) report.section_rate[s] = static_cast<double>(ok_count[s]) / n;
    report.format_rate = static_cast<double>(compliant) / n;
    report.mean_param_accuracy = param_sum / n;
  }
  return report;
}

std::map<std::string, std::string> docs_from_store(const DocStore& store) {
  std::map<std::string, std::string> out;
  for (const auto& [id, r] : store.records) out[id] = r.raw_text;
  return out;
}

std::map<std::string, std::string> docs_from_pages(const fs::path& doc_dir) {
  std::map<std::string, std::string> out;
  std::error_code ec;
  if (!fs::is_directory(doc_dir, ec)) throw Error(ErrorKind::Usage, "not a directory: " + doc_dir.string());
  for (const auto& entry : fs::recursive_directory_iterator(doc_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".md" || entry.path().filename() == "SUMMARY.md") {
      continue;
    }
    std::ifstream in(entry.path(), std::ios::binary);
    std::string line, file, current, body;
    std::vector<std::string> stack;
    auto flush = [&] {
      if (!current.empty()) out[current] = trim_block(body);
      body.clear();
    };
    while (std::getline(in, line)) {
      if (file.empty() && line.starts_with("# ")) {
        file = line.substr(2);
        continue;
      }
      std::size_t level = 0;
      while (level < line.size() && line[level] == '#') ++level;
      if (level >= 2 && level <= 6 && line.size() > level && line[level] == ' ') {
        std::istringstream h(line.substr(level + 1));
        std::string kind, name;
        h >> kind >> name;
        if ((kind == "ClassDef" || kind == "FunctionDef") && !name.empty()) {
          flush();
          stack.resize(std::min(stack.size(), level - 2));
          stack.push_back(name);
          current = file;
          for (const auto& s : stack) current += "/" + s;
          continue;
        }
      }
      body += line + "\n";
    }
    flush();
  }
  return out;
}

PredictedTable predicted_from_json(const nlohmann::json& j) {
  PredictedTable out;
  try {
    for (const auto& [id, v] : j.items()) {
      PredictedRefs r;
      for (const auto& c : v.value("callers", nlohmann::json::array())) r.callers.insert(c.get<std::string>());
      for (const auto& c : v.value("callees", nlohmann::json::array())) r.callees.insert(c.get<std::string>());
      out[id] = std::move(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("malformed predicted references: ") + e.what());
  }
  return out;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& [id, row] : report.per_object) {
    nlohmann::json r = nlohmann::json::object();
    if (row.recall) r["recall"] = *row.recall;
    if (row.param_accuracy) r["param_accuracy"] = *row.param_accuracy;
    if (row.format) {
      nlohmann::json f = nlohmann::json::object();
      for (const auto& [s, status] : row.format->sections) f[std::string(to_string(s))] = std::string(to_string(status));
      r["format"] = f;
      r["format_ok"] = row.format->compliant();
      r["extra_headers"] = row.format->extra_headers;
    }
    rows[id] = std::move(r);
  }
  nlohmann::json sections = nlohmann::json::object();
  for (const auto& [s, rate] : report.section_rate) sections[std::string(to_string(s))] = rate;
  return {{"per_object", std::move(rows)},
          {"errors", report.errors},
          {"aggregates",
           {{"mean_recall", report.mean_recall},
            {"recall_rows", report.recall_rows},
            {"format_rate", report.format_rate},
            {"section_rate", std::move(sections)},
            {"mean_param_accuracy", report.mean_param_accuracy},
            {"doc_rows", report.doc_rows}}}};
}

std::string render_report_table(const EvalReport& report) {
  std::ostringstream os;
  std::size_t width = 6;
  for (const auto& [id, row] : report.per_object) width = std::max(width, id.size());
  os << std::string(width, ' ').replace(0, 6, "object") << "  recall  format  params\n";
  for (const auto& [id, row] : report.per_object) {
    os << id << std::string(width - id.size(), ' ') << "  " << (row.recall ? fmt(*row.recall) : "     -") << "  "
       << (row.format ? (row.format->compliant() ? "    ok" : "  FAIL") : "     -") << "  "
       << (row.param_accuracy ? fmt(*row.param_accuracy) : "     -") << "\n";
  }
  for (const auto& [id, e] : report.errors) os << "error: " << id << ": " << e << "\n";
  os << "mean recall " << fmt(report.mean_recall) << " over " << report.recall_rows << " objects\n";
  os << "format alignment " << fmt(report.format_rate) << " over " << report.doc_rows << " docs\n";
  for (const auto& [s, rate] : report.section_rate) os << "  " << to_string(s) << " " << fmt(rate) << "\n";
  os << "mean parameter accuracy " << fmt(report.mean_param_accuracy) << "\n";
  return os.str();
}

}  // namespace repodoc
