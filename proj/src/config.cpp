#include "repodoc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "repodoc/error.hpp"

namespace repodoc {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::Usage, "config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw Error(ErrorKind::Usage, "config: unknown key " + where + key);
  }
}

template <typename T>
T get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Usage, "config: invalid value for " + key);
  }
}

std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

fs::path Config::doc_dir_abs() const { return doc_dir.is_absolute() ? doc_dir : repo_root / doc_dir; }

fs::path Config::store_path_abs() const {
  return store_path.is_absolute() ? store_path : repo_root / store_path;
}

fs::path Config::record_dir_abs() const { return store_path_abs().parent_path(); }

PipelineOptions Config::pipeline_options(unsigned jobs) const {
  PipelineOptions o;
  o.tiers = provider.tiers;
  o.completion_reserve = completion_reserve_tokens;
  o.temperature = provider.temperature;
  o.child_docs = child_docs_enabled;
  o.doc_language = doc_language;
  o.jobs = jobs;
  return o;
}

GatewayOptions Config::gateway_options() const {
  GatewayOptions o;
  o.retries = provider.retries;
  o.max_concurrency = provider.max_concurrency;
  return o;
}

void apply_config_json(Config& c, const nlohmann::json& j) {
  reject_unknown(j,
                 {"ignore", "doc_dir", "store_path", "provider", "doc_language", "child_docs_enabled",
                  "completion_reserve_tokens"},
                 "");
  if (j.contains("ignore")) c.ignore = get<std::vector<std::string>>(j, "ignore");
  if (j.contains("doc_dir")) c.doc_dir = get<std::string>(j, "doc_dir");
  if (j.contains("store_path")) c.store_path = get<std::string>(j, "store_path");
  if (j.contains("doc_language")) c.doc_language = get<std::string>(j, "doc_language");
  if (j.contains("child_docs_enabled")) c.child_docs_enabled = get<bool>(j, "child_docs_enabled");
  if (j.contains("completion_reserve_tokens")) {
    c.completion_reserve_tokens = get<long>(j, "completion_reserve_tokens");
  }
  if (j.contains("provider")) {
    const auto& p = j.at("provider");
    reject_unknown(p, {"base_url", "tiers", "temperature", "retries", "max_concurrency"}, "provider.");
    if (p.contains("base_url")) c.provider.base_url = get<std::string>(p, "base_url");
    if (p.contains("temperature")) c.provider.temperature = get<double>(p, "temperature");
    if (p.contains("retries")) c.provider.retries = get<int>(p, "retries");
    if (p.contains("max_concurrency")) c.provider.max_concurrency = get<int>(p, "max_concurrency");
    if (p.contains("tiers")) {
      c.provider.tiers.clear();
      for (const auto& t : p.at("tiers")) {
        reject_unknown(t, {"name", "context_window"}, "provider.tiers[].");
        c.provider.tiers.push_back({get<std::string>(t, "name"), get<long>(t, "context_window")});
      }
    }
  }

  if (c.provider.tiers.empty()) throw Error(ErrorKind::Usage, "config: provider.tiers must not be empty");
  for (std::size_t i = 0; i < c.provider.tiers.size(); ++i) {
    if (c.provider.tiers[i].context_window <= 0 ||
        (i > 0 && c.provider.tiers[i].context_window <= c.provider.tiers[i - 1].context_window)) {
      throw Error(ErrorKind::Usage, "config: provider.tiers must have strictly increasing context_window");
    }
  }
  if (c.provider.temperature < 0 || c.provider.temperature > 1) {
    throw Error(ErrorKind::Usage, "config: provider.temperature must be in [0, 1]");
  }
  if (c.provider.retries < 0) throw Error(ErrorKind::Usage, "config: provider.retries must be >= 0");
  if (c.provider.max_concurrency < 1) throw Error(ErrorKind::Usage, "config: provider.max_concurrency must be >= 1");
  if (c.completion_reserve_tokens < 1) throw Error(ErrorKind::Usage, "config: completion_reserve_tokens must be >= 1");
}

Config load_config(const fs::path& repo_root, const std::optional<fs::path>& config_path) {
  Config c;
  c.repo_root = fs::absolute(repo_root).lexically_normal();
  if (c.repo_root.has_filename() == false) c.repo_root = c.repo_root.parent_path();
  const fs::path path = config_path ? *config_path : c.repo_root / kConfigFileName;
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    if (config_path) throw Error(ErrorKind::Usage, "config file not found: " + path.string());
    return c;
  }
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::Usage, path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                      ": malformed config");
  }
  apply_config_json(c, j);
  return c;
}

}  // namespace repodoc
