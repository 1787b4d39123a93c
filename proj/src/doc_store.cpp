#include "repodoc/doc_store.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "repodoc/error.hpp"

namespace repodoc {

namespace fs = std::filesystem;

namespace {

constexpr int kStoreVersion = 1;

nlohmann::json record_to_json(const DocRecord& r) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& [name, desc] : r.param_section) params.push_back({name, desc});
  nlohmann::json j = {{"kind", to_string(r.kind)},
                      {"name_label", r.name_label},
                      {"name_header", r.name_header},
                      {"param_label", r.param_label},
                      {"param_text", r.param_text},
                      {"param_section", std::move(params)},
                      {"code_description", r.code_description},
                      {"note", r.note},
                      {"source_hash", r.source_hash},
                      {"model", r.model},
                      {"generated_at", r.generated_at},
                      {"raw_text", r.raw_text}};
  j["output_example"] = r.output_example ? nlohmann::json(*r.output_example) : nlohmann::json(nullptr);
  return j;
}

DocRecord record_from_json(const std::string& id, const nlohmann::json& j) {
  DocRecord r;
  r.id = id;
  const auto kind = object_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorKind::Store, "unknown object kind in record " + id);
  r.kind = *kind;
  r.name_label = j.at("name_label").get<std::string>();
  r.name_header = j.at("name_header").get<std::string>();
  r.param_label = j.at("param_label").get<std::string>();
  r.param_text = j.at("param_text").get<std::string>();
  for (const auto& p : j.at("param_section")) {
    r.param_section.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  }
  r.code_description = j.at("code_description").get<std::string>();
  r.note = j.at("note").get<std::string>();
  if (!j.at("output_example").is_null()) r.output_example = j.at("output_example").get<std::string>();
  r.source_hash = j.at("source_hash").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.generated_at = j.at("generated_at").get<std::string>();
  r.raw_text = j.at("raw_text").get<std::string>();
  return r;
}

}  // namespace

const DocRecord* DocStore::record(std::string_view id) const {
  auto it = records.find(std::string(id));
  return it == records.end() ? nullptr : &it->second;
}

std::string hash_source(std::string_view snippet) {
  std::string norm;
  norm.reserve(snippet.size());
  std::size_t pos = 0;
  while (pos <= snippet.size()) {
    std::size_t nl = snippet.find('\n', pos);
    const bool last = nl == std::string_view::npos;
    if (last) nl = snippet.size();
    std::string_view line = snippet.substr(pos, nl - pos);
    const auto end = line.find_last_not_of(" \t\r\f\v");
    line = end == std::string_view::npos ? std::string_view{} : line.substr(0, end + 1);
    norm.append(line);
    if (!last) norm.push_back('\n');
    pos = nl + 1;
  }

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(norm.data(), norm.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Internal, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

DocRecord make_record(const CodeObject& object, std::string_view raw_text, std::string model,
                      std::string generated_at) {
  ParsedDoc doc = parse_doc(raw_text, object.kind, object.has_return);
  DocRecord r;
  r.id = object.id;
  r.kind = object.kind;
  r.name_label = std::move(doc.name_label);
  r.name_header = std::move(doc.name_text);
  r.param_label = std::move(doc.param_label);
  r.param_text = std::move(doc.param_text);
  r.param_section = std::move(doc.params);
  r.code_description = std::move(doc.code_description);
  r.note = std::move(doc.note);
  r.output_example = std::move(doc.output_example);
  r.source_hash = hash_source(object.snippet);
  r.model = std::move(model);
  r.generated_at = std::move(generated_at);
  r.raw_text = std::string(raw_text);
  return r;
}

nlohmann::json store_to_json(const DocStore& store) {
  nlohmann::json records = nlohmann::json::object();
  for (const auto& [id, r] : store.records) records[id] = record_to_json(r);
  return {{"version", kStoreVersion}, {"graph", graph_to_json(store.graph)}, {"records", std::move(records)}};
}

DocStore store_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("version", 0) != kStoreVersion) {
    throw Error(ErrorKind::Store, "unsupported store version");
  }
  DocStore store;
  store.graph = graph_from_json(j.at("graph"));
  for (const auto& [id, r] : j.at("records").items()) {
    if (!store.graph.objects.contains(id)) {
      throw Error(ErrorKind::Store, "record without graph object: " + id);
    }
    store.records.emplace(id, record_from_json(id, r));
  }
  return store;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot replace " + path.string());
  }
}

void save_store(const DocStore& store, const fs::path& path) {
  try {
    write_file_atomic(path, store_to_json(store).dump(2) + "\n");
  } catch (const Error& e) {
    throw Error(ErrorKind::Store, e.what());
  }
}

DocStore load_store(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Store, "cannot read store " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string hint = "; delete it and run `repodoc generate` to regenerate all docs";
  try {
    return store_from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Store, "corrupt store " + path.string() + ": " + e.what() + hint);
  } catch (const Error& e) {
    throw Error(ErrorKind::Store, "corrupt store " + path.string() + ": " + e.what() + hint);
  }
}

}  // namespace repodoc
