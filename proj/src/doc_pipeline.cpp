#include "repodoc/doc_pipeline.hpp"

#include <algorithm>
#include <condition_variable>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

namespace repodoc {

namespace {

std::vector<std::string> sorted_copy(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) failures.push_back({{"id", f.id}, {"message", f.message}});
  nlohmann::json reductions = nlohmann::json::object();
  for (const auto& [id, steps] : report.reductions) {
    auto& arr = reductions[id] = nlohmann::json::array();
    for (auto s : steps) arr.push_back(std::string(to_string(s)));
  }
  return {{"generated", report.generated},       {"skipped", report.skipped},
          {"failures", std::move(failures)},      {"reductions", std::move(reductions)},
          {"gateway_calls", report.gateway_calls}, {"prompt_tokens", report.prompt_tokens},
          {"completion_tokens", report.completion_tokens}};
}

bool is_up_to_date(const RepoGraph& graph, const DocStore& store, const std::string& id, bool child_docs) {
  const DocRecord* rec = store.record(id);
  const CodeObject* obj = graph.object(id);
  if (rec == nullptr || obj == nullptr || rec->source_hash.empty()) return false;
  if (rec->source_hash != hash_source(obj->snippet)) return false;
  if (store.graph.object(id) == nullptr) return false;
  if (sorted_copy(graph.callers(id)) != sorted_copy(store.graph.callers(id))) return false;
  if (sorted_copy(graph.callees(id)) != sorted_copy(store.graph.callees(id))) return false;
  if (child_docs && graph.member_objects(id) != store.graph.member_objects(id)) return false;
  return true;
}

RunReport generate_all(const RepoGraph& graph, Gateway& gateway, DocStore& store, const PipelineOptions& options) {
  const std::vector<std::string> order = topological_order(graph);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::map<std::string, std::size_t> unmet;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto& id : order) {
    std::set<std::string> deps;
    for (const auto& c : graph.callees(id)) deps.insert(c);
    for (const auto& m : graph.member_objects(id)) deps.insert(m);
    unmet[id] = deps.size();
    for (const auto& d : deps) dependents[d].push_back(id);
  }

  std::set<std::string> skip;
  for (const auto& id : order) {
    const bool keep = options.only ? !options.only->contains(id)
                                   : is_up_to_date(graph, store, id, options.child_docs);
    if (keep) skip.insert(id);
  }

  const UsageLedger before = gateway.usage();
  const auto clock = options.clock ? options.clock : utc_timestamp;

  RunReport report;
  std::set<std::string> failed;
  std::mutex mutex;
  std::condition_variable cv;
  std::set<std::pair<std::size_t, std::string>> ready;
  std::size_t remaining = order.size();
  std::exception_ptr fatal;

  for (const auto& id : order) {
    if (unmet[id] == 0) ready.emplace(rank[id], id);
  }

  auto process = [&](const std::string& id) {
    if (skip.contains(id)) {
      std::lock_guard lock(mutex);
      report.skipped.push_back(id);
      return;
    }
    PromptContext ctx;
    {
      std::lock_guard lock(mutex);
      AssembleOptions ao{options.child_docs, options.doc_language, &failed};
      ctx = assemble_context(graph, store, id, ao);
    }
    try {
      FitResult fit = fit_to_budget(ctx, options.tiers, options.completion_reserve);
      CompletionRequest req{fit.tier.name, render_prompt(fit.ctx), options.completion_reserve,
                            options.temperature, id};
      CompletionResponse resp = gateway.complete(req);
      DocRecord rec = make_record(*graph.object(id), resp.text, fit.tier.name, clock());
      std::lock_guard lock(mutex);
      store.records[id] = std::move(rec);
      report.generated.push_back(id);
      if (!fit.applied.empty()) report.reductions.emplace_back(id, std::move(fit.applied));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Provider && e.kind() != ErrorKind::OverBudget) throw;
      std::lock_guard lock(mutex);
      failed.insert(id);
      report.failures.push_back({id, e.kind(), e.what()});
      if (auto it = store.records.find(id); it != store.records.end()) it->second.source_hash.clear();
    }
  };

  auto worker = [&] {
    while (true) {
      std::string id;
      {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return !ready.empty() || remaining == 0 || fatal; });
        if (remaining == 0 || fatal) return;
        id = ready.begin()->second;
        ready.erase(ready.begin());
      }
      try {
        process(id);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!fatal) fatal = std::current_exception();
        cv.notify_all();
        return;
      }
      {
        std::lock_guard lock(mutex);
        for (const auto& d : dependents[id]) {
          if (--unmet[d] == 0) ready.emplace(rank[d], d);
        }
        --remaining;
      }
      cv.notify_all();
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  for (auto it = store.records.begin(); it != store.records.end();) {
    it = graph.objects.contains(it->first) ? std::next(it) : store.records.erase(it);
  }
  store.graph = graph;

  const UsageLedger after = gateway.usage();
  report.gateway_calls = after.attempts - before.attempts;
  report.prompt_tokens = after.prompt_tokens - before.prompt_tokens;
  report.completion_tokens = after.completion_tokens - before.completion_tokens;
  return report;
}

}  // namespace repodoc
