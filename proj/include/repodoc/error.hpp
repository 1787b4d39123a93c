#pragma once

#include <stdexcept>
#include <string>

namespace repodoc {

/// Broad failure categories. The CLI maps each one onto an exit code.
enum class ErrorKind {
  Usage,         // bad arguments, missing paths, bad config
  Internal,      // broken invariant inside the engine
  Scheduling,    // a dependency was not documented before its dependent
  Provider,      // LLM provider failed after retries
  Auth,          // provider rejected credentials
  OverBudget,    // prompt does not fit any model tier
  Store,         // meta store unreadable / unwritable
  NotGitRepo,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace repodoc
