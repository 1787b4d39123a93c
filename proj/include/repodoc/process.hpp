#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace repodoc {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs `argv` (PATH lookup) in `cwd`, feeding `input` on stdin and capturing
/// stdout/stderr. Throws Error(Io) if the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          std::string_view input = {});

}  // namespace repodoc
