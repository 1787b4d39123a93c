#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "repodoc/error.hpp"

namespace repodoc {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParseDiagnostics = 2,
  kExitProvider = 3,
  kExitNotGitRepo = 4,
};

int exit_code_for(ErrorKind kind);

/// Entry point behind the `repodoc` binary. `args` excludes the program
/// name; `self` is the executable path written into installed hooks.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::filesystem::path& self = "repodoc");

}  // namespace repodoc
