#include <filesystem>
#include <iostream>

#include "repodoc/cli.hpp"

int main(int argc, char** argv) {
  std::error_code ec;
  std::filesystem::path self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) self = std::filesystem::absolute(argv[0]);
  return repodoc::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr, self);
}
