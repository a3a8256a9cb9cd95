// Acceptance suite: runs `verify --suite full` in-process (which executes the
// whole check suite twice and diffs the output trees) and prints one line per
// criterion. Exit status is 0 only if all ten criteria pass.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "shufflesgd_acceptance";
  const std::string seed = argc > 2 ? argv[2] : "0";
  fs::remove_all(dir);

  std::ostringstream out, err;
  const int code = shufflesgd::cli::run_cli(
      {"verify", "--suite", "full", "--seed", seed, "--out", dir.string()}, out, err);

  std::map<std::string, std::string> lines;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    const auto sp = line.find(' ');
    if (sp == std::string::npos) continue;
    const auto id_end = line.find(' ', sp + 1);
    lines[line.substr(sp + 1, id_end - sp - 1)] = line;
  }

  // Independent re-check of the byte-for-byte comparison.
  std::vector<std::string> diffs;
  const bool same = shufflesgd::cli::trees_identical(dir / "run1", dir / "run2", diffs);

  bool all = code == 0 && same;
  for (int c = 1; c <= 10; ++c) {
    const std::string id = "C" + std::to_string(c);
    auto it = lines.find(id);
    if (it == lines.end()) {
      std::cout << "FAIL " << id << ": no result reported\n";
      all = false;
      continue;
    }
    std::cout << it->second << '\n';
    all = all && it->second.rfind("PASS ", 0) == 0;
  }
  if (!same) std::cout << "FAIL C10 cross-check: " << diffs.size() << " differing files\n";
  if (!err.str().empty()) std::cerr << err.str();
  std::cout << (all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << '\n';
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
