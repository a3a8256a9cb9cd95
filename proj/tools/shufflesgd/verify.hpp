#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace shufflesgd::cli {

enum class Suite { kFast, kFull };

Suite parse_suite(const std::string& text);

struct CriterionResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::vector<CriterionResult> results;

  bool passed() const noexcept;
};

// Runs every invariant and acceptance check at the suite's scale and writes
// their outputs (CSV, SVG, summary.txt) under `dir`. Output bytes depend only
// on (suite, seed).
SuiteResult run_suite(Suite suite, std::uint64_t seed, const std::filesystem::path& dir,
                      unsigned workers);

// Byte-for-byte comparison of two output trees. Differences are appended to
// `diffs` as relative paths.
bool trees_identical(const std::filesystem::path& a, const std::filesystem::path& b,
                     std::vector<std::string>& diffs);

}  // namespace shufflesgd::cli
