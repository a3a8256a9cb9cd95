#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shufflesgd/engine.hpp"
#include "shufflesgd/objectives.hpp"

namespace shufflesgd::cli {

// Overlay curve for sweep plots: c * rate(n, K); c unset means "pass through
// the first data point".
struct CurveRequest {
  std::string rate = "n/T^2";
  std::optional<double> c;
};

// Settings shared by all subcommands. Every field is optional so that a
// subcommand can tell "not given" from a value and apply its own default.
// Precedence: command-line flag > config file > environment > default.
struct CliConfig {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<unsigned> workers;
  bool dry_run = false;

  std::optional<std::string> family_kind;  // piecewise | product2d | quadratic
  std::optional<double> l_smooth;          // L
  std::optional<double> g_bound;           // G
  std::optional<double> mu;
  std::optional<double> d_bound;           // D
  std::optional<std::vector<std::vector<double>>> hessian;
  std::optional<std::vector<double>> base_linear;
  std::optional<double> base_const;
  std::optional<std::uint64_t> offsets_seed;

  std::optional<std::size_t> n;
  std::optional<std::size_t> k_epochs;
  std::optional<std::string> regime;
  std::optional<double> alpha;
  std::optional<std::vector<double>> init;
  std::optional<std::string> record;    // final | epoch | step
  std::optional<std::string> sampling;  // shuffle | replacement

  std::optional<std::size_t> repeats;
  std::optional<std::string> sweep_var;
  std::optional<std::vector<std::size_t>> grid;
  std::optional<std::vector<CurveRequest>> curves;
  std::optional<std::filesystem::path> replay;

  std::optional<std::string> check;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> warmup;
  std::optional<std::size_t> epochs;

  std::optional<std::size_t> n_max;
  bool pmf = false;

  std::optional<std::string> bound_kind;  // upper | lower | window | all
  std::optional<double> l_exponent;        // l

  std::optional<std::string> suite;  // fast | full
};

// Parses a JSON config document. Unknown keys and wrongly typed values are
// rejected with UsageError.
CliConfig parse_config_json(const std::string& text);
CliConfig load_config_file(const std::filesystem::path& path);

// Fields set in `overrides` replace those in `base`.
CliConfig merge(CliConfig base, const CliConfig& overrides);

// Seed from the config, else SHUFFLE_SGD_SEED, else 0.
std::uint64_t resolve_seed(const CliConfig& cfg);

// Family recipe from the family_* fields (piecewise L=4, G=1 by default).
FamilySpec family_spec(const CliConfig& cfg);
StepSizeRegime regime_or(const CliConfig& cfg, const StepSizeRegime& fallback);
RecordMode record_mode(const CliConfig& cfg);

std::vector<std::string> known_config_keys();

}  // namespace shufflesgd::cli
