#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shufflesgd/engine.hpp"
#include "shufflesgd/objectives.hpp"

namespace shufflesgd::harness {

enum class SweepVar { kN, kK };

std::string sweep_var_name(SweepVar var);
SweepVar parse_sweep_var(const std::string& text);

struct SweepConfig {
  FamilySpec family = PiecewiseRecipe{};
  SweepVar var = SweepVar::kK;
  std::size_t fixed = 256;             // the variable that is not swept
  std::vector<std::size_t> grid{32, 64, 128, 256};
  StepSizeRegime regime = StepSizeRegime::c_log_t_over_t(4.0);
  std::size_t repeats = 400;
  std::uint64_t base_seed = 0;
  Point init;                          // origin when empty
  unsigned workers = 0;                // 0 = hardware concurrency
};

struct SweepPoint {
  std::size_t n = 0;
  std::size_t k_epochs = 0;
  std::size_t horizon = 0;  // T
  double alpha = 0.0;
  std::size_t repeats = 0;
  double mean_sq_error = 0.0;
  double stderr_ = 0.0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepResult {
  SweepVar var = SweepVar::kK;
  std::vector<SweepPoint> points;

  // (swept value, mean error) pairs for fit_rate.
  std::vector<std::pair<double, double>> series() const;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

struct PlannedRun {
  std::size_t grid_index;
  std::size_t n;
  std::size_t k_epochs;
  double alpha;
  std::size_t repeats;
};

// What run_sweep would execute, without running it.
std::vector<PlannedRun> plan(const SweepConfig& config);

// Grid point g, repeat r runs run_sgdo with lineage (base_seed, g, r). Final
// errors are merged by index, so the result does not depend on `workers`.
// A diverged run aborts the sweep with a DivergenceError naming the point.
SweepResult run_sweep(const SweepConfig& config);

// Final squared errors of `repeats` independent runs of one configuration,
// with lineages (base_seed, sweep_index, r).
std::vector<double> run_repeats(const Family& family, const RunConfig& base,
                                std::size_t repeats, std::uint64_t base_seed,
                                std::uint64_t sweep_index, unsigned workers);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Least squares of ln(error) on ln(value). Needs >= 2 points, all positive.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

// Header: sweep_var,n,K,T,alpha,repeats,mean_sq_error,stderr,min,max
void write_csv(std::ostream& out, const SweepResult& result);
SweepResult read_csv(std::istream& in);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

struct Curve {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Log-log scatter of mean error (with +-stderr bars) against the swept
// variable, plus optional overlay curves. Self-contained SVG.
std::string render_svg(const SweepResult& result, std::span<const Curve> curves,
                       const std::string& title);
void emit_svg(const SweepResult& result, std::span<const Curve> curves,
              const std::filesystem::path& path, const std::string& title = "");

// Runs body(index) for index in [0, count) on up to `workers` threads.
// Exceptions are rethrown on the caller; the lowest failing index wins.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

unsigned resolve_workers(unsigned requested);

}  // namespace shufflesgd::harness
