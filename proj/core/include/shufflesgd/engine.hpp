#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shufflesgd/error.hpp"
#include "shufflesgd/objectives.hpp"
#include "shufflesgd/permutation.hpp"

namespace shufflesgd {

// Constant step-size schedules. T = nK and log is the natural logarithm.
enum class RegimeKind {
  kRecipT,       // 1/T
  kCLogTOverT,   // c ln(T) / T
  kRecipN,       // 1/n
  kTheorem1,     // 4 l ln(T) / (T mu), l <= 2
  kFixed,        // alpha given directly
};

struct StepSizeRegime {
  RegimeKind kind = RegimeKind::kCLogTOverT;
  double param = 4.0;

  static StepSizeRegime recip_t() { return {RegimeKind::kRecipT, 0.0}; }
  static StepSizeRegime c_log_t_over_t(double c) { return {RegimeKind::kCLogTOverT, c}; }
  static StepSizeRegime recip_n() { return {RegimeKind::kRecipN, 0.0}; }
  static StepSizeRegime theorem1(double l) { return {RegimeKind::kTheorem1, l}; }
  static StepSizeRegime fixed(double alpha) { return {RegimeKind::kFixed, alpha}; }

  // "1/T", "4logT/T", "1/n", "theorem1:2", "fixed:0.01". parse() accepts
  // these plus "clog:<c>" and "theorem1" (l = 2).
  std::string label() const;
  static StepSizeRegime parse(const std::string& text);

  friend bool operator==(const StepSizeRegime&, const StepSizeRegime&) = default;
};

// Throws UsageError for n or K < 1, mu <= 0, c <= 0, l > 2 or l <= 0.
double alpha_of(const StepSizeRegime& regime, std::size_t n, std::size_t k_epochs, double mu);

enum class RecordMode { kFinalOnly, kPerEpoch, kPerStep };

struct RunConfig {
  std::size_t n = 0;          // must equal family.size()
  std::size_t k_epochs = 0;   // K = 0 runs no steps
  StepSizeRegime regime;
  Point init;                 // empty means the origin
  RecordMode record = RecordMode::kFinalOnly;
  Lineage lineage;
};

struct TrajectorySample {
  std::size_t epoch;  // j, 1-based
  std::size_t step;   // i in 0..n; step 0 is the epoch's starting point
  Point x;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Point final_iterate;
  double final_sq_error = 0.0;
  double alpha = 0.0;
  std::size_t permutations_drawn = 0;
  std::size_t indices_drawn = 0;
};

// x - alpha * grad f_i(x). Throws DivergenceError(0, 0) on a non-finite result.
Point sgdo_step(const Family& family, std::size_t i, const Point& x, double alpha);

// K epochs, each applying all n components once in the order of a fresh
// permutation drawn from derive_stream(config.lineage).
Trajectory run_sgdo(const Family& family, const RunConfig& config);

// The same loop with the epoch orders supplied; config.k_epochs is ignored
// and orders.size() epochs are run.
Trajectory run_sgdo_with_orders(const Family& family, const RunConfig& config,
                                std::span<const Permutation> orders);

// T = nK steps, each with a component index drawn uniformly from 1..n.
Trajectory run_sgd_with_replacement(const Family& family, const RunConfig& config);

namespace detail {

inline bool all_finite(std::span<const double> x) noexcept {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// One epoch in place. `on_step(i, x)` is called after step i (1-based) with
// the updated iterate. `epoch` is used only for divergence reports.
template <class F, class OnStep>
void run_epoch(const F& family, const Permutation& order, double alpha, std::span<double> x,
               std::span<double> scratch, std::size_t epoch, OnStep&& on_step) {
  const std::size_t n = order.size();
  const std::size_t d = x.size();
  for (std::size_t i = 1; i <= n; ++i) {
    family.component_grad(order(i), x, scratch);
    for (std::size_t k = 0; k < d; ++k) x[k] = x[k] - alpha * scratch[k];
    if (!all_finite(x)) throw DivergenceError(epoch, i);
    on_step(i, std::span<const double>(x));
  }
}

// Scalar specialisation for the 1-D piecewise family.
template <class OnStep>
double run_epoch_scalar(const PiecewiseFamily& family, const Permutation& order, double alpha,
                        double x, std::size_t epoch, OnStep&& on_step) {
  const std::size_t n = order.size();
  for (std::size_t i = 1; i <= n; ++i) {
    x = x - alpha * family.grad(order(i), x);
    if (!std::isfinite(x)) throw DivergenceError(epoch, i);
    on_step(i, x);
  }
  return x;
}

}  // namespace detail

}  // namespace shufflesgd
