#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "shufflesgd/objectives.hpp"
#include "shufflesgd/permutation.hpp"

// Monte Carlo checks of the within-epoch stability properties of shuffled
// SGD: swap coupling, function-value gap, drift from the epoch start, and
// sign of the mean iterate on the piecewise construction.
namespace shufflesgd::coupling {

struct CheckRow {
  std::string check;
  std::size_t i = 0;  // step within the epoch
  std::size_t j = 0;  // epoch, 1-based
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct CheckReport {
  std::string check;
  std::vector<CheckRow> rows;

  bool passed() const noexcept;
  std::size_t violations() const noexcept;
};

// Gaps |x'_i - x''_i|, i = 1..n, between one epoch run with `order` and one
// run with swap(order, a, b), both from `init` (origin when empty).
std::vector<double> coupled_gaps(const Family& family, const Permutation& order, std::size_t a,
                                 std::size_t b, double alpha, const Point& init = {});

struct SwapDistanceReport {
  CheckReport report;  // per step: max gap over trials against 2 G alpha
  double max_gap = 0.0;
  double bound = 0.0;
  std::size_t trials = 0;
  std::optional<std::pair<Permutation, Permutation>> first_offender;
};

// Each trial draws an order, then positions a, b uniformly from 1..n (a = b is
// allowed), and runs both epochs from the origin. A gap above
// 2 G alpha (1 + 1e-12) at any step is a violation. Requires alpha <= 2/L.
SwapDistanceReport swap_distance_check(const Family& family, double alpha, std::size_t trials,
                                       RngStream& stream);

// Epoch start x_0^j is reached by warmup_epochs shuffled epochs from init,
// then frozen; every repeat replays epoch j = warmup_epochs + 1 with a fresh
// order drawn from the same stream.
struct EpochProbe {
  double alpha = 0.0;
  std::size_t warmup_epochs = 0;
  Point init;  // origin when empty
};

// For each step i in 1..n, the mean of F(x) - f_{sigma(i)}(x) at the iterate
// step i is applied to. Passes when |mean| <= 2 alpha G^2 + 4 stderr.
// Requires alpha <= 2/L.
CheckReport gradient_gap_check(const Family& family, const EpochProbe& probe,
                               std::size_t repeats, RngStream& stream);

// For each i in 0..n, the mean of |x_i - x_0|^2 against
// 5 i alpha^2 G^2 + 2 i alpha (F(x_0) - F(x*)) + 4 stderr. Requires alpha <= 2/L.
CheckReport epoch_drift_check(const Family& family, const EpochProbe& probe,
                              std::size_t repeats, RngStream& stream);

// Runs `epochs` epochs from 0 per repeat and checks every mean iterate
// E[x_i^j] >= -4 stderr. When the family's left curvature is 1 the mean is
// zero by symmetry and the check is two-sided: |E[x_i^j]| <= 4 stderr.
// Requires alpha <= 1/L.
CheckReport posexp_check(const PiecewiseFamily& family, double alpha, std::size_t epochs,
                         std::size_t repeats, RngStream& stream);

// Columns: check_name,i,j,estimate,stderr,bound,pass
void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const CheckReport& report);

}  // namespace shufflesgd::coupling
