#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace shufflesgd {

// "%.17g": enough digits for an exact round trip of any double.
std::string format_double(double v);

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;   // unbiased (count - 1) divisor; 0 for count < 2
  double stderr_ = 0.0;  // stddev / sqrt(count)
  double min = 0.0;
  double max = 0.0;
};

// Two compensated passes in index order, so the result depends only on the
// sequence of values.
SampleStats summarize(std::span<const double> values);

// Streaming mean/variance (Welford), accumulated in call order.
class RunningMoments {
 public:
  void add(double v) noexcept;
  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;
  double stderr_of_mean() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace shufflesgd
