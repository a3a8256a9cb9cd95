#include "shufflesgd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace shufflesgd {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

SampleStats summarize(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (values.empty()) return s;
  CompensatedSum sum;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum.add(v);
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum.value() / static_cast<double>(s.count);
  // Rounding can push the mean a hair outside [min, max] for constant data.
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (s.count > 1) {
    CompensatedSum sq;
    for (double v : values) {
      const double d = v - s.mean;
      sq.add(d * d);
    }
    s.stddev = std::sqrt(sq.value() / static_cast<double>(s.count - 1));
    s.stderr_ = s.stddev / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

void RunningMoments::add(double v) noexcept {
  ++count_;
  const double delta = v - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (v - mean_);
}

double RunningMoments::variance() const noexcept {
  return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
}

double RunningMoments::stderr_of_mean() const noexcept {
  return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
}

}  // namespace shufflesgd
