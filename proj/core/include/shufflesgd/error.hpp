#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shufflesgd {

// Caller broke a documented precondition (bad index, odd n, bad config...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterate became non-finite. Carries the 1-based (epoch, step) location.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, std::size_t step)
      : std::runtime_error("iterate diverged at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(step)),
        epoch_(epoch),
        step_(step) {}
  DivergenceError(std::size_t epoch, std::size_t step, const std::string& context)
      : std::runtime_error(context + ": iterate diverged at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(step)),
        epoch_(epoch),
        step_(step) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

}  // namespace shufflesgd
