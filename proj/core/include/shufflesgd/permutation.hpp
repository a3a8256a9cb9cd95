#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace shufflesgd {

// Where a stream came from. Every stochastic experiment derives one stream
// per (sweep_index, repeat_index) pair from a single user-facing seed.
struct Lineage {
  std::uint64_t base_seed = 0;
  std::uint64_t sweep_index = 0;
  std::uint64_t repeat_index = 0;

  friend bool operator==(const Lineage&, const Lineage&) = default;
};

// One splitmix64 output from state `x`:
//   z = x + 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** generator.
//
// Satisfies UniformRandomBitGenerator, but experiment code should only use
// next(), bounded() and uniform01(): their outputs are specified bit-exactly
// so that other implementations can reproduce every permutation.
class RngStream {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  explicit RngStream(const State& state, Lineage lineage = {});

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    ++draws_;
    return result;
  }

  // Uniform integer in [0, bound). Rejects raw values >= floor(2^64/bound)*bound
  // and returns value % bound, so the result is exactly uniform.
  std::uint64_t bounded(std::uint64_t bound);

  // (next() >> 11) * 2^-53, uniform on [0, 1).
  double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  const State& state() const noexcept { return s_; }
  const Lineage& lineage() const noexcept { return lineage_; }
  // Raw 64-bit words consumed so far.
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  State s_;
  Lineage lineage_;
  std::uint64_t draws_ = 0;
};

// Stream for one run:
//   h = mix(base_seed); h = mix(h ^ sweep_index); h = mix(h ^ repeat_index)
// with mix = splitmix64_mix. The xoshiro state is the next four outputs of a
// splitmix64 generator whose state starts at h.
RngStream derive_stream(std::uint64_t base_seed, std::uint64_t sweep_index,
                        std::uint64_t repeat_index);
inline RngStream derive_stream(const Lineage& l) {
  return derive_stream(l.base_seed, l.sweep_index, l.repeat_index);
}

// A bijection on {1..n}. Positions and values are both 1-based: perm(i) is
// the component applied at the i-th step of an epoch.
class Permutation {
 public:
  using value_type = std::uint32_t;

  Permutation() = default;
  // Throws UsageError unless `order` is a permutation of 1..order.size().
  explicit Permutation(std::vector<value_type> order);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return order_.size(); }
  // 1-based position, unchecked.
  value_type operator()(std::size_t position) const noexcept {
    return order_[position - 1];
  }
  value_type at(std::size_t position) const;
  std::span<const value_type> values() const noexcept { return order_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  friend void shuffle_into(RngStream& stream, Permutation& perm);
  std::vector<value_type> order_;
};

// Uniform random permutation of size n >= 1: start from the identity and, for
// i = n down to 2, exchange entry i with entry bounded(i)+1.
Permutation shuffle(RngStream& stream, std::size_t n);
// Same draw as shuffle(stream, perm.size()), reusing perm's storage.
void shuffle_into(RngStream& stream, Permutation& perm);

// +1 for "first kind" components (index <= n/2), -1 otherwise.
using SignSequence = std::vector<int>;

// Throws UsageError if n is odd or does not match perm.size().
SignSequence sign_labels(const Permutation& perm, std::size_t n);

// Copy of perm with positions a and b (1-based) exchanged.
Permutation swap(const Permutation& perm, std::size_t a, std::size_t b);

}  // namespace shufflesgd
