#include "shufflesgd/permutation.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "shufflesgd/error.hpp"

namespace shufflesgd {

RngStream::RngStream(const State& state, Lineage lineage) : s_(state), lineage_(lineage) {
  if (std::all_of(s_.begin(), s_.end(), [](std::uint64_t w) { return w == 0; })) {
    throw UsageError("xoshiro256** state must not be all zero");
  }
}

std::uint64_t RngStream::bounded(std::uint64_t bound) {
  if (bound == 0) throw UsageError("bounded(0) is empty");
  // 2^64 mod bound; values >= 2^64 - rem would bias the modulo.
  const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  const std::uint64_t last_ok = std::numeric_limits<std::uint64_t>::max() - rem;
  for (;;) {
    const std::uint64_t v = next();
    if (rem == 0 || v <= last_ok) return v % bound;
  }
}

RngStream derive_stream(std::uint64_t base_seed, std::uint64_t sweep_index,
                        std::uint64_t repeat_index) {
  std::uint64_t h = splitmix64_mix(base_seed);
  h = splitmix64_mix(h ^ sweep_index);
  h = splitmix64_mix(h ^ repeat_index);

  RngStream::State state{};
  std::uint64_t sm = h;
  for (auto& word : state) {
    word = splitmix64_mix(sm);
    sm += 0x9E3779B97F4A7C15ULL;
  }
  return RngStream(state, Lineage{base_seed, sweep_index, repeat_index});
}

Permutation::Permutation(std::vector<value_type> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size() + 1, false);
  for (value_type v : order_) {
    if (v < 1 || v > order_.size() || seen[v]) {
      throw UsageError("not a permutation of 1.." + std::to_string(order_.size()));
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.order_[i] = static_cast<value_type>(i + 1);
  return p;
}

Permutation::value_type Permutation::at(std::size_t position) const {
  if (position < 1 || position > order_.size()) {
    throw UsageError("permutation position " + std::to_string(position) +
                     " outside 1.." + std::to_string(order_.size()));
  }
  return order_[position - 1];
}

void shuffle_into(RngStream& stream, Permutation& perm) {
  auto& a = perm.order_;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<Permutation::value_type>(i + 1);
  for (std::size_t i = n; i >= 2; --i) {
    const std::size_t j = static_cast<std::size_t>(stream.bounded(i));
    std::swap(a[i - 1], a[j]);
  }
}

Permutation shuffle(RngStream& stream, std::size_t n) {
  if (n < 1) throw UsageError("shuffle needs n >= 1");
  Permutation p = Permutation::identity(n);
  shuffle_into(stream, p);
  return p;
}

SignSequence sign_labels(const Permutation& perm, std::size_t n) {
  if (n % 2 != 0) throw UsageError("sign labels need an even n, got " + std::to_string(n));
  if (perm.size() != n) throw UsageError("permutation size does not match n");
  SignSequence signs(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 1; i <= n; ++i) signs[i - 1] = perm(i) <= half ? +1 : -1;
  return signs;
}

Permutation swap(const Permutation& perm, std::size_t a, std::size_t b) {
  std::vector<Permutation::value_type> order(perm.values().begin(), perm.values().end());
  if (a < 1 || a > order.size() || b < 1 || b > order.size()) {
    throw UsageError("swap positions must lie in 1.." + std::to_string(order.size()));
  }
  std::swap(order[a - 1], order[b - 1]);
  return Permutation(std::move(order));
}

}  // namespace shufflesgd
