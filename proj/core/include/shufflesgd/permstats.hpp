#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <map>
#include <ostream>
#include <vector>

// Exact law of the partial sums s_i = sigma_1 + ... + sigma_i of a uniformly
// random arrangement of n/2 (+1)'s and n/2 (-1)'s.
namespace shufflesgd::permstats {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

BigInt binomial(std::size_t n, std::size_t k);

struct PartialSumDistribution {
  std::size_t n = 0;
  std::size_t i = 0;
  std::map<long, Rational> pmf;  // only k with positive mass

  Rational probability(long k) const;
  Rational total() const;
};

// P(s_i = k) = C(n/2, (i+k)/2) C(n/2, (i-k)/2) / C(n, i).
// Throws UsageError for odd n or i > n.
PartialSumDistribution exact_distribution(std::size_t n, std::size_t i);

// Independent oracle: walks all C(n, n/2) placements of the +1's.
// Throws UsageError for n > 16.
PartialSumDistribution enumerate_bruteforce(std::size_t n, std::size_t i);

Rational expected_abs(std::size_t n, std::size_t i);
Rational expected_square(std::size_t n, std::size_t i);
Rational prob_negative(std::size_t n, std::size_t i);
Rational prob_positive(std::size_t n, std::size_t i);
Rational prob_zero(std::size_t n, std::size_t i);

// P(s_m = 0) counted by positions: choose m/2 of the first m slots and
// (n-m)/2 of the remaining slots for the +1's, out of C(n, n/2). Zero for odd m.
Rational prob_zero_by_positions(std::size_t n, std::size_t m);

struct Lemma13Row {
  std::size_t n = 0;
  std::size_t i = 0;
  Rational e_abs;
  Rational p_zero;
  Rational p_neg;
  Rational p_pos;
  bool lower_bound_ok = false;   // sqrt(i)/32 <= E|s_i|
  bool upper_bound_ok = false;   // E|s_i| <= sqrt(i)
  bool second_moment_ok = false; // E[s_i^2] <= i
  bool tails_in_range = false;   // n/4 <= i <= n/2
  bool tails_ok = true;          // P(s_i < 0), P(s_i > 0) >= 1/4 when in range
  bool asserted = false;         // n >= 256, n % 4 == 0, i <= n/2

  bool ok() const noexcept {
    return lower_bound_ok && upper_bound_ok && second_moment_ok && tails_ok;
  }
};

// Bounds compared exactly: (32 E|s_i|)^2 >= i and E|s_i|^2 <= i.
Lemma13Row lemma13_row(std::size_t n, std::size_t i);

struct Lemma13Report {
  std::vector<Lemma13Row> rows;
  std::size_t asserted_checks = 0;
  std::size_t violations = 0;           // among asserted rows
  std::size_t informational_failures = 0;  // among rows outside the lemma's range

  bool passed() const noexcept { return violations == 0; }
};

// Every n multiple of 4 in [8, n_max] and 1 <= i <= n/2. Rows with n >= 256
// are asserted; smaller n are reported only. Throws UsageError if n_max < 256.
Lemma13Report check_lemma13(std::size_t n_max);

// Columns: n,i,E_abs,P_zero,P_neg,lower_bound_ok,upper_bound_ok
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const Lemma13Row& row);

double to_double(const Rational& r);

}  // namespace shufflesgd::permstats
