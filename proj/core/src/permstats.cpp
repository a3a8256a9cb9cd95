#include "shufflesgd/permstats.hpp"

#include <cstdio>
#include <string>

#include "shufflesgd/error.hpp"
#include "shufflesgd/report.hpp"

namespace shufflesgd::permstats {
namespace {

void check_args(std::size_t n, std::size_t i) {
  if (n % 2 != 0) throw UsageError("partial sums need an even n, got " + std::to_string(n));
  if (i > n) throw UsageError("prefix length " + std::to_string(i) + " exceeds n");
}

// Counts of arrangements with s_i = k, k = -i, -i+2, ..., i, over the
// common denominator C(n, i). Entry m corresponds to k = 2m - i.
struct Counts {
  std::vector<BigInt> by_plus;  // index = number of +1's among the first i
  BigInt denominator;
};

Counts counts(std::size_t n, std::size_t i) {
  check_args(n, i);
  const std::size_t half = n / 2;
  Counts c;
  c.by_plus.resize(i + 1);
  for (std::size_t plus = 0; plus <= i; ++plus) {
    const std::size_t minus = i - plus;
    if (plus <= half && minus <= half) c.by_plus[plus] = binomial(half, plus) * binomial(half, minus);
  }
  c.denominator = binomial(n, i);
  return c;
}

long sum_for(std::size_t plus, std::size_t i) {
  return 2 * static_cast<long>(plus) - static_cast<long>(i);
}

}  // namespace

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    r *= n - k + j;
    r /= j;
  }
  return r;
}

Rational PartialSumDistribution::probability(long k) const {
  auto it = pmf.find(k);
  return it == pmf.end() ? Rational(0) : it->second;
}

Rational PartialSumDistribution::total() const {
  Rational t = 0;
  for (const auto& [k, p] : pmf) t += p;
  return t;
}

PartialSumDistribution exact_distribution(std::size_t n, std::size_t i) {
  const Counts c = counts(n, i);
  PartialSumDistribution d{n, i, {}};
  for (std::size_t plus = 0; plus <= i; ++plus) {
    if (c.by_plus[plus] != 0) d.pmf[sum_for(plus, i)] = Rational(c.by_plus[plus], c.denominator);
  }
  return d;
}

PartialSumDistribution enumerate_bruteforce(std::size_t n, std::size_t i) {
  check_args(n, i);
  if (n > 16) throw UsageError("brute-force enumeration is limited to n <= 16");
  std::map<long, unsigned long> tally;
  unsigned long total = 0;
  const unsigned half = static_cast<unsigned>(n / 2);
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    if (static_cast<unsigned>(__builtin_popcountl(mask)) != half) continue;
    long s = 0;
    for (std::size_t p = 0; p < i; ++p) s += (mask >> p) & 1UL ? 1 : -1;
    ++tally[s];
    ++total;
  }
  PartialSumDistribution d{n, i, {}};
  for (const auto& [k, count] : tally) d.pmf[k] = Rational(BigInt(count), BigInt(total));
  return d;
}

Rational expected_abs(std::size_t n, std::size_t i) {
  const Counts c = counts(n, i);
  BigInt num = 0;
  for (std::size_t plus = 0; plus <= i; ++plus) {
    const long k = sum_for(plus, i);
    num += c.by_plus[plus] * static_cast<unsigned long>(k < 0 ? -k : k);
  }
  return Rational(num, c.denominator);
}

Rational expected_square(std::size_t n, std::size_t i) {
  const Counts c = counts(n, i);
  BigInt num = 0;
  for (std::size_t plus = 0; plus <= i; ++plus) {
    const long k = sum_for(plus, i);
    num += c.by_plus[plus] * static_cast<unsigned long>(k * k);
  }
  return Rational(num, c.denominator);
}

Rational prob_negative(std::size_t n, std::size_t i) {
  const Counts c = counts(n, i);
  BigInt num = 0;
  for (std::size_t plus = 0; plus <= i; ++plus) {
    if (sum_for(plus, i) < 0) num += c.by_plus[plus];
  }
  return Rational(num, c.denominator);
}

Rational prob_positive(std::size_t n, std::size_t i) {
  const Counts c = counts(n, i);
  BigInt num = 0;
  for (std::size_t plus = 0; plus <= i; ++plus) {
    if (sum_for(plus, i) > 0) num += c.by_plus[plus];
  }
  return Rational(num, c.denominator);
}

Rational prob_zero(std::size_t n, std::size_t i) {
  if (i % 2 != 0) {
    check_args(n, i);
    return 0;
  }
  const Counts c = counts(n, i);
  return Rational(c.by_plus[i / 2], c.denominator);
}

Rational prob_zero_by_positions(std::size_t n, std::size_t m) {
  check_args(n, m);
  if (m % 2 != 0) return 0;
  return Rational(binomial(m, m / 2) * binomial(n - m, (n - m) / 2), binomial(n, n / 2));
}

Lemma13Row lemma13_row(std::size_t n, std::size_t i) {
  const Counts c = counts(n, i);
  BigInt abs_num = 0;
  BigInt sq_num = 0;
  BigInt neg = 0;
  BigInt pos = 0;
  BigInt zero = 0;
  for (std::size_t plus = 0; plus <= i; ++plus) {
    const long k = sum_for(plus, i);
    const auto& w = c.by_plus[plus];
    abs_num += w * static_cast<unsigned long>(k < 0 ? -k : k);
    sq_num += w * static_cast<unsigned long>(k * k);
    if (k < 0) neg += w;
    if (k > 0) pos += w;
    if (k == 0) zero += w;
  }
  const BigInt& den = c.denominator;
  const BigInt den2 = den * den;

  Lemma13Row row;
  row.n = n;
  row.i = i;
  row.e_abs = Rational(abs_num, den);
  row.p_zero = Rational(zero, den);
  row.p_neg = Rational(neg, den);
  row.p_pos = Rational(pos, den);
  // E|s| = abs_num/den, so (32 E|s|)^2 >= i  <=>  1024 abs_num^2 >= i den^2.
  row.lower_bound_ok = 1024 * abs_num * abs_num >= i * den2;
  row.upper_bound_ok = abs_num * abs_num <= i * den2;
  row.second_moment_ok = sq_num <= i * den;
  row.tails_in_range = 4 * i >= n && 2 * i <= n;
  if (row.tails_in_range) row.tails_ok = 4 * neg >= den && 4 * pos >= den;
  row.asserted = n >= 256 && n % 4 == 0 && 2 * i <= n;
  return row;
}

Lemma13Report check_lemma13(std::size_t n_max) {
  if (n_max < 256) throw UsageError("check_lemma13 needs n_max >= 256");
  Lemma13Report rep;
  for (std::size_t n = 8; n <= n_max; n += 4) {
    for (std::size_t i = 1; 2 * i <= n; ++i) {
      Lemma13Row row = lemma13_row(n, i);
      if (row.asserted) {
        ++rep.asserted_checks;
        if (!row.ok()) ++rep.violations;
      } else if (!row.ok()) {
        ++rep.informational_failures;
      }
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

void write_csv_header(std::ostream& out) {
  out << "n,i,E_abs,P_zero,P_neg,lower_bound_ok,upper_bound_ok\n";
}

void write_csv_row(std::ostream& out, const Lemma13Row& row) {
  out << row.n << ',' << row.i << ',' << format_double(to_double(row.e_abs)) << ','
      << format_double(to_double(row.p_zero)) << ',' << format_double(to_double(row.p_neg))
      << ',' << (row.lower_bound_ok ? "true" : "false") << ','
      << (row.upper_bound_ok ? "true" : "false") << '\n';
}

}  // namespace shufflesgd::permstats
