#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

// Closed-form convergence bounds for shuffled SGD and their preconditions.
// Every log is natural; T = nK.
namespace shufflesgd::bounds {

struct Precondition {
  std::string name;      // e.g. "K >= 128 (L/mu)^2 ln T"
  double required = 0.0;
  double actual = 0.0;
  bool satisfied = false;
};

struct BoundReport {
  std::string name;
  double bound_value = 0.0;
  std::vector<Precondition> preconditions;

  bool applicable() const noexcept;
};

// Upper bound on E|x_T - x*|^2 for quadratic F run with step 4 l ln(T)/(T mu):
//   D^2 / T^l + 2^13 G^2 L^2 ln^3 T / (T^2 mu^4) + 2^15 G^2 L^2 n^2 ln^4 T / (T^3 mu^4)
// Preconditions: l <= 2 and K >= 128 (L/mu)^2 ln T.
BoundReport upper_bound_quadratic(std::size_t n, std::size_t k_epochs, double mu, double l_smooth,
                                  double g_bound, double d_bound, double l);

// Lower bound 2^-56 G^2 n / T^2 for the piecewise construction. Preconditions:
// L >= 2^17, K >= 2^14 L, n >= 256, n % 4 == 0 (the last two as separate rows).
BoundReport lower_bound_general(std::size_t n, std::size_t k_epochs, double g_bound,
                                double l_smooth);

struct AlphaWindow {
  double lo = 0.0;  // 1/(nK)
  double hi = 0.0;  // 2^-14/(nL)

  bool empty() const noexcept { return lo > hi; }
  bool contains(double alpha) const noexcept { return !empty() && alpha >= lo && alpha <= hi; }
};

AlphaWindow alpha_window(std::size_t n, std::size_t k_epochs, double l_smooth);

// Reference curves c * rate(n, K) for plots.
enum class ReferenceRate {
  kNOverT2,            // n / T^2
  kN2OverT3,           // n^2 / T^3
  kN3OverT3,           // n^3 / T^3
  kInvT2PlusN2OverT3,  // 1/T^2 + n^2/T^3
};

double reference_rate(ReferenceRate rate, double c, std::size_t n, std::size_t k_epochs);
std::string reference_rate_name(ReferenceRate rate);
ReferenceRate parse_reference_rate(const std::string& text);

// Aligned human-readable listing.
void write_text(std::ostream& out, const BoundReport& report);
// Columns: bound,value,precondition,required,actual,satisfied (one row per
// precondition; a bound with none gets one row with empty fields).
void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const BoundReport& report);

}  // namespace shufflesgd::bounds
