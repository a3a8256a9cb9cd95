#include "shufflesgd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "shufflesgd/error.hpp"
#include "shufflesgd/report.hpp"

namespace shufflesgd::bounds {
namespace {

void require_positive(std::size_t n, std::size_t k_epochs) {
  if (n < 1 || k_epochs < 1) throw UsageError("bounds need n >= 1 and K >= 1");
}

double horizon(std::size_t n, std::size_t k_epochs) {
  return static_cast<double>(n) * static_cast<double>(k_epochs);
}

}  // namespace

bool BoundReport::applicable() const noexcept {
  return std::all_of(preconditions.begin(), preconditions.end(),
                     [](const Precondition& p) { return p.satisfied; });
}

BoundReport upper_bound_quadratic(std::size_t n, std::size_t k_epochs, double mu, double l_smooth,
                                  double g_bound, double d_bound, double l) {
  require_positive(n, k_epochs);
  if (!(mu > 0.0) || !(l_smooth > 0.0) || !(g_bound > 0.0) || !(d_bound > 0.0)) {
    throw UsageError("upper bound needs positive mu, L, G, D");
  }
  const double t = horizon(n, k_epochs);
  const double lt = std::log(t);
  const double nn = static_cast<double>(n);
  const double g2l2 = g_bound * g_bound * l_smooth * l_smooth;
  const double mu4 = std::pow(mu, 4);

  BoundReport r;
  r.name = "upper_bound_quadratic";
  r.bound_value = d_bound * d_bound / std::pow(t, l) +
                  std::ldexp(1.0, 13) * g2l2 * lt * lt * lt / (t * t * mu4) +
                  std::ldexp(1.0, 15) * g2l2 * nn * nn * lt * lt * lt * lt / (t * t * t * mu4);
  r.preconditions.push_back({"l <= 2", 2.0, l, l <= 2.0});
  const double k_min = 128.0 * (l_smooth / mu) * (l_smooth / mu) * lt;
  r.preconditions.push_back(
      {"K >= 128 (L/mu)^2 ln T", k_min, static_cast<double>(k_epochs),
       static_cast<double>(k_epochs) >= k_min});
  return r;
}

BoundReport lower_bound_general(std::size_t n, std::size_t k_epochs, double g_bound,
                                double l_smooth) {
  require_positive(n, k_epochs);
  if (!(g_bound > 0.0) || !(l_smooth > 0.0)) throw UsageError("lower bound needs positive G, L");
  const double t = horizon(n, k_epochs);
  const double k = static_cast<double>(k_epochs);

  BoundReport r;
  r.name = "lower_bound_general";
  r.bound_value = std::ldexp(g_bound * g_bound * static_cast<double>(n), -56) / (t * t);
  r.preconditions.push_back({"L >= 2^17", std::ldexp(1.0, 17), l_smooth,
                             l_smooth >= std::ldexp(1.0, 17)});
  r.preconditions.push_back({"K >= 2^14 L", std::ldexp(l_smooth, 14), k,
                             k >= std::ldexp(l_smooth, 14)});
  r.preconditions.push_back({"n >= 256", 256.0, static_cast<double>(n), n >= 256});
  r.preconditions.push_back({"n mod 4 == 0", 0.0, static_cast<double>(n % 4), n % 4 == 0});
  return r;
}

AlphaWindow alpha_window(std::size_t n, std::size_t k_epochs, double l_smooth) {
  require_positive(n, k_epochs);
  if (!(l_smooth > 0.0)) throw UsageError("alpha window needs L > 0");
  const double nn = static_cast<double>(n);
  return {1.0 / horizon(n, k_epochs), std::ldexp(1.0, -14) / (nn * l_smooth)};
}

double reference_rate(ReferenceRate rate, double c, std::size_t n, std::size_t k_epochs) {
  require_positive(n, k_epochs);
  const double t = horizon(n, k_epochs);
  const double nn = static_cast<double>(n);
  switch (rate) {
    case ReferenceRate::kNOverT2: return c * nn / (t * t);
    case ReferenceRate::kN2OverT3: return c * nn * nn / (t * t * t);
    case ReferenceRate::kN3OverT3: return c * nn * nn * nn / (t * t * t);
    case ReferenceRate::kInvT2PlusN2OverT3: return c * (1.0 / (t * t) + nn * nn / (t * t * t));
  }
  return 0.0;
}

std::string reference_rate_name(ReferenceRate rate) {
  switch (rate) {
    case ReferenceRate::kNOverT2: return "n/T^2";
    case ReferenceRate::kN2OverT3: return "n^2/T^3";
    case ReferenceRate::kN3OverT3: return "n^3/T^3";
    case ReferenceRate::kInvT2PlusN2OverT3: return "1/T^2+n^2/T^3";
  }
  return "?";
}

ReferenceRate parse_reference_rate(const std::string& text) {
  for (auto r : {ReferenceRate::kNOverT2, ReferenceRate::kN2OverT3, ReferenceRate::kN3OverT3,
                 ReferenceRate::kInvT2PlusN2OverT3}) {
    if (text == reference_rate_name(r)) return r;
  }
  throw UsageError("unknown reference rate '" + text + "'");
}

void write_text(std::ostream& out, const BoundReport& report) {
  out << report.name << '\n';
  out << "  value      " << format_double(report.bound_value) << '\n';
  out << "  applicable " << (report.applicable() ? "yes" : "no") << '\n';
  std::size_t width = 0;
  for (const auto& p : report.preconditions) width = std::max(width, p.name.size());
  for (const auto& p : report.preconditions) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << p.name << "  required "
        << std::setw(24) << format_double(p.required) << " actual " << std::setw(24)
        << format_double(p.actual) << ' ' << (p.satisfied ? "ok" : "FAILED") << '\n';
  }
  out << std::right;
}

void write_csv_header(std::ostream& out) {
  out << "bound,value,precondition,required,actual,satisfied\n";
}

void write_csv(std::ostream& out, const BoundReport& report) {
  if (report.preconditions.empty()) {
    out << report.name << ',' << format_double(report.bound_value) << ",,,,\n";
    return;
  }
  for (const auto& p : report.preconditions) {
    out << report.name << ',' << format_double(report.bound_value) << ",\"" << p.name << "\","
        << format_double(p.required) << ',' << format_double(p.actual) << ','
        << (p.satisfied ? "true" : "false") << '\n';
  }
}

}  // namespace shufflesgd::bounds
