#include "shufflesgd/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "shufflesgd/engine.hpp"
#include "shufflesgd/error.hpp"
#include "shufflesgd/report.hpp"

namespace shufflesgd::coupling {
namespace {

constexpr double kSigmas = 4.0;

Point origin_or(const Family& family, const Point& init) {
  Point x = init.empty() ? Point(family.dimension(), 0.0) : init;
  if (x.size() != family.dimension()) throw UsageError("init has the wrong dimension");
  return x;
}

void require_step(double alpha, double limit, const char* what) {
  if (!(alpha >= 0.0) || alpha > limit) {
    throw UsageError(std::string("step size must satisfy 0 <= alpha <= ") + what);
  }
}

// One epoch; calls visit(i, x_before_step_i) for i = 1..n and returns the
// final iterate in x.
template <class Visit>
void epoch_with_prestep(const Family& family, const Permutation& order, double alpha, Point& x,
                        Visit&& visit) {
  Point scratch(x.size());
  family.visit([&](const auto& f) {
    const std::size_t d = x.size();
    for (std::size_t i = 1; i <= order.size(); ++i) {
      visit(i, f, std::span<const double>(x));
      f.component_grad(order(i), x, scratch);
      for (std::size_t k = 0; k < d; ++k) x[k] = x[k] - alpha * scratch[k];
      if (!detail::all_finite(x)) throw DivergenceError(1, i);
    }
  });
}

Point warm_start(const Family& family, const EpochProbe& probe, RngStream& stream) {
  Point x = origin_or(family, probe.init);
  Permutation order = Permutation::identity(family.size());
  Point scratch(x.size());
  for (std::size_t j = 1; j <= probe.warmup_epochs; ++j) {
    shuffle_into(stream, order);
    family.visit([&](const auto& f) {
      detail::run_epoch(f, order, probe.alpha, std::span<double>(x), scratch, j,
                        [](std::size_t, std::span<const double>) {});
    });
  }
  return x;
}

}  // namespace

bool CheckReport::passed() const noexcept { return violations() == 0; }

std::size_t CheckReport::violations() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; }));
}

std::vector<double> coupled_gaps(const Family& family, const Permutation& order, std::size_t a,
                                 std::size_t b, double alpha, const Point& init) {
  if (order.size() != family.size()) throw UsageError("order size does not match the family");
  const Permutation other = swap(order, a, b);
  Point x1 = origin_or(family, init);
  Point x2 = x1;
  Point s1(x1.size());
  Point s2(x1.size());
  std::vector<double> gaps(order.size());
  family.visit([&](const auto& f) {
    const std::size_t d = x1.size();
    for (std::size_t i = 1; i <= order.size(); ++i) {
      f.component_grad(order(i), x1, s1);
      f.component_grad(other(i), x2, s2);
      for (std::size_t k = 0; k < d; ++k) {
        x1[k] = x1[k] - alpha * s1[k];
        x2[k] = x2[k] - alpha * s2[k];
      }
      if (!detail::all_finite(x1) || !detail::all_finite(x2)) throw DivergenceError(1, i);
      gaps[i - 1] = std::sqrt(squared_distance(x1, x2));
    }
  });
  return gaps;
}

SwapDistanceReport swap_distance_check(const Family& family, double alpha, std::size_t trials,
                                       RngStream& stream) {
  const auto c = family.constants();
  require_step(alpha, 2.0 / c.l_smooth, "2/L");
  const std::size_t n = family.size();

  SwapDistanceReport out;
  out.bound = 2.0 * c.g_bound * alpha;
  out.trials = trials;
  const double limit = out.bound * (1.0 + 1e-12);
  std::vector<double> max_gap(n, 0.0);
  std::vector<bool> step_ok(n, true);

  Permutation order = Permutation::identity(n);
  for (std::size_t t = 0; t < trials; ++t) {
    shuffle_into(stream, order);
    const std::size_t a = static_cast<std::size_t>(stream.bounded(n)) + 1;
    const std::size_t b = static_cast<std::size_t>(stream.bounded(n)) + 1;
    const auto gaps = coupled_gaps(family, order, a, b, alpha);
    for (std::size_t i = 0; i < n; ++i) {
      max_gap[i] = std::max(max_gap[i], gaps[i]);
      if (gaps[i] > limit) {
        step_ok[i] = false;
        if (!out.first_offender) out.first_offender.emplace(order, swap(order, a, b));
      }
    }
  }

  out.report.check = "swap_distance";
  for (std::size_t i = 0; i < n; ++i) {
    out.max_gap = std::max(out.max_gap, max_gap[i]);
    out.report.rows.push_back({"swap_distance", i + 1, 1, max_gap[i], 0.0, out.bound, step_ok[i]});
  }
  return out;
}

CheckReport gradient_gap_check(const Family& family, const EpochProbe& probe,
                               std::size_t repeats, RngStream& stream) {
  const auto c = family.constants();
  require_step(probe.alpha, 2.0 / c.l_smooth, "2/L");
  const std::size_t n = family.size();
  const Point start = warm_start(family, probe, stream);

  std::vector<RunningMoments> moments(n);
  Permutation order = Permutation::identity(n);
  for (std::size_t r = 0; r < repeats; ++r) {
    shuffle_into(stream, order);
    Point x = start;
    epoch_with_prestep(family, order, probe.alpha, x,
                       [&](std::size_t i, const auto& f, std::span<const double> xi) {
                         moments[i - 1].add(f.value(xi) - f.component_value(order(i), xi));
                       });
  }

  CheckReport rep;
  rep.check = "gradient_gap";
  const double bound = 2.0 * probe.alpha * c.g_bound * c.g_bound;
  for (std::size_t i = 0; i < n; ++i) {
    const double est = moments[i].mean();
    const double se = moments[i].stderr_of_mean();
    rep.rows.push_back({"gradient_gap", i + 1, probe.warmup_epochs + 1, est, se, bound,
                        std::abs(est) <= bound + kSigmas * se});
  }
  return rep;
}

CheckReport epoch_drift_check(const Family& family, const EpochProbe& probe,
                              std::size_t repeats, RngStream& stream) {
  const auto c = family.constants();
  require_step(probe.alpha, 2.0 / c.l_smooth, "2/L");
  const std::size_t n = family.size();
  const Point start = warm_start(family, probe, stream);
  const double excess = family.eval(start) - family.eval(family.minimizer());

  std::vector<RunningMoments> moments(n + 1);
  Permutation order = Permutation::identity(n);
  Point scratch(start.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    shuffle_into(stream, order);
    Point x = start;
    moments[0].add(0.0);
    family.visit([&](const auto& f) {
      detail::run_epoch(f, order, probe.alpha, std::span<double>(x), scratch,
                        probe.warmup_epochs + 1, [&](std::size_t i, std::span<const double> xi) {
                          moments[i].add(squared_distance(xi, start));
                        });
    });
  }

  CheckReport rep;
  rep.check = "epoch_drift";
  const double a = probe.alpha;
  const double g2 = c.g_bound * c.g_bound;
  for (std::size_t i = 0; i <= n; ++i) {
    const double di = static_cast<double>(i);
    const double bound = 5.0 * di * a * a * g2 + 2.0 * di * a * excess;
    const double est = moments[i].mean();
    const double se = moments[i].stderr_of_mean();
    rep.rows.push_back({"epoch_drift", i, probe.warmup_epochs + 1, est, se, bound,
                        est <= bound + kSigmas * se});
  }
  return rep;
}

CheckReport posexp_check(const PiecewiseFamily& family, double alpha, std::size_t epochs,
                         std::size_t repeats, RngStream& stream) {
  require_step(alpha, 1.0 / family.spec().l_left, "1/L");
  const std::size_t n = family.size();
  const bool symmetric = family.spec().l_left == 1.0;

  // Slot 0 is x_0^1; slot (j-1) n + i is x_i^j.
  std::vector<RunningMoments> moments(epochs * n + 1);
  Permutation order = Permutation::identity(n);
  for (std::size_t r = 0; r < repeats; ++r) {
    double x = 0.0;
    moments[0].add(x);
    for (std::size_t j = 1; j <= epochs; ++j) {
      shuffle_into(stream, order);
      const std::size_t base = (j - 1) * n;
      x = detail::run_epoch_scalar(family, order, alpha, x, j,
                                   [&](std::size_t i, double v) { moments[base + i].add(v); });
    }
  }

  CheckReport rep;
  rep.check = symmetric ? "posexp_symmetric" : "posexp";
  auto push = [&](std::size_t i, std::size_t j, const RunningMoments& m) {
    const double est = m.mean();
    const double se = m.stderr_of_mean();
    const bool pass = symmetric ? std::abs(est) <= kSigmas * se : est >= -kSigmas * se;
    rep.rows.push_back({rep.check, i, j, est, se, 0.0, pass});
  };
  push(0, 1, moments[0]);
  for (std::size_t j = 1; j <= epochs; ++j) {
    for (std::size_t i = 1; i <= n; ++i) push(i, j, moments[(j - 1) * n + i]);
  }
  return rep;
}

void write_csv_header(std::ostream& out) {
  out << "check_name,i,j,estimate,stderr,bound,pass\n";
}

void write_csv(std::ostream& out, const CheckReport& report) {
  for (const auto& r : report.rows) {
    out << r.check << ',' << r.i << ',' << r.j << ',' << format_double(r.estimate) << ','
        << format_double(r.stderr_) << ',' << format_double(r.bound) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
}

}  // namespace shufflesgd::coupling
