#include "shufflesgd/engine.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <type_traits>

namespace shufflesgd {
namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw UsageError("cannot parse number '" + text + "' in " + context);
  }
  return v;
}

Point resolve_init(const Family& family, const RunConfig& config) {
  if (config.n != family.size()) {
    throw UsageError("run config n = " + std::to_string(config.n) + " but family has " +
                     std::to_string(family.size()) + " components");
  }
  Point x = config.init.empty() ? Point(family.dimension(), 0.0) : config.init;
  if (x.size() != family.dimension()) throw UsageError("init has the wrong dimension");
  if (!detail::all_finite(x)) throw UsageError("init must be finite");
  return x;
}

double resolve_alpha(const Family& family, const RunConfig& config, std::size_t k_epochs) {
  if (k_epochs == 0 && config.regime.kind != RegimeKind::kFixed) return 0.0;
  return alpha_of(config.regime, config.n, k_epochs, family.constants().mu);
}

class Recorder {
 public:
  Recorder(RecordMode mode, Trajectory& out) : mode_(mode), out_(out) {}

  void start(std::span<const double> x0) {
    if (mode_ != RecordMode::kFinalOnly) push(1, 0, x0);
  }
  void epoch_start(std::size_t epoch, std::span<const double> x) {
    if (mode_ == RecordMode::kPerStep && epoch > 1) push(epoch, 0, x);
  }
  void step(std::size_t epoch, std::size_t i, std::size_t n, std::span<const double> x) {
    if (mode_ == RecordMode::kPerStep || (mode_ == RecordMode::kPerEpoch && i == n)) {
      push(epoch, i, x);
    }
  }
  bool wants_steps() const noexcept { return mode_ != RecordMode::kFinalOnly; }

 private:
  void push(std::size_t epoch, std::size_t step, std::span<const double> x) {
    out_.samples.push_back({epoch, step, Point(x.begin(), x.end())});
  }

  RecordMode mode_;
  Trajectory& out_;
};

template <class F, class NextOrder>
void sgdo_loop(const F& family, std::size_t k_epochs, double alpha, Point& x, Recorder& rec,
               NextOrder&& next_order) {
  const std::size_t n = family.size();
  if constexpr (std::is_same_v<F, PiecewiseFamily>) {
    double xs = x[0];
    for (std::size_t j = 1; j <= k_epochs; ++j) {
      const Permutation& order = next_order(j);
      if (rec.wants_steps()) {
        double start = xs;
        rec.epoch_start(j, std::span<const double>(&start, 1));
        xs = detail::run_epoch_scalar(family, order, alpha, xs, j, [&](std::size_t i, double v) {
          rec.step(j, i, n, std::span<const double>(&v, 1));
        });
      } else {
        xs = detail::run_epoch_scalar(family, order, alpha, xs, j, [](std::size_t, double) {});
      }
    }
    x[0] = xs;
  } else {
    Point scratch(x.size());
    for (std::size_t j = 1; j <= k_epochs; ++j) {
      const Permutation& order = next_order(j);
      rec.epoch_start(j, x);
      detail::run_epoch(family, order, alpha, std::span<double>(x), scratch, j,
                        [&](std::size_t i, std::span<const double> v) { rec.step(j, i, n, v); });
    }
  }
}

Trajectory finish(const Family& family, Point x, Trajectory traj) {
  traj.final_sq_error = squared_distance(x, family.minimizer());
  traj.final_iterate = std::move(x);
  return traj;
}

}  // namespace

std::string StepSizeRegime::label() const {
  switch (kind) {
    case RegimeKind::kRecipT: return "1/T";
    case RegimeKind::kCLogTOverT: return short_number(param) + "logT/T";
    case RegimeKind::kRecipN: return "1/n";
    case RegimeKind::kTheorem1: return "theorem1:" + short_number(param);
    case RegimeKind::kFixed: return "fixed:" + short_number(param);
  }
  return "?";
}

StepSizeRegime StepSizeRegime::parse(const std::string& text) {
  if (text == "1/T" || text == "recip_t") return recip_t();
  if (text == "1/n" || text == "recip_n") return recip_n();
  if (text == "theorem1") return theorem1(2.0);
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const double v = parse_number(text.substr(colon + 1), "step-size regime");
    if (head == "clog") return c_log_t_over_t(v);
    if (head == "theorem1") return theorem1(v);
    if (head == "fixed") return fixed(v);
  }
  const std::string suffix = "logT/T";
  if (text.size() > suffix.size() && text.ends_with(suffix)) {
    return c_log_t_over_t(parse_number(text.substr(0, text.size() - suffix.size()), "regime"));
  }
  if (text == suffix) return c_log_t_over_t(1.0);
  throw UsageError("unknown step-size regime '" + text +
                   "' (expected 1/T, <c>logT/T, 1/n, theorem1[:l], fixed:<alpha>)");
}

double alpha_of(const StepSizeRegime& regime, std::size_t n, std::size_t k_epochs, double mu) {
  if (regime.kind == RegimeKind::kFixed) {
    if (!(regime.param >= 0.0) || !std::isfinite(regime.param)) {
      throw UsageError("fixed step size must be finite and non-negative");
    }
    return regime.param;
  }
  if (n < 1 || k_epochs < 1) throw UsageError("step size needs n >= 1 and K >= 1");
  if (!(mu > 0.0)) throw UsageError("step size needs mu > 0");
  const double t = static_cast<double>(n) * static_cast<double>(k_epochs);
  switch (regime.kind) {
    case RegimeKind::kRecipT:
      return 1.0 / t;
    case RegimeKind::kCLogTOverT:
      if (!(regime.param > 0.0)) throw UsageError("c in c*logT/T must be positive");
      return regime.param * std::log(t) / t;
    case RegimeKind::kRecipN:
      return 1.0 / static_cast<double>(n);
    case RegimeKind::kTheorem1:
      if (!(regime.param > 0.0) || regime.param > 2.0) {
        throw UsageError("theorem-1 step size needs 0 < l <= 2");
      }
      return 4.0 * regime.param * std::log(t) / (t * mu);
    case RegimeKind::kFixed:
      break;
  }
  return regime.param;
}

Point sgdo_step(const Family& family, std::size_t i, const Point& x, double alpha) {
  Point g = family.component_grad(i, x);
  Point out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - alpha * g[k];
  if (!detail::all_finite(out)) throw DivergenceError(0, 0);
  return out;
}

Trajectory run_sgdo(const Family& family, const RunConfig& config) {
  Point x = resolve_init(family, config);
  Trajectory traj;
  traj.alpha = resolve_alpha(family, config, config.k_epochs);
  Recorder rec(config.record, traj);
  rec.start(x);

  RngStream stream = derive_stream(config.lineage);
  Permutation order = Permutation::identity(config.n);
  family.visit([&](const auto& f) {
    sgdo_loop(f, config.k_epochs, traj.alpha, x, rec, [&](std::size_t) -> const Permutation& {
      shuffle_into(stream, order);
      ++traj.permutations_drawn;
      return order;
    });
  });
  return finish(family, std::move(x), std::move(traj));
}

Trajectory run_sgdo_with_orders(const Family& family, const RunConfig& config,
                                std::span<const Permutation> orders) {
  Point x = resolve_init(family, config);
  for (const auto& p : orders) {
    if (p.size() != config.n) throw UsageError("epoch order has the wrong size");
  }
  Trajectory traj;
  traj.alpha = resolve_alpha(family, config, orders.size());
  Recorder rec(config.record, traj);
  rec.start(x);
  family.visit([&](const auto& f) {
    sgdo_loop(f, orders.size(), traj.alpha, x, rec, [&](std::size_t j) -> const Permutation& {
      ++traj.permutations_drawn;
      return orders[j - 1];
    });
  });
  return finish(family, std::move(x), std::move(traj));
}

Trajectory run_sgd_with_replacement(const Family& family, const RunConfig& config) {
  Point x = resolve_init(family, config);
  Trajectory traj;
  traj.alpha = resolve_alpha(family, config, config.k_epochs);
  Recorder rec(config.record, traj);
  rec.start(x);

  RngStream stream = derive_stream(config.lineage);
  const std::size_t n = config.n;
  const double alpha = traj.alpha;
  family.visit([&](const auto& f) {
    Point scratch(x.size());
    for (std::size_t j = 1; j <= config.k_epochs; ++j) {
      rec.epoch_start(j, x);
      for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t idx = static_cast<std::size_t>(stream.bounded(n)) + 1;
        ++traj.indices_drawn;
        f.component_grad(idx, x, scratch);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = x[k] - alpha * scratch[k];
        if (!detail::all_finite(x)) throw DivergenceError(j, i);
        rec.step(j, i, n, x);
      }
    }
  });
  return finish(family, std::move(x), std::move(traj));
}

}  // namespace shufflesgd
