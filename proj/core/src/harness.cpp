#include "shufflesgd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "shufflesgd/error.hpp"
#include "shufflesgd/report.hpp"

namespace shufflesgd::harness {
namespace {

constexpr const char* kCsvHeader = "sweep_var,n,K,T,alpha,repeats,mean_sq_error,stderr,min,max";

std::pair<std::size_t, std::size_t> grid_point(const SweepConfig& c, std::size_t value) {
  return c.var == SweepVar::kN ? std::pair{value, c.fixed} : std::pair{c.fixed, value};
}

double planned_alpha(const SweepConfig& c, std::size_t n, std::size_t k_epochs) {
  if (k_epochs == 0 && c.regime.kind != RegimeKind::kFixed) return 0.0;
  // Every family here reports mu from its construction; the piecewise and
  // product families have mu = 1.
  const double mu = build_family(c.family, n).constants().mu;
  return alpha_of(c.regime, n, k_epochs, mu);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw UsageError("bad number '" + s + "' in sweep CSV");
  return v;
}

std::size_t parse_size(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw UsageError("bad integer '" + s + "' in sweep CSV");
  return static_cast<std::size_t>(v);
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

std::string sweep_var_name(SweepVar var) { return var == SweepVar::kN ? "n" : "K"; }

SweepVar parse_sweep_var(const std::string& text) {
  if (text == "n" || text == "N") return SweepVar::kN;
  if (text == "K" || text == "k") return SweepVar::kK;
  throw UsageError("sweep variable must be n or K, got '" + text + "'");
}

std::vector<std::pair<double, double>> SweepResult::series() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : points) {
    const double x = static_cast<double>(var == SweepVar::kN ? p.n : p.k_epochs);
    out.emplace_back(x, p.mean_sq_error);
  }
  return out;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::min<unsigned>(resolve_workers(workers),
                               static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<PlannedRun> plan(const SweepConfig& config) {
  if (config.repeats < 1) throw UsageError("sweep needs repeats >= 1");
  std::vector<PlannedRun> out;
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const auto [n, k] = grid_point(config, config.grid[g]);
    if (n < 1) throw UsageError("grid values for n must be positive");
    out.push_back({g, n, k, planned_alpha(config, n, k), config.repeats});
  }
  return out;
}

std::vector<double> run_repeats(const Family& family, const RunConfig& base,
                                std::size_t repeats, std::uint64_t base_seed,
                                std::uint64_t sweep_index, unsigned workers) {
  std::vector<double> errors(repeats);
  parallel_for(repeats, workers, [&](std::size_t r) {
    RunConfig cfg = base;
    cfg.record = RecordMode::kFinalOnly;
    cfg.lineage = {base_seed, sweep_index, r};
    errors[r] = run_sgdo(family, cfg).final_sq_error;
  });
  return errors;
}

SweepResult run_sweep(const SweepConfig& config) {
  const auto runs = plan(config);
  SweepResult result;
  result.var = config.var;
  for (const auto& pr : runs) {
    const Family family = build_family(config.family, pr.n);
    RunConfig base;
    base.n = pr.n;
    base.k_epochs = pr.k_epochs;
    base.regime = config.regime;
    base.init = config.init;
    std::vector<double> errors;
    try {
      errors = run_repeats(family, base, config.repeats, config.base_seed, pr.grid_index,
                           config.workers);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.epoch(), e.step(),
                            "sweep point n=" + std::to_string(pr.n) +
                                " K=" + std::to_string(pr.k_epochs));
    }
    const SampleStats s = summarize(errors);
    result.points.push_back({pr.n, pr.k_epochs, pr.n * pr.k_epochs, pr.alpha, config.repeats,
                             s.mean, s.stderr_, s.min, s.max});
  }
  return result;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw UsageError("fit_rate needs at least two points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw UsageError("fit_rate needs positive values");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double m = static_cast<double>(lx.size());
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx.add(lx[k]);
    sy.add(ly[k]);
  }
  const double mx = sx.value() / m;
  const double my = sy.value() / m;
  CompensatedSum sxx;
  CompensatedSum sxy;
  CompensatedSum syy;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double dx = lx[k] - mx;
    const double dy = ly[k] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0)) throw UsageError("fit_rate needs at least two distinct values");
  RateFit fit;
  fit.points = lx.size();
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  if (syy.value() > 0.0) {
    fit.r_squared = std::clamp(sxy.value() * sxy.value() / (sxx.value() * syy.value()), 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;  // constant data lies exactly on the fitted line
  }
  return fit;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  const std::string var = sweep_var_name(result.var);
  for (const auto& p : result.points) {
    out << var << ',' << p.n << ',' << p.k_epochs << ',' << p.horizon << ','
        << format_double(p.alpha) << ',' << p.repeats << ',' << format_double(p.mean_sq_error)
        << ',' << format_double(p.stderr_) << ',' << format_double(p.min) << ','
        << format_double(p.max) << '\n';
  }
}

SweepResult read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw UsageError("sweep CSV must start with the header line");
  }
  SweepResult result;
  bool have_var = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 10) throw UsageError("sweep CSV row needs 10 columns: " + line);
    const SweepVar var = parse_sweep_var(cells[0]);
    if (have_var && var != result.var) throw UsageError("mixed sweep variables in CSV");
    result.var = var;
    have_var = true;
    result.points.push_back({parse_size(cells[1]), parse_size(cells[2]), parse_size(cells[3]),
                             parse_double(cells[4]), parse_size(cells[5]),
                             parse_double(cells[6]), parse_double(cells[7]),
                             parse_double(cells[8]), parse_double(cells[9])});
  }
  return result;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(out, result);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string render_svg(const SweepResult& result, std::span<const Curve> curves,
                       const std::string& title) {
  constexpr double kWidth = 720.0;
  constexpr double kHeight = 480.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 180.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 56.0;
  static const char* kPalette[] = {"#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  const auto series = result.series();
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  auto take = [&](double x, double y) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) return;
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& p = result.points[k];
    take(series[k].first, p.mean_sq_error);
    take(series[k].first, p.mean_sq_error + p.stderr_);
    if (p.mean_sq_error - p.stderr_ > 0.0) take(series[k].first, p.mean_sq_error - p.stderr_);
  }
  for (const auto& c : curves) {
    for (const auto& [x, y] : c.points) take(x, y);
  }
  if (!(xmin <= xmax)) {
    xmin = 1.0;
    xmax = 10.0;
  }
  if (!(ymin <= ymax)) {
    ymin = 1.0;
    ymax = 10.0;
  }
  // Pad by a quarter decade on each side.
  const double lx0 = std::log10(xmin) - 0.1, lx1 = std::log10(xmax) + 0.1;
  const double ly0 = std::log10(ymin) - 0.25, ly1 = std::log10(ymax) + 0.25;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * pw; };
  auto py = [&](double y) { return kTop + (ly1 - std::log10(y)) / (ly1 - ly0) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!title.empty()) {
    s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << svg_escape(title) << "</text>\n";
  }

  auto ticks = [](double l0, double l1) {
    std::vector<double> t;
    const bool dense = (l1 - l0) < 1.5;
    for (int e = static_cast<int>(std::floor(l0)); e <= static_cast<int>(std::ceil(l1)); ++e) {
      for (double m : {1.0, 2.0, 5.0}) {
        if (!dense && m != 1.0) continue;
        const double v = m * std::pow(10.0, e);
        if (std::log10(v) >= l0 && std::log10(v) <= l1) t.push_back(v);
      }
    }
    return t;
  };
  for (double v : ticks(lx0, lx1)) {
    const double x = px(v);
    s << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\""
      << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
      << fmt(v) << "</text>\n";
  }
  for (double v : ticks(ly0, ly1)) {
    const double y = py(v);
    s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v, 2)
      << "</text>\n";
  }
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">" << sweep_var_name(result.var) << "</text>\n";
  s << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << kTop + ph / 2 << ")\">mean squared error</text>\n";

  double legend_y = kTop + 12;
  auto legend = [&](const std::string& color, const std::string& label, bool marker) {
    const double lx = kLeft + pw + 16;
    if (marker) {
      s << "<circle cx=\"" << lx + 10 << "\" cy=\"" << legend_y - 4 << "\" r=\"4\" fill=\""
        << color << "\"/>\n";
    } else {
      s << "<line x1=\"" << lx << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << lx + 20 << "\" y2=\""
        << legend_y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    }
    s << "<text x=\"" << lx + 26 << "\" y=\"" << legend_y << "\">" << svg_escape(label)
      << "</text>\n";
    legend_y += 18;
  };

  std::size_t color = 0;
  for (const auto& c : curves) {
    const std::string col = kPalette[color++ % 5];
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : c.points) {
      if (x > 0.0 && y > 0.0) s << px(x) << ',' << py(y) << ' ';
    }
    s << "\"/>\n";
    legend(col, c.label, false);
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& p = result.points[k];
    const double x = series[k].first;
    if (!(p.mean_sq_error > 0.0) || !(x > 0.0)) continue;
    const double hi = p.mean_sq_error + p.stderr_;
    const double lo = p.mean_sq_error - p.stderr_ > 0.0 ? p.mean_sq_error - p.stderr_
                                                        : std::pow(10.0, ly0);
    s << "<line x1=\"" << px(x) << "\" y1=\"" << py(lo) << "\" x2=\"" << px(x) << "\" y2=\""
      << py(hi) << "\" stroke=\"#1f77b4\"/>\n";
    s << "<circle class=\"point\" cx=\"" << px(x) << "\" cy=\"" << py(p.mean_sq_error)
      << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  }
  legend("#1f77b4", "mean error +- stderr", true);
  s << "</svg>\n";
  return s.str();
}

void emit_svg(const SweepResult& result, std::span<const Curve> curves,
              const std::filesystem::path& path, const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << render_svg(result, curves, title);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace shufflesgd::harness
