#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

#include "shufflesgd/bounds.hpp"
#include "shufflesgd/coupling.hpp"
#include "shufflesgd/engine.hpp"
#include "shufflesgd/error.hpp"
#include "shufflesgd/harness.hpp"
#include "shufflesgd/permstats.hpp"
#include "shufflesgd/permutation.hpp"
#include "shufflesgd/report.hpp"

namespace shufflesgd::cli {
namespace fs = std::filesystem;

namespace {

struct Scale {
  std::size_t sweep_repeats;
  std::size_t swap_trials_per_config;
  std::size_t gap_repeats;
  std::size_t posexp_repeats;
  std::size_t quadratic_runs;
  std::size_t invariant_points;
};

Scale scale_of(Suite suite) {
  if (suite == Suite::kFull) return {400, 12500, 100000, 10000, 100, 1000};
  return {100, 2500, 20000, 2000, 100, 200};
}

std::string fname_safe(std::string s) {
  for (char& c : s) {
    if (c == '/' || c == ':' || c == '^') c = '_';
  }
  return s;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

std::string band(double lo, double hi) {
  return "[" + format_double(lo) + ", " + format_double(hi) + "]";
}

struct Context {
  Scale scale;
  std::uint64_t seed;
  fs::path dir;
  unsigned workers;
};

harness::SweepResult sweep(const Context& ctx, harness::SweepVar var, std::size_t fixed,
                           const StepSizeRegime& regime, const std::string& stem) {
  harness::SweepConfig cfg;
  cfg.family = PiecewiseRecipe{4.0, 1.0};
  cfg.var = var;
  cfg.fixed = fixed;
  cfg.grid = {32, 64, 128, 256};
  cfg.regime = regime;
  cfg.repeats = ctx.scale.sweep_repeats;
  cfg.base_seed = ctx.seed;
  cfg.workers = ctx.workers;
  harness::SweepResult res = harness::run_sweep(cfg);
  harness::emit_csv(res, ctx.dir / (stem + ".csv"));
  harness::emit_svg(res, {}, ctx.dir / (stem + ".svg"), stem);
  return res;
}

CriterionResult invariants(const Context& ctx) {
  CriterionResult r{"I1", "objective and stream invariants", true, ""};
  std::ostringstream csv;
  csv << "family,check,max_violation,pass\n";
  RngStream stream = derive_stream(ctx.seed, 1000, 0);
  auto record = [&](const std::string& fam, const std::string& check, double worst, double tol) {
    const bool ok = worst <= tol;
    csv << fam << ',' << check << ',' << format_double(worst) << ',' << (ok ? "true" : "false")
        << '\n';
    if (!ok) {
      r.pass = false;
      r.detail += fam + ":" + check + " ";
    }
  };

  std::vector<Family> families;
  families.push_back(build_family(PiecewiseRecipe{4.0, 1.0}, 16));
  families.push_back(build_family(Product2DRecipe{4.0, 1.0}, 16));
  QuadraticRecipe q;
  q.hessian = {2.0, 0.5, 0.5, 1.0};
  q.base_linear = {0.25, -0.5};
  q.offsets_seed = ctx.seed;
  families.push_back(build_family(q, 16));

  for (const Family& fam : families) {
    const std::size_t n = fam.size();
    const std::size_t d = fam.dimension();
    double mean_value = 0.0;
    double mean_grad = 0.0;
    double grad_at_min = 0.0;
    for (std::size_t p = 0; p < ctx.scale.invariant_points; ++p) {
      Point x(d);
      for (double& v : x) v = 4.0 * stream.uniform01() - 2.0;
      CompensatedSum fsum;
      Point gsum(d, 0.0);
      for (std::size_t i = 1; i <= n; ++i) {
        fsum.add(fam.eval_component(i, x));
        const Point g = fam.component_grad(i, x);
        for (std::size_t k = 0; k < d; ++k) gsum[k] += g[k];
      }
      const double fx = fam.eval(x);
      mean_value = std::max(mean_value, std::abs(fsum.value() / n - fx) / std::max(1.0, std::abs(fx)));
      const Point fg = fam.full_grad(x);
      for (std::size_t k = 0; k < d; ++k) {
        mean_grad = std::max(mean_grad, std::abs(gsum[k] / n - fg[k]) / std::max(1.0, std::abs(fg[k])));
      }
    }
    const Point g = fam.full_grad(fam.minimizer());
    for (double v : g) grad_at_min = std::max(grad_at_min, std::abs(v));
    record(fam.name(), "mean_of_components", mean_value, 1e-12);
    record(fam.name(), "mean_of_gradients", mean_grad, 1e-12);
    record(fam.name(), "grad_at_minimizer", grad_at_min, 1e-12);
  }

  const auto state = derive_stream(0, 0, 0).state();
  const RngStream::State golden{0x2130748aaac80268ULL, 0x0cc78fb979ce5090ULL,
                                0xab9aa3dafba6b4acULL, 0xb0c750a86b3b1dd2ULL};
  record("stream", "derive_0_0_0", state == golden ? 0.0 : 1.0, 0.0);
  RngStream s = derive_stream(0, 0, 0);
  const Permutation p = shuffle(s, 10);
  const Permutation expect(std::vector<Permutation::value_type>{3, 6, 7, 4, 2, 10, 9, 5, 1, 8});
  record("stream", "shuffle_n10", p == expect ? 0.0 : 1.0, 0.0);

  auto out = open_out(ctx.dir / "invariants.csv");
  out << csv.str();
  return r;
}

CriterionResult c1(const Context& ctx, double& slope_4logt) {
  const auto res = sweep(ctx, harness::SweepVar::kK, 256, StepSizeRegime::c_log_t_over_t(4.0),
                         "sweep_K_4logT_T");
  const auto series = res.series();
  const auto fit = harness::fit_rate(series);
  slope_4logt = fit.slope;
  CriterionResult r{"C1", "lower-bound K-scaling", fit.slope >= -2.3 && fit.slope <= -1.7, ""};
  r.detail = "slope=" + format_double(fit.slope) + " band " + band(-2.3, -1.7) +
             " r2=" + format_double(fit.r_squared);
  return r;
}

CriterionResult c2(const Context& ctx) {
  const auto res = sweep(ctx, harness::SweepVar::kN, 256, StepSizeRegime::c_log_t_over_t(4.0),
                         "sweep_n_4logT_T");
  const auto series = res.series();
  const auto fit = harness::fit_rate(series);
  double lo = INFINITY;
  double hi = 0.0;
  std::size_t t_min = SIZE_MAX;
  std::size_t t_max = 0;
  for (const auto& p : res.points) {
    const double t = static_cast<double>(p.horizon);
    const double norm = p.mean_sq_error * t * t / static_cast<double>(p.n);
    lo = std::min(lo, norm);
    hi = std::max(hi, norm);
    t_min = std::min(t_min, p.horizon);
    t_max = std::max(t_max, p.horizon);
  }
  const double ratio_cap =
      std::pow(std::log(static_cast<double>(t_max)) / std::log(static_cast<double>(t_min)), 2) * 4.0;
  const double ratio = hi / lo;
  const bool slope_ok = fit.slope >= -1.5 && fit.slope <= -0.6;
  CriterionResult r{"C2", "lower-bound n-scaling", slope_ok && ratio <= ratio_cap, ""};
  r.detail = "slope=" + format_double(fit.slope) + " band " + band(-1.5, -0.6) +
             " normalized_ratio=" + format_double(ratio) + " cap=" + format_double(ratio_cap);
  return r;
}

CriterionResult c3(const Context& ctx, double slope_4logt) {
  CriterionResult r{"C3", "step-size regime robustness", true, ""};
  const std::vector<StepSizeRegime> regimes = {StepSizeRegime::recip_t(),
                                               StepSizeRegime::c_log_t_over_t(2.0),
                                               StepSizeRegime::c_log_t_over_t(8.0)};
  std::vector<std::pair<std::string, double>> slopes;
  for (const auto& reg : regimes) {
    const auto res = sweep(ctx, harness::SweepVar::kK, 256, reg, "sweep_K_" + fname_safe(reg.label()));
    slopes.emplace_back(reg.label(), harness::fit_rate(res.series()).slope);
  }
  slopes.emplace_back("4logT/T", slope_4logt);
  for (const auto& [label, s] : slopes) {
    const bool ok = s >= -2.3 && s <= -1.7;
    r.pass = r.pass && ok;
    r.detail += label + "=" + format_double(s) + (ok ? " " : "(out) ");
  }
  const auto res = sweep(ctx, harness::SweepVar::kK, 256, StepSizeRegime::recip_n(), "sweep_K_1_n");
  r.detail += "1/n=" + format_double(harness::fit_rate(res.series()).slope) + "(reported)";
  return r;
}

CriterionResult c4(const Context& ctx) {
  QuadraticRecipe recipe;
  recipe.offsets_seed = ctx.seed;
  const std::size_t n = 4;
  const std::size_t k = 4096;
  const Family fam = build_family(recipe, n);
  const auto c = fam.constants();
  const auto ub = bounds::upper_bound_quadratic(n, k, c.mu, c.l_smooth, c.g_bound, c.d_bound, 2.0);
  RunConfig base;
  base.n = n;
  base.k_epochs = k;
  base.regime = StepSizeRegime::theorem1(2.0);
  base.init = fam.minimizer();
  base.init[0] += c.d_bound;
  const auto errs = harness::run_repeats(fam, base, ctx.scale.quadratic_runs, ctx.seed, 4, ctx.workers);
  auto out = open_out(ctx.dir / "quadratic_runs.csv");
  out << "run,final_sq_error,bound\n";
  double worst = 0.0;
  for (std::size_t r = 0; r < errs.size(); ++r) {
    out << r << ',' << format_double(errs[r]) << ',' << format_double(ub.bound_value) << '\n';
    worst = std::max(worst, errs[r]);
  }
  CriterionResult r{"C4", "quadratic upper-bound oracle", ub.applicable() && worst <= ub.bound_value, ""};
  r.detail = "max_error=" + format_double(worst) + " bound=" + format_double(ub.bound_value) +
             " runs=" + std::to_string(errs.size()) + (ub.applicable() ? "" : " (preconditions fail)");
  return r;
}

CriterionResult c5(const Context& ctx) {
  const auto rep = permstats::check_lemma13(256);
  auto out = open_out(ctx.dir / "partial_sums.csv");
  permstats::write_csv_header(out);
  for (const auto& row : rep.rows) permstats::write_csv_row(out, row);
  CriterionResult r{"C5", "exact partial-sum bounds", rep.passed() && rep.asserted_checks > 0, ""};
  r.detail = "asserted=" + std::to_string(rep.asserted_checks) +
             " violations=" + std::to_string(rep.violations) +
             " informational_failures=" + std::to_string(rep.informational_failures);
  return r;
}

CriterionResult c6(const Context& ctx) {
  auto out = open_out(ctx.dir / "enumeration.csv");
  out << "n,i,support,equal\n";
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  for (std::size_t n = 2; n <= 12; n += 2) {
    for (std::size_t i = 0; i <= n; ++i) {
      const auto a = permstats::exact_distribution(n, i);
      const auto b = permstats::enumerate_bruteforce(n, i);
      const bool eq = a.pmf == b.pmf;
      ++cases;
      if (!eq) ++mismatches;
      out << n << ',' << i << ',' << a.pmf.size() << ',' << (eq ? "true" : "false") << '\n';
    }
  }
  CriterionResult r{"C6", "formula and enumeration agree", mismatches == 0, ""};
  r.detail = "cases=" + std::to_string(cases) + " mismatches=" + std::to_string(mismatches);
  return r;
}

CriterionResult c7(const Context& ctx) {
  auto out = open_out(ctx.dir / "couple_swap.csv");
  coupling::write_csv_header(out);
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  std::uint64_t index = 0;
  for (double l_left : {4.0, 1.0}) {
    for (double alpha : {1e-3, 1e-2}) {
      for (std::size_t n : {16u, 64u}) {
        const Family fam = build_family(PiecewiseRecipe{l_left, 1.0}, n);
        RngStream stream = derive_stream(ctx.seed, 7, index++);
        const auto rep = coupling::swap_distance_check(fam, alpha, ctx.scale.swap_trials_per_config, stream);
        coupling::write_csv(out, rep.report);
        trials += rep.trials;
        violations += rep.report.violations();
        worst_ratio = std::max(worst_ratio, rep.max_gap / rep.bound);
      }
    }
  }
  CriterionResult r{"C7", "swap-coupling bound", violations == 0, ""};
  r.detail = "trials=" + std::to_string(trials) + " violations=" + std::to_string(violations) +
             " max_gap/bound=" + format_double(worst_ratio);
  return r;
}

CriterionResult c8(const Context& ctx) {
  const Family fam = build_family(PiecewiseRecipe{4.0, 1.0}, 64);
  coupling::EpochProbe probe{0.01, 8, {}};
  RngStream stream = derive_stream(ctx.seed, 8, 0);
  const auto rep = coupling::gradient_gap_check(fam, probe, ctx.scale.gap_repeats, stream);
  auto out = open_out(ctx.dir / "couple_gap.csv");
  coupling::write_csv_header(out);
  coupling::write_csv(out, rep);
  double worst = 0.0;
  double worst_se = 0.0;
  for (const auto& row : rep.rows) {
    if (std::abs(row.estimate) > worst) {
      worst = std::abs(row.estimate);
      worst_se = row.stderr_;
    }
  }
  const double bound = rep.rows.empty() ? 0.0 : rep.rows.front().bound;
  CriterionResult r{"C8", "gradient gap", rep.passed(), ""};
  r.detail = "repeats=" + std::to_string(ctx.scale.gap_repeats) + " violations=" +
             std::to_string(rep.violations()) + " max|est|=" + format_double(worst) +
             " (stderr " + format_double(worst_se) + ") bound=" + format_double(bound);
  return r;
}

CriterionResult c9(const Context& ctx) {
  auto out = open_out(ctx.dir / "couple_posexp.csv");
  coupling::write_csv_header(out);
  std::size_t violations = 0;
  std::size_t rows = 0;
  std::uint64_t index = 0;
  for (double l_left : {4.0, 1.0}) {
    const PiecewiseFamily fam({64, l_left, 1.0});
    for (double alpha : {1e-3, 1e-2, 1.0 / 4.0}) {
      if (alpha > 1.0 / l_left) continue;
      RngStream stream = derive_stream(ctx.seed, 9, index++);
      const auto rep = coupling::posexp_check(fam, alpha, 8, ctx.scale.posexp_repeats, stream);
      coupling::write_csv(out, rep);
      violations += rep.violations();
      rows += rep.rows.size();
    }
  }
  CriterionResult r{"C9", "mean iterate positivity", violations == 0, ""};
  r.detail = "repeats=" + std::to_string(ctx.scale.posexp_repeats) + " rows=" +
             std::to_string(rows) + " violations=" + std::to_string(violations);
  return r;
}

}  // namespace

Suite parse_suite(const std::string& text) {
  if (text == "fast") return Suite::kFast;
  if (text == "full") return Suite::kFull;
  throw UsageError("suite must be fast or full, got '" + text + "'");
}

bool SuiteResult::passed() const noexcept {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

SuiteResult run_suite(Suite suite, std::uint64_t seed, const fs::path& dir, unsigned workers) {
  fs::create_directories(dir);
  const Context ctx{scale_of(suite), seed, dir, workers};
  SuiteResult out;
  auto guarded = [&](const std::string& id, const std::string& desc,
                     const std::function<CriterionResult()>& fn) {
    try {
      out.results.push_back(fn());
    } catch (const std::exception& e) {
      out.results.push_back({id, desc, false, std::string("error: ") + e.what()});
    }
  };
  double slope_4logt = NAN;
  guarded("I1", "objective and stream invariants", [&] { return invariants(ctx); });
  guarded("C1", "lower-bound K-scaling", [&] { return c1(ctx, slope_4logt); });
  guarded("C2", "lower-bound n-scaling", [&] { return c2(ctx); });
  guarded("C3", "step-size regime robustness", [&] { return c3(ctx, slope_4logt); });
  guarded("C4", "quadratic upper-bound oracle", [&] { return c4(ctx); });
  guarded("C5", "exact partial-sum bounds", [&] { return c5(ctx); });
  guarded("C6", "formula and enumeration agree", [&] { return c6(ctx); });
  guarded("C7", "swap-coupling bound", [&] { return c7(ctx); });
  guarded("C8", "gradient gap", [&] { return c8(ctx); });
  guarded("C9", "mean iterate positivity", [&] { return c9(ctx); });

  auto summary = open_out(dir / "summary.txt");
  for (const auto& r : out.results) {
    summary << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.description << ": " << r.detail
            << '\n';
  }
  return out;
}

bool trees_identical(const fs::path& a, const fs::path& b, std::vector<std::string>& diffs) {
  auto listing = [](const fs::path& root) {
    std::vector<std::string> files;
    if (!fs::exists(root)) return files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root).generic_string());
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto la = listing(a);
  const auto lb = listing(b);
  std::vector<std::string> all;
  std::set_union(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(all));
  for (const auto& f : all) {
    const bool in_a = std::binary_search(la.begin(), la.end(), f);
    const bool in_b = std::binary_search(lb.begin(), lb.end(), f);
    if (!in_a || !in_b || slurp(a / f) != slurp(b / f)) diffs.push_back(f);
  }
  return diffs.empty() && !all.empty();
}

}  // namespace shufflesgd::cli
