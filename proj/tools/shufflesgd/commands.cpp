#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>

#include "config.hpp"
#include "shufflesgd/bounds.hpp"
#include "shufflesgd/coupling.hpp"
#include "shufflesgd/engine.hpp"
#include "shufflesgd/error.hpp"
#include "shufflesgd/harness.hpp"
#include "shufflesgd/permstats.hpp"
#include "shufflesgd/report.hpp"
#include "verify.hpp"

namespace shufflesgd::cli {
namespace fs = std::filesystem;

namespace {

struct FailedCheck : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

fs::path out_dir(const CliConfig& cfg) { return cfg.out.value_or(fs::path(".")); }

unsigned workers_of(const CliConfig& cfg) { return harness::resolve_workers(cfg.workers.value_or(0)); }

std::string join_point(const Point& x) {
  std::string s;
  for (std::size_t k = 0; k < x.size(); ++k) s += (k ? "," : "") + format_double(x[k]);
  return s;
}

// ---------------------------------------------------------------------------

int cmd_run(const CliConfig& cfg, std::ostream& out) {
  const std::size_t n = cfg.n.value_or(256);
  const Family fam = build_family(family_spec(cfg), n);
  RunConfig rc;
  rc.n = n;
  rc.k_epochs = cfg.k_epochs.value_or(64);
  rc.regime = regime_or(cfg, StepSizeRegime::c_log_t_over_t(4.0));
  rc.init = cfg.init.value_or(Point{});
  rc.record = record_mode(cfg);
  rc.lineage = Lineage{resolve_seed(cfg), 0, 0};

  const std::string sampling = cfg.sampling.value_or("shuffle");
  Trajectory traj;
  if (sampling == "shuffle") {
    traj = run_sgdo(fam, rc);
  } else if (sampling == "replacement") {
    traj = run_sgd_with_replacement(fam, rc);
  } else {
    throw UsageError("sampling must be shuffle or replacement, got '" + sampling + "'");
  }

  out << "family=" << fam.name() << " n=" << n << " K=" << rc.k_epochs
      << " T=" << n * rc.k_epochs << " regime=" << rc.regime.label()
      << " alpha=" << format_double(traj.alpha) << " sampling=" << sampling << '\n';
  out << "final_iterate=" << join_point(traj.final_iterate) << '\n';
  out << "final_sq_error=" << format_double(traj.final_sq_error) << '\n';

  const Point xstar = fam.minimizer();
  if (rc.record == RecordMode::kPerEpoch) {
    out << "epoch,sq_error\n";
    for (const auto& s : traj.samples) {
      out << (s.step == 0 ? s.epoch - 1 : s.epoch) << ',' << format_double(squared_distance(s.x, xstar))
          << '\n';
    }
  }
  if (cfg.out && !traj.samples.empty()) {
    auto f = open_out(*cfg.out / "trajectory.csv");
    f << "epoch,step";
    for (std::size_t k = 1; k <= fam.dimension(); ++k) f << ",x" << k;
    f << ",sq_error\n";
    for (const auto& s : traj.samples) {
      f << s.epoch << ',' << s.step << ',' << join_point(s.x) << ','
        << format_double(squared_distance(s.x, xstar)) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::vector<harness::Curve> overlay_curves(const CliConfig& cfg, const harness::SweepResult& res) {
  std::vector<harness::Curve> curves;
  if (!cfg.curves || res.points.empty()) return curves;
  for (const auto& req : *cfg.curves) {
    const auto rate = bounds::parse_reference_rate(req.rate);
    const auto& p0 = res.points.front();
    const double c = req.c ? *req.c
                           : p0.mean_sq_error / bounds::reference_rate(rate, 1.0, p0.n, p0.k_epochs);
    harness::Curve curve{format_double(c) + " " + bounds::reference_rate_name(rate), {}};
    for (const auto& p : res.points) {
      const double x = static_cast<double>(res.var == harness::SweepVar::kN ? p.n : p.k_epochs);
      curve.points.emplace_back(x, bounds::reference_rate(rate, c, p.n, p.k_epochs));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void print_fit(std::ostream& out, const harness::SweepResult& res) {
  const auto series = res.series();
  const auto fit = harness::fit_rate(series);
  out << "slope=" << format_double(fit.slope) << '\n';
  out << "intercept=" << format_double(fit.intercept) << '\n';
  out << "r_squared=" << format_double(fit.r_squared) << '\n';
}

int cmd_sweep(const CliConfig& cfg, std::ostream& out) {
  if (cfg.replay) {
    std::ifstream in(*cfg.replay);
    if (!in) throw UsageError("cannot read " + cfg.replay->string());
    const auto res = harness::read_csv(in);
    out << "replay=" << cfg.replay->string() << " points=" << res.points.size() << '\n';
    print_fit(out, res);
    if (cfg.out) {
      const auto curves = overlay_curves(cfg, res);
      harness::emit_svg(res, curves, *cfg.out / ("replay_" + harness::sweep_var_name(res.var) + ".svg"));
    }
    return kExitOk;
  }

  harness::SweepConfig sc;
  sc.family = family_spec(cfg);
  sc.var = harness::parse_sweep_var(cfg.sweep_var.value_or("K"));
  sc.fixed = sc.var == harness::SweepVar::kK ? cfg.n.value_or(256) : cfg.k_epochs.value_or(256);
  if (cfg.grid) sc.grid = *cfg.grid;
  sc.regime = regime_or(cfg, StepSizeRegime::c_log_t_over_t(4.0));
  sc.repeats = cfg.repeats.value_or(400);
  sc.base_seed = resolve_seed(cfg);
  sc.init = cfg.init.value_or(Point{});
  sc.workers = workers_of(cfg);

  if (cfg.dry_run) {
    out << "grid_index,n,K,T,alpha,repeats\n";
    for (const auto& p : harness::plan(sc)) {
      out << p.grid_index << ',' << p.n << ',' << p.k_epochs << ',' << p.n * p.k_epochs << ','
          << format_double(p.alpha) << ',' << p.repeats << '\n';
    }
    return kExitOk;
  }

  const auto res = harness::run_sweep(sc);
  const fs::path dir = out_dir(cfg);
  fs::create_directories(dir);
  const std::string stem = "sweep_" + harness::sweep_var_name(sc.var);
  harness::emit_csv(res, dir / (stem + ".csv"));
  const auto curves = overlay_curves(cfg, res);
  harness::emit_svg(res, curves, dir / (stem + ".svg"), stem + " " + sc.regime.label());
  out << "sweep_var=" << harness::sweep_var_name(sc.var) << " regime=" << sc.regime.label()
      << " repeats=" << sc.repeats << '\n';
  for (const auto& p : res.points) {
    out << "n=" << p.n << " K=" << p.k_epochs << " mean_sq_error=" << format_double(p.mean_sq_error)
        << " stderr=" << format_double(p.stderr_) << '\n';
  }
  if (res.points.size() >= 2) print_fit(out, res);
  out << "csv=" << (dir / (stem + ".csv")).string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_permstats(const CliConfig& cfg, std::ostream& out) {
  if (cfg.n_max) {
    const auto rep = permstats::check_lemma13(*cfg.n_max);
    if (cfg.out) {
      auto f = open_out(*cfg.out / "partial_sums.csv");
      permstats::write_csv_header(f);
      for (const auto& row : rep.rows) permstats::write_csv_row(f, row);
    } else {
      permstats::write_csv_header(out);
      for (const auto& row : rep.rows) permstats::write_csv_row(out, row);
    }
    out << "asserted=" << rep.asserted_checks << " violations=" << rep.violations
        << " informational_failures=" << rep.informational_failures << '\n';
    if (!rep.passed()) throw FailedCheck("partial-sum bounds violated");
    return kExitOk;
  }

  const std::size_t n = cfg.n.value_or(4);
  if (cfg.pmf) {
    out << "n,i,s,probability,value\n";
    for (std::size_t i = 0; i <= n; ++i) {
      const auto d = permstats::exact_distribution(n, i);
      for (const auto& [k, p] : d.pmf) {
        out << n << ',' << i << ',' << k << ',' << p.str() << ',' << format_double(permstats::to_double(p))
            << '\n';
      }
    }
    return kExitOk;
  }
  permstats::write_csv_header(out);
  for (std::size_t i = 0; i <= n; ++i) permstats::write_csv_row(out, permstats::lemma13_row(n, i));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_couple(const CliConfig& cfg, std::ostream& out) {
  const std::size_t n = cfg.n.value_or(64);
  const FamilySpec spec = family_spec(cfg);
  const Family fam = build_family(spec, n);
  const double alpha = cfg.alpha.value_or(0.01);
  const std::string which = cfg.check.value_or("all");
  const std::uint64_t seed = resolve_seed(cfg);
  const std::size_t repeats = cfg.repeats.value_or(10000);
  const coupling::EpochProbe probe{alpha, cfg.warmup.value_or(0), cfg.init.value_or(Point{})};

  const std::vector<std::string> known = {"swap", "gap", "drift", "posexp", "all"};
  if (std::find(known.begin(), known.end(), which) == known.end()) {
    throw UsageError("check must be swap, gap, drift, posexp or all, got '" + which + "'");
  }
  auto wants = [&](const std::string& c) { return which == "all" || which == c; };

  std::size_t failures = 0;
  auto emit = [&](const coupling::CheckReport& rep, const std::string& file) {
    if (cfg.out) {
      auto f = open_out(*cfg.out / file);
      coupling::write_csv_header(f);
      coupling::write_csv(f, rep);
    }
    if (!rep.passed()) ++failures;
  };

  if (wants("swap")) {
    RngStream stream = derive_stream(seed, 0, 0);
    const auto rep = coupling::swap_distance_check(fam, alpha, cfg.trials.value_or(10000), stream);
    out << "check=swap_distance trials=" << rep.trials << " max_gap=" << format_double(rep.max_gap)
        << " bound=" << format_double(rep.bound) << " violations=" << rep.report.violations()
        << (rep.report.passed() ? " PASS" : " FAIL") << '\n';
    emit(rep.report, "couple_swap.csv");
  }
  auto summarize_report = [&](const coupling::CheckReport& rep) {
    out << "check=" << rep.check << " rows=" << rep.rows.size() << " repeats=" << repeats
        << " violations=" << rep.violations() << (rep.passed() ? " PASS" : " FAIL") << '\n';
  };
  if (wants("gap")) {
    RngStream stream = derive_stream(seed, 1, 0);
    const auto rep = coupling::gradient_gap_check(fam, probe, repeats, stream);
    summarize_report(rep);
    emit(rep, "couple_gap.csv");
  }
  if (wants("drift")) {
    RngStream stream = derive_stream(seed, 2, 0);
    const auto rep = coupling::epoch_drift_check(fam, probe, repeats, stream);
    summarize_report(rep);
    emit(rep, "couple_drift.csv");
  }
  if (wants("posexp")) {
    const auto* pw = std::get_if<PiecewiseFamily>(&fam.variant());
    if (!pw) {
      if (which == "posexp") throw UsageError("posexp needs the piecewise family");
    } else {
      RngStream stream = derive_stream(seed, 3, 0);
      const auto rep = coupling::posexp_check(*pw, alpha, cfg.epochs.value_or(8), repeats, stream);
      summarize_report(rep);
      emit(rep, "couple_posexp.csv");
    }
  }
  if (failures) throw FailedCheck(std::to_string(failures) + " coupling check(s) failed");
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_bound(const CliConfig& cfg, std::ostream& out) {
  const std::size_t n = cfg.n.value_or(10);
  const std::size_t k = cfg.k_epochs.value_or(100);
  const double mu = cfg.mu.value_or(1.0);
  const double l_smooth = cfg.l_smooth.value_or(1.0);
  const double g = cfg.g_bound.value_or(1.0);
  const double d = cfg.d_bound.value_or(1.0);
  const double l = cfg.l_exponent.value_or(2.0);
  const std::string which = cfg.bound_kind.value_or("all");
  if (which != "upper" && which != "lower" && which != "window" && which != "all") {
    throw UsageError("bound must be upper, lower, window or all, got '" + which + "'");
  }

  std::vector<bounds::BoundReport> reports;
  if (which == "upper" || which == "all") {
    reports.push_back(bounds::upper_bound_quadratic(n, k, mu, l_smooth, g, d, l));
  }
  if (which == "lower" || which == "all") {
    reports.push_back(bounds::lower_bound_general(n, k, g, l_smooth));
  }
  for (const auto& r : reports) bounds::write_text(out, r);
  if (which == "window" || which == "all") {
    const auto w = bounds::alpha_window(n, k, l_smooth);
    out << "alpha_window lo=" << format_double(w.lo) << " hi=" << format_double(w.hi)
        << " empty=" << (w.empty() ? "true" : "false") << '\n';
  }
  if (cfg.out) {
    auto f = open_out(*cfg.out / "bounds.csv");
    bounds::write_csv_header(f);
    for (const auto& r : reports) bounds::write_csv(f, r);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_verify(const CliConfig& cfg, std::ostream& out) {
  const Suite suite = parse_suite(cfg.suite.value_or("fast"));
  const fs::path dir = cfg.out.value_or(fs::path("verify_out"));
  const std::uint64_t seed = resolve_seed(cfg);
  const unsigned workers = workers_of(cfg);

  fs::remove_all(dir / "run1");
  fs::remove_all(dir / "run2");
  const SuiteResult first = run_suite(suite, seed, dir / "run1", workers);
  const SuiteResult second = run_suite(suite, seed, dir / "run2", workers);
  std::vector<std::string> diffs;
  const bool same = trees_identical(dir / "run1", dir / "run2", diffs);

  for (const auto& r : first.results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.description << ": " << r.detail << '\n';
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "run1")) files += e.is_regular_file();
  out << (same ? "PASS " : "FAIL ") << "C10 determinism: files=" << files
      << " differing=" << diffs.size();
  for (const auto& f : diffs) out << ' ' << f;
  out << '\n';
  if (!first.passed() || !second.passed() || !same) throw FailedCheck("verify suite failed");
  return kExitOk;
}

CurveRequest parse_curve(const std::string& text) {
  CurveRequest r;
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    r.rate = text;
    return r;
  }
  r.rate = text.substr(0, colon);
  try {
    std::size_t used = 0;
    r.c = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("curve must be <rate>[:<c>], got '" + text + "'");
  }
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shuffled SGD experiments, exact checks and bounds", "shufflesgd"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  CliConfig flags;
  std::string config_path;
  std::vector<std::string> curves;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", flags.seed, "base seed (else SHUFFLE_SGD_SEED, else 0)");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--workers", flags.workers, "worker threads (default: all cores)");
  app.add_flag("--dry-run", flags.dry_run, "print the planned runs only");
  app.add_option("--family", flags.family_kind, "piecewise | product2d | quadratic");
  app.add_option("--L", flags.l_smooth, "left curvature / smoothness L");
  app.add_option("--G", flags.g_bound, "gradient scale G");
  app.add_option("--mu", flags.mu, "strong convexity mu");
  app.add_option("--D", flags.d_bound, "initial distance D");
  app.add_option("--n", flags.n, "number of components");
  app.add_option("--k", flags.k_epochs, "number of epochs K");
  app.add_option("--regime", flags.regime, "1/T | <c>logT/T | 1/n | theorem1[:l] | fixed:<alpha>");
  app.add_option("--alpha", flags.alpha, "fixed step size");
  app.add_option("--init", flags.init, "initial point")->expected(1, -1);
  app.add_option("--record", flags.record, "final | epoch | step");
  app.add_option("--sampling", flags.sampling, "shuffle | replacement");
  app.add_option("--repeats", flags.repeats, "Monte Carlo repeats");
  app.add_option("--var", flags.sweep_var, "swept variable: n | K");
  app.add_option("--grid", flags.grid, "grid of swept values")->expected(1, -1);
  app.add_option("--curve", curves, "overlay <rate>[:<c>]; rates n/T^2, n^2/T^3, n^3/T^3, 1/T^2+n^2/T^3");
  app.add_option("--replay", flags.replay, "re-fit an existing sweep CSV");
  app.add_option("--check", flags.check, "swap | gap | drift | posexp | all");
  app.add_option("--trials", flags.trials, "swap-coupling trials");
  app.add_option("--warmup", flags.warmup, "warm-up epochs before the probed epoch");
  app.add_option("--epochs", flags.epochs, "epochs per repeat for posexp");
  app.add_option("--n-max", flags.n_max, "largest n for the exact partial-sum check");
  app.add_flag("--pmf", flags.pmf, "print the exact law of s_i");
  app.add_option("--bound", flags.bound_kind, "upper | lower | window | all");
  app.add_option("--l", flags.l_exponent, "exponent l of the upper bound");
  app.add_option("--suite", flags.suite, "fast | full");

  using Cmd = std::function<int(const CliConfig&, std::ostream&)>;
  std::vector<std::pair<CLI::App*, Cmd>> subs = {
      {app.add_subcommand("run", "one shuffled SGD run"), cmd_run},
      {app.add_subcommand("sweep", "Monte Carlo sweep over n or K with a rate fit"), cmd_sweep},
      {app.add_subcommand("permstats", "exact partial-sum statistics"), cmd_permstats},
      {app.add_subcommand("couple", "coupling and conditional-expectation checks"), cmd_couple},
      {app.add_subcommand("bound", "closed-form bounds and their preconditions"), cmd_bound},
      {app.add_subcommand("verify", "full check suite, run twice and diffed"), cmd_verify},
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!curves.empty()) {
      std::vector<CurveRequest> reqs;
      for (const auto& c : curves) reqs.push_back(parse_curve(c));
      flags.curves = std::move(reqs);
    }
    const CliConfig cfg = config_path.empty() ? flags : merge(load_config_file(config_path), flags);
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) return cmd(cfg, out);
    }
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const FailedCheck& e) {
    err << "failed: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace shufflesgd::cli
