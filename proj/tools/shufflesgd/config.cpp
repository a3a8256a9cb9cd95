#include "config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "shufflesgd/error.hpp"

namespace shufflesgd::cli {
namespace {

using json = nlohmann::json;

const std::set<std::string> kTopKeys = {
    "seed",   "out",     "workers", "dry_run", "family",  "n",       "K",      "regime",
    "alpha",  "init",    "record",  "sampling", "repeats", "sweep_var", "grid", "curves",
    "replay", "check",   "trials",  "warmup",  "epochs",  "n_max",   "pmf",    "bound",
    "l",      "suite"};

const std::set<std::string> kFamilyKeys = {"kind", "L", "G", "mu", "D", "hessian",
                                           "b",    "c", "offsets_seed"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw UsageError("unknown config key '" + where + key + "'");
  }
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw UsageError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) throw UsageError("");
      if (v.is_number_integer() && v.get<long long>() < 0) throw UsageError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw UsageError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw UsageError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

template <class T>
void read_opt(const json& obj, const char* key, std::optional<T>& out, const std::string& where = "") {
  if (auto it = obj.find(key); it != obj.end()) out = get_as<T>(*it, where + key);
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw UsageError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_as<double>(e, key));
  return out;
}

}  // namespace

std::vector<std::string> known_config_keys() {
  std::vector<std::string> keys(kTopKeys.begin(), kTopKeys.end());
  for (const auto& k : kFamilyKeys) keys.push_back("family." + k);
  return keys;
}

CliConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  reject_unknown(doc, kTopKeys, "");

  CliConfig c;
  read_opt(doc, "seed", c.seed);
  if (auto it = doc.find("out"); it != doc.end()) c.out = get_as<std::string>(*it, "out");
  read_opt(doc, "workers", c.workers);
  if (auto it = doc.find("dry_run"); it != doc.end()) c.dry_run = get_as<bool>(*it, "dry_run");

  if (auto it = doc.find("family"); it != doc.end()) {
    const json& f = *it;
    if (!f.is_object()) throw UsageError("config key 'family' must be an object");
    reject_unknown(f, kFamilyKeys, "family.");
    read_opt(f, "kind", c.family_kind, "family.");
    read_opt(f, "L", c.l_smooth, "family.");
    read_opt(f, "G", c.g_bound, "family.");
    read_opt(f, "mu", c.mu, "family.");
    read_opt(f, "D", c.d_bound, "family.");
    read_opt(f, "c", c.base_const, "family.");
    read_opt(f, "offsets_seed", c.offsets_seed, "family.");
    if (auto h = f.find("hessian"); h != f.end()) {
      if (!h->is_array()) throw UsageError("family.hessian must be an array of rows");
      std::vector<std::vector<double>> rows;
      for (const auto& row : *h) rows.push_back(number_list(row, "family.hessian"));
      c.hessian = std::move(rows);
    }
    if (auto b = f.find("b"); b != f.end()) c.base_linear = number_list(*b, "family.b");
  }

  read_opt(doc, "n", c.n);
  read_opt(doc, "K", c.k_epochs);
  read_opt(doc, "regime", c.regime);
  read_opt(doc, "alpha", c.alpha);
  if (auto it = doc.find("init"); it != doc.end()) c.init = number_list(*it, "init");
  read_opt(doc, "record", c.record);
  read_opt(doc, "sampling", c.sampling);
  read_opt(doc, "repeats", c.repeats);
  read_opt(doc, "sweep_var", c.sweep_var);
  if (auto it = doc.find("grid"); it != doc.end()) {
    if (!it->is_array()) throw UsageError("config key 'grid' must be an array of integers");
    std::vector<std::size_t> grid;
    for (const auto& e : *it) grid.push_back(get_as<std::size_t>(e, "grid"));
    c.grid = std::move(grid);
  }
  if (auto it = doc.find("curves"); it != doc.end()) {
    if (!it->is_array()) throw UsageError("config key 'curves' must be an array");
    std::vector<CurveRequest> curves;
    for (const auto& e : *it) {
      if (!e.is_object()) throw UsageError("each curve must be an object");
      reject_unknown(e, {"rate", "c"}, "curves[].");
      CurveRequest r;
      if (auto rt = e.find("rate"); rt != e.end()) r.rate = get_as<std::string>(*rt, "curves[].rate");
      if (auto cc = e.find("c"); cc != e.end()) r.c = get_as<double>(*cc, "curves[].c");
      curves.push_back(r);
    }
    c.curves = std::move(curves);
  }
  if (auto it = doc.find("replay"); it != doc.end()) c.replay = get_as<std::string>(*it, "replay");
  read_opt(doc, "check", c.check);
  read_opt(doc, "trials", c.trials);
  read_opt(doc, "warmup", c.warmup);
  read_opt(doc, "epochs", c.epochs);
  read_opt(doc, "n_max", c.n_max);
  if (auto it = doc.find("pmf"); it != doc.end()) c.pmf = get_as<bool>(*it, "pmf");
  read_opt(doc, "bound", c.bound_kind);
  read_opt(doc, "l", c.l_exponent);
  read_opt(doc, "suite", c.suite);
  return c;
}

CliConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

CliConfig merge(CliConfig base, const CliConfig& o) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(base.seed, o.seed);
  take(base.out, o.out);
  take(base.workers, o.workers);
  base.dry_run = base.dry_run || o.dry_run;
  take(base.family_kind, o.family_kind);
  take(base.l_smooth, o.l_smooth);
  take(base.g_bound, o.g_bound);
  take(base.mu, o.mu);
  take(base.d_bound, o.d_bound);
  take(base.hessian, o.hessian);
  take(base.base_linear, o.base_linear);
  take(base.base_const, o.base_const);
  take(base.offsets_seed, o.offsets_seed);
  take(base.n, o.n);
  take(base.k_epochs, o.k_epochs);
  take(base.regime, o.regime);
  take(base.alpha, o.alpha);
  take(base.init, o.init);
  take(base.record, o.record);
  take(base.sampling, o.sampling);
  take(base.repeats, o.repeats);
  take(base.sweep_var, o.sweep_var);
  take(base.grid, o.grid);
  take(base.curves, o.curves);
  take(base.replay, o.replay);
  take(base.check, o.check);
  take(base.trials, o.trials);
  take(base.warmup, o.warmup);
  take(base.epochs, o.epochs);
  take(base.n_max, o.n_max);
  base.pmf = base.pmf || o.pmf;
  take(base.bound_kind, o.bound_kind);
  take(base.l_exponent, o.l_exponent);
  take(base.suite, o.suite);
  return base;
}

std::uint64_t resolve_seed(const CliConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("SHUFFLE_SGD_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') {
      throw UsageError(std::string("SHUFFLE_SGD_SEED is not a decimal 64-bit unsigned: ") + env);
    }
    return v;
  }
  return 0;
}

FamilySpec family_spec(const CliConfig& cfg) {
  const std::string kind = cfg.family_kind.value_or("piecewise");
  if (kind == "piecewise") {
    return PiecewiseRecipe{cfg.l_smooth.value_or(4.0), cfg.g_bound.value_or(1.0)};
  }
  if (kind == "product2d") {
    return Product2DRecipe{cfg.l_smooth.value_or(4.0), cfg.g_bound.value_or(1.0)};
  }
  if (kind == "quadratic") {
    QuadraticRecipe r;
    if (cfg.hessian) {
      const std::size_t d = cfg.hessian->size();
      r.hessian.clear();
      for (const auto& row : *cfg.hessian) {
        if (row.size() != d) throw UsageError("family.hessian must be square");
        r.hessian.insert(r.hessian.end(), row.begin(), row.end());
      }
      r.base_linear = cfg.base_linear.value_or(std::vector<double>(d, 0.0));
    } else if (cfg.base_linear) {
      r.base_linear = *cfg.base_linear;
      const std::size_t d = r.base_linear.size();
      r.hessian.assign(d * d, 0.0);
      for (std::size_t k = 0; k < d; ++k) r.hessian[k * d + k] = 1.0;
    }
    if (r.base_linear.size() * r.base_linear.size() != r.hessian.size()) {
      throw UsageError("family.b must have one entry per hessian row");
    }
    r.base_const = cfg.base_const.value_or(0.0);
    r.g_bound = cfg.g_bound.value_or(1.0);
    r.d_bound = cfg.d_bound.value_or(1.0);
    r.offsets_seed = cfg.offsets_seed.value_or(0);
    return r;
  }
  throw UsageError("unknown family kind '" + kind + "' (piecewise, product2d, quadratic)");
}

StepSizeRegime regime_or(const CliConfig& cfg, const StepSizeRegime& fallback) {
  if (cfg.alpha) return StepSizeRegime::fixed(*cfg.alpha);
  if (cfg.regime) return StepSizeRegime::parse(*cfg.regime);
  return fallback;
}

RecordMode record_mode(const CliConfig& cfg) {
  const std::string m = cfg.record.value_or("final");
  if (m == "final") return RecordMode::kFinalOnly;
  if (m == "epoch") return RecordMode::kPerEpoch;
  if (m == "step") return RecordMode::kPerStep;
  throw UsageError("record must be final, epoch or step, got '" + m + "'");
}

}  // namespace shufflesgd::cli
