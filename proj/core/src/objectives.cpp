#include "shufflesgd/objectives.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "shufflesgd/error.hpp"
#include "shufflesgd/permutation.hpp"

namespace shufflesgd {

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("dimension mismatch in squared_distance");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

PiecewiseFamily::PiecewiseFamily(const PiecewiseFamilySpec& spec)
    : spec_(spec), half_g_(spec.g_lin / 2.0) {
  if (spec.n == 0 || spec.n % 2 != 0) {
    throw UsageError("piecewise family needs an even n >= 2, got " + std::to_string(spec.n));
  }
  if (!(spec.l_left >= 1.0) || !std::isfinite(spec.l_left)) {
    throw UsageError("piecewise family needs finite L >= 1");
  }
  if (!(spec.g_lin > 0.0) || !std::isfinite(spec.g_lin)) {
    throw UsageError("piecewise family needs finite G > 0");
  }
}

// Iterates started at 0 with a small step stay between the two component
// minimizers -G/(2L) and G/2, where every |f_i'| <= G.
AssumptionConstants PiecewiseFamily::constants() const noexcept {
  const double g = spec_.g_lin;
  return {1.0, spec_.l_left, g, g / 2.0 + g / (2.0 * spec_.l_left)};
}

Product2DFamily::Product2DFamily(const Product2DSpec& spec)
    : spec_(spec), first_(spec.first), second_(spec.second) {
  if (spec.first.n != spec.second.n) {
    throw UsageError("product family factors must share n");
  }
}

AssumptionConstants Product2DFamily::constants() const noexcept {
  const auto a = first_.constants();
  const auto b = second_.constants();
  const double root2 = std::sqrt(2.0);
  return {1.0, std::max(a.l_smooth, b.l_smooth), root2 * std::max(a.g_bound, b.g_bound),
          root2 * std::max(a.d_bound, b.d_bound)};
}

QuadraticFamilySpec make_quadratic_spec(std::size_t n, std::vector<double> hessian,
                                        std::vector<double> base_linear, double base_const,
                                        double g_bound, double d_bound,
                                        std::uint64_t offsets_seed) {
  if (n == 0) throw UsageError("quadratic family needs n >= 1");
  if (!(g_bound > 0.0)) throw UsageError("quadratic family needs G > 0");
  QuadraticFamilySpec spec;
  spec.n = n;
  spec.dim = base_linear.size();
  spec.hessian = std::move(hessian);
  spec.base_linear = std::move(base_linear);
  spec.base_const = base_const;
  spec.g_bound = g_bound;
  spec.d_bound = d_bound;

  const std::size_t d = spec.dim;
  const double half = g_bound / 2.0;
  std::vector<std::vector<double>> offsets(n, std::vector<double>(d, 0.0));
  RngStream stream = derive_stream(offsets_seed, 0, 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (auto& v : offsets[i]) v = -half + g_bound * stream.uniform01();
  }
  auto close_sum = [&] {
    std::vector<double> sum(d, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t r = 0; r < d; ++r) sum[r] += offsets[i][r];
    }
    for (std::size_t r = 0; r < d; ++r) offsets[n - 1][r] = -sum[r];
  };
  close_sum();
  double max_norm = 0.0;
  for (const auto& b : offsets) max_norm = std::max(max_norm, std::sqrt(squared_norm(b)));
  if (max_norm > half) {
    const double scale = half / max_norm;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (auto& v : offsets[i]) v *= scale;
    }
    close_sum();
  }
  spec.linear_offsets = std::move(offsets);
  return spec;
}

QuadraticFamily::QuadraticFamily(QuadraticFamilySpec spec) : spec_(std::move(spec)) {
  const std::size_t d = spec_.dim;
  if (d == 0) throw UsageError("quadratic family needs dim >= 1");
  if (spec_.n == 0) throw UsageError("quadratic family needs n >= 1");
  if (spec_.hessian.size() != d * d) throw UsageError("hessian must be dim x dim");
  if (spec_.base_linear.size() != d) throw UsageError("base_linear must have dim entries");
  if (spec_.linear_offsets.size() != spec_.n) throw UsageError("need one offset per component");

  Eigen::MatrixXd h(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) h(r, c) = spec_.hessian[r * d + c];
  }
  if (!h.allFinite()) throw UsageError("hessian must be finite");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw UsageError("hessian must be symmetric");
  }

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  double offset_scale = 0.0;
  for (const auto& b : spec_.linear_offsets) {
    if (b.size() != d) throw UsageError("offset vectors must have dim entries");
    for (std::size_t r = 0; r < d; ++r) {
      sum[r] += b[r];
      offset_scale = std::max(offset_scale, std::abs(b[r]));
    }
  }
  if (sum.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, offset_scale) * spec_.n) {
    throw UsageError("linear offsets must sum to zero");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw UsageError("hessian must be positive definite (mu > 0)");

  Eigen::VectorXd b(d);
  for (std::size_t r = 0; r < d; ++r) b[r] = spec_.base_linear[r];
  const Eigen::VectorXd xstar = h.ldlt().solve(-b);
  minimizer_.assign(xstar.data(), xstar.data() + d);
  constants_ = {lo, hi, spec_.g_bound, spec_.d_bound};
}

double QuadraticFamily::value(std::span<const double> x) const noexcept {
  const std::size_t d = spec_.dim;
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    double hx = 0.0;
    for (std::size_t c = 0; c < d; ++c) hx += spec_.hessian[r * d + c] * x[c];
    quad += x[r] * hx;
    lin += spec_.base_linear[r] * x[r];
  }
  return 0.5 * quad + lin + spec_.base_const;
}

double QuadraticFamily::component_value(std::size_t i, std::span<const double> x) const noexcept {
  const auto& bi = spec_.linear_offsets[i - 1];
  double extra = 0.0;
  for (std::size_t r = 0; r < spec_.dim; ++r) extra += bi[r] * x[r];
  return value(x) + extra;
}

std::string Family::name() const {
  return visit([](const auto& f) -> std::string {
    using T = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<T, PiecewiseFamily>) return "piecewise";
    else if constexpr (std::is_same_v<T, Product2DFamily>) return "product2d";
    else return "quadratic";
  });
}

std::size_t Family::size() const {
  return visit([](const auto& f) { return f.size(); });
}

std::size_t Family::dimension() const {
  return visit([](const auto& f) { return f.dimension(); });
}

void Family::check_point(const Point& x) const {
  if (x.size() != dimension()) {
    throw UsageError("point has dimension " + std::to_string(x.size()) + ", family expects " +
                     std::to_string(dimension()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw UsageError("point coordinates must be finite");
  }
}

void Family::check_index(std::size_t i) const {
  if (i < 1 || i > size()) {
    throw UsageError("component index " + std::to_string(i) + " outside 1.." +
                     std::to_string(size()));
  }
}

Point Family::component_grad(std::size_t i, const Point& x) const {
  check_index(i);
  check_point(x);
  Point out(x.size());
  visit([&](const auto& f) { f.component_grad(i, x, out); });
  return out;
}

Point Family::full_grad(const Point& x) const {
  check_point(x);
  Point out(x.size());
  visit([&](const auto& f) { f.full_grad(x, out); });
  return out;
}

double Family::eval(const Point& x) const {
  check_point(x);
  return visit([&](const auto& f) { return f.value(std::span<const double>(x)); });
}

double Family::eval_component(std::size_t i, const Point& x) const {
  check_index(i);
  check_point(x);
  return visit([&](const auto& f) { return f.component_value(i, std::span<const double>(x)); });
}

Point Family::minimizer() const {
  return visit([](const auto& f) { return f.minimizer(); });
}

AssumptionConstants Family::constants() const {
  return visit([](const auto& f) { return f.constants(); });
}

Family build_family(const FamilySpec& spec, std::size_t n) {
  return std::visit(
      [n](const auto& r) -> Family {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiecewiseRecipe>) {
          return PiecewiseFamily({n, r.l_left, r.g_lin});
        } else if constexpr (std::is_same_v<T, Product2DRecipe>) {
          return Product2DFamily(Product2DSpec::make(n, r.l_left, r.g_lin));
        } else {
          return QuadraticFamily(make_quadratic_spec(n, r.hessian, r.base_linear, r.base_const,
                                                     r.g_bound, r.d_bound, r.offsets_seed));
        }
      },
      spec);
}

std::size_t family_dimension(const FamilySpec& spec) {
  return std::visit(
      [](const auto& r) -> std::size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiecewiseRecipe>) return 1;
        else if constexpr (std::is_same_v<T, Product2DRecipe>) return 2;
        else return r.base_linear.size();
      },
      spec);
}

}  // namespace shufflesgd
