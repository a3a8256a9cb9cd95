#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace shufflesgd {

using Point = std::vector<double>;

double squared_norm(std::span<const double> x);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Strong convexity, smoothness, gradient cap and domain radius of a family.
struct AssumptionConstants {
  double mu = 1.0;
  double l_smooth = 1.0;
  double g_bound = 1.0;
  double d_bound = 1.0;
};

// ---------------------------------------------------------------------------
// Lower-bound construction. F(x) = x^2/2 for x >= 0 and L x^2/2 for x < 0;
// components 1..n/2 add +G x/2 ("first kind"), the rest add -G x/2.
// At the kink x = 0 the x >= 0 branch is used.

struct PiecewiseFamilySpec {
  std::size_t n = 2;
  double l_left = 1.0;
  double g_lin = 1.0;
};

class PiecewiseFamily {
 public:
  // Throws UsageError for odd or zero n, l_left < 1 or g_lin <= 0.
  explicit PiecewiseFamily(const PiecewiseFamilySpec& spec);

  const PiecewiseFamilySpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return spec_.n; }
  static constexpr std::size_t dimension() noexcept { return 1; }

  bool first_kind(std::size_t i) const noexcept { return i <= spec_.n / 2; }

  double curvature(double x) const noexcept { return x < 0.0 ? spec_.l_left : 1.0; }

  // Scalar forms; i is 1-based and unchecked.
  double grad(std::size_t i, double x) const noexcept {
    return curvature(x) * x + (first_kind(i) ? half_g_ : -half_g_);
  }
  double full_grad(double x) const noexcept { return curvature(x) * x; }
  double value(double x) const noexcept { return 0.5 * curvature(x) * x * x; }
  double component_value(std::size_t i, double x) const noexcept {
    return value(x) + (first_kind(i) ? half_g_ : -half_g_) * x;
  }

  void component_grad(std::size_t i, std::span<const double> x, std::span<double> out) const noexcept {
    out[0] = grad(i, x[0]);
  }
  void full_grad(std::span<const double> x, std::span<double> out) const noexcept {
    out[0] = full_grad(x[0]);
  }
  double value(std::span<const double> x) const noexcept { return value(x[0]); }
  double component_value(std::size_t i, std::span<const double> x) const noexcept {
    return component_value(i, x[0]);
  }

  Point minimizer() const { return {0.0}; }
  AssumptionConstants constants() const noexcept;

 private:
  PiecewiseFamilySpec spec_;
  double half_g_;
};

// ---------------------------------------------------------------------------
// Two-dimensional product: component i is f_{1,i}(x1) + f_{2,i}(x2) where the
// first factor uses curvature L on x < 0 and the second uses curvature 1.

struct Product2DSpec {
  PiecewiseFamilySpec first;
  PiecewiseFamilySpec second;

  static Product2DSpec make(std::size_t n, double l_left, double g_lin) {
    return {{n, l_left, g_lin}, {n, 1.0, g_lin}};
  }
};

class Product2DFamily {
 public:
  // Both factors must share n.
  explicit Product2DFamily(const Product2DSpec& spec);

  const Product2DSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return first_.size(); }
  static constexpr std::size_t dimension() noexcept { return 2; }

  const PiecewiseFamily& first() const noexcept { return first_; }
  const PiecewiseFamily& second() const noexcept { return second_; }

  void component_grad(std::size_t i, std::span<const double> x, std::span<double> out) const noexcept {
    out[0] = first_.grad(i, x[0]);
    out[1] = second_.grad(i, x[1]);
  }
  void full_grad(std::span<const double> x, std::span<double> out) const noexcept {
    out[0] = first_.full_grad(x[0]);
    out[1] = second_.full_grad(x[1]);
  }
  double value(std::span<const double> x) const noexcept {
    return first_.value(x[0]) + second_.value(x[1]);
  }
  double component_value(std::size_t i, std::span<const double> x) const noexcept {
    return first_.component_value(i, x[0]) + second_.component_value(i, x[1]);
  }

  Point minimizer() const { return {0.0, 0.0}; }
  // mu = 1, L = max curvature; G and D are the per-axis caps scaled by sqrt(2)
  // (the sup-norm box of the 1-D domains, measured in the Euclidean norm).
  AssumptionConstants constants() const noexcept;

 private:
  Product2DSpec spec_;
  PiecewiseFamily first_;
  PiecewiseFamily second_;
};

// ---------------------------------------------------------------------------
// Quadratic family sharing one Hessian:
//   f_i(x) = x'Hx/2 + (b + b_i)'x + c,  sum_i b_i = 0,  F = mean_i f_i.

struct QuadraticFamilySpec {
  std::size_t n = 1;
  std::size_t dim = 1;
  std::vector<double> hessian;               // dim x dim, row-major, symmetric
  std::vector<std::vector<double>> linear_offsets;  // n vectors b_i
  std::vector<double> base_linear;           // b
  double base_const = 0.0;                   // c
  // Gradient cap near x* and domain radius reported by constants(); the
  // offsets are generated so that max |b_i| <= g_bound / 2.
  double g_bound = 1.0;
  double d_bound = 1.0;
};

// Fills linear_offsets for n components: n-1 vectors uniform on
// [-G/2, G/2]^dim from derive_stream(offsets_seed, 0, 0), the last one the
// negated sum, all rescaled so that max |b_i| <= G/2. With n = 1 the single
// offset is zero.
QuadraticFamilySpec make_quadratic_spec(std::size_t n, std::vector<double> hessian,
                                        std::vector<double> base_linear, double base_const,
                                        double g_bound, double d_bound,
                                        std::uint64_t offsets_seed);

class QuadraticFamily {
 public:
  // Validates shapes and symmetry, requires all eigenvalues of H > 0 and
  // sum_i b_i = 0 (to 1e-12 relative), then solves H x* = -b.
  explicit QuadraticFamily(QuadraticFamilySpec spec);

  const QuadraticFamilySpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return spec_.n; }
  std::size_t dimension() const noexcept { return spec_.dim; }

  void component_grad(std::size_t i, std::span<const double> x, std::span<double> out) const noexcept {
    full_grad(x, out);
    const auto& bi = spec_.linear_offsets[i - 1];
    for (std::size_t r = 0; r < spec_.dim; ++r) out[r] += bi[r];
  }
  void full_grad(std::span<const double> x, std::span<double> out) const noexcept {
    const std::size_t d = spec_.dim;
    for (std::size_t r = 0; r < d; ++r) {
      double acc = spec_.base_linear[r];
      for (std::size_t c = 0; c < d; ++c) acc += spec_.hessian[r * d + c] * x[c];
      out[r] = acc;
    }
  }
  double value(std::span<const double> x) const noexcept;
  double component_value(std::size_t i, std::span<const double> x) const noexcept;

  Point minimizer() const { return minimizer_; }
  AssumptionConstants constants() const noexcept { return constants_; }

 private:
  QuadraticFamilySpec spec_;
  Point minimizer_;
  AssumptionConstants constants_;
};

// ---------------------------------------------------------------------------
// Type-erased family. Immutable once built; safe to share across threads.

class Family {
 public:
  using Variant = std::variant<PiecewiseFamily, Product2DFamily, QuadraticFamily>;

  Family(PiecewiseFamily f) : impl_(std::move(f)) {}
  Family(Product2DFamily f) : impl_(std::move(f)) {}
  Family(QuadraticFamily f) : impl_(std::move(f)) {}

  template <class Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), impl_);
  }
  const Variant& variant() const noexcept { return impl_; }

  std::string name() const;
  std::size_t size() const;
  std::size_t dimension() const;

  // Checked, allocating wrappers. i is 1-based; out-of-range i and
  // dimension mismatches throw UsageError.
  Point component_grad(std::size_t i, const Point& x) const;
  Point full_grad(const Point& x) const;
  double eval(const Point& x) const;
  double eval_component(std::size_t i, const Point& x) const;
  Point minimizer() const;
  AssumptionConstants constants() const;

 private:
  void check_point(const Point& x) const;
  void check_index(std::size_t i) const;

  Variant impl_;
};

// Family recipe without a fixed n, for sweeps over the component count.
struct QuadraticRecipe {
  std::vector<double> hessian{1.0};
  std::vector<double> base_linear{0.0};
  double base_const = 0.0;
  double g_bound = 1.0;
  double d_bound = 1.0;
  std::uint64_t offsets_seed = 0;
};

struct PiecewiseRecipe {
  double l_left = 4.0;
  double g_lin = 1.0;
};

struct Product2DRecipe {
  double l_left = 4.0;
  double g_lin = 1.0;
};

using FamilySpec = std::variant<PiecewiseRecipe, Product2DRecipe, QuadraticRecipe>;

Family build_family(const FamilySpec& spec, std::size_t n);
std::size_t family_dimension(const FamilySpec& spec);

}  // namespace shufflesgd
