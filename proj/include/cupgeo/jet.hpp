#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cupgeo/point.hpp"

namespace cupgeo {

inline constexpr int kMaxJetOrder = 3;

/// Value and all mixed partial derivatives up to `order` (at most 3) of a
/// scalar quantity depending on n chart coordinates.
///
/// Partials are stored densely (n, n^2 and n^3 entries) and stay symmetric
/// under index permutation because every operation is built from symmetric
/// Leibniz / Faa di Bruno sums. Binary operations truncate to the smaller
/// order of their operands.
class Jet {
 public:
  Jet() = default;
  /// Constant jet: all partials zero.
  Jet(std::size_t dim, int order, double value = 0.0);

  /// The coordinate function x_index, seeded with unit first partial.
  static Jet variable(std::size_t dim, int order, std::size_t index, double value);

  /// Seeds one variable jet per coordinate of `p`.
  static std::vector<Jet> variables(const Point& p, int order);

  std::size_t dim() const noexcept { return n_; }
  int order() const noexcept { return order_; }

  double value() const noexcept { return value_; }
  double d(std::size_t i) const { return d1_[i]; }
  double d(std::size_t i, std::size_t j) const { return d2_[i * n_ + j]; }
  double d(std::size_t i, std::size_t j, std::size_t k) const { return d3_[(i * n_ + j) * n_ + k]; }

  void set_value(double v) noexcept { value_ = v; }
  double& d(std::size_t i) { return d1_[i]; }
  double& d(std::size_t i, std::size_t j) { return d2_[i * n_ + j]; }
  double& d(std::size_t i, std::size_t j, std::size_t k) { return d3_[(i * n_ + j) * n_ + k]; }

  /// Jet of the partial derivative along coordinate i; order drops by one.
  Jet partial(std::size_t i) const;

  /// Same jet with partials above `order` discarded.
  Jet truncated(int order) const;

  /// Composition g(this) for a univariate g with derivatives g0..g3 evaluated
  /// at value().
  Jet compose(double g0, double g1, double g2, double g3) const;

  bool is_finite() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double c) noexcept { value_ += c; return *this; }
  Jet& operator-=(double c) noexcept { value_ -= c; return *this; }
  Jet& operator*=(double c);
  Jet& operator/=(double c) { return *this *= 1.0 / c; }

  Jet operator-() const;

 private:
  std::size_t n_ = 0;
  int order_ = 0;
  double value_ = 0.0;
  std::vector<double> d1_, d2_, d3_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double c);
Jet operator+(double c, Jet a);
Jet operator-(Jet a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(Jet a, double c);
Jet operator*(double c, Jet a);
Jet operator/(Jet a, double c);
Jet operator/(double c, const Jet& a);

Jet reciprocal(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
/// a^c for constant c; defined for negative a when c is an integer.
Jet pow(const Jet& a, double c);
Jet pow(const Jet& a, const Jet& b);

/// Inverse of a dense n x n matrix of jets (row-major). The value-level
/// matrix must be nonsingular; no pivoting is done, so callers pass
/// positive-definite matrices.
std::vector<Jet> invert(std::span<const Jet> matrix, std::size_t n);

}  // namespace cupgeo
