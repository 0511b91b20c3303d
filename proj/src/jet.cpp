#include "cupgeo/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cupgeo/errors.hpp"

namespace cupgeo {
namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw UnsupportedOrderError("jet order " + std::to_string(order) + " is not supported (max " +
                                std::to_string(kMaxJetOrder) + ")");
  }
}

void check_dims(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

}  // namespace

Jet::Jet(std::size_t dim, int order, double value) : n_(dim), order_(order), value_(value) {
  check_order(order);
  if (order >= 1) d1_.assign(n_, 0.0);
  if (order >= 2) d2_.assign(n_ * n_, 0.0);
  if (order >= 3) d3_.assign(n_ * n_ * n_, 0.0);
}

Jet Jet::variable(std::size_t dim, int order, std::size_t index, double value) {
  if (index >= dim) throw DimensionError("variable index out of range");
  Jet x(dim, order, value);
  if (order >= 1) x.d1_[index] = 1.0;
  return x;
}

std::vector<Jet> Jet::variables(const Point& p, int order) {
  std::vector<Jet> vars;
  vars.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) vars.push_back(variable(p.dim(), order, i, p[i]));
  return vars;
}

Jet Jet::partial(std::size_t i) const {
  if (order_ < 1) throw UnsupportedOrderError("cannot differentiate an order-0 jet");
  if (i >= n_) throw DimensionError("partial index out of range");
  Jet r(n_, order_ - 1, d1_[i]);
  if (order_ >= 2) {
    for (std::size_t j = 0; j < n_; ++j) r.d1_[j] = d(i, j);
  }
  if (order_ >= 3) {
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k) r.d(j, k) = d(i, j, k);
  }
  return r;
}

Jet Jet::truncated(int order) const {
  check_order(order);
  if (order >= order_) return *this;
  Jet r = *this;
  r.order_ = order;
  if (order < 3) r.d3_.clear();
  if (order < 2) r.d2_.clear();
  if (order < 1) r.d1_.clear();
  return r;
}

Jet Jet::compose(double g0, double g1, double g2, double g3) const {
  Jet r(n_, order_, g0);
  const std::size_t n = n_;
  if (order_ >= 1) {
    for (std::size_t i = 0; i < n; ++i) r.d1_[i] = g1 * d1_[i];
  }
  if (order_ >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r.d(i, j) = g2 * d1_[i] * d1_[j] + g1 * d(i, j);
  }
  if (order_ >= 3) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          r.d(i, j, k) = g3 * d1_[i] * d1_[j] * d1_[k] +
                         g2 * (d(i, j) * d1_[k] + d(i, k) * d1_[j] + d(j, k) * d1_[i]) +
                         g1 * d(i, j, k);
        }
  }
  return r;
}

bool Jet::is_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::isfinite(value_) && std::all_of(d1_.begin(), d1_.end(), finite) &&
         std::all_of(d2_.begin(), d2_.end(), finite) && std::all_of(d3_.begin(), d3_.end(), finite);
}

Jet& Jet::operator+=(const Jet& o) {
  check_dims(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  value_ += o.value_;
  for (std::size_t i = 0; i < d1_.size(); ++i) d1_[i] += o.d1_[i];
  for (std::size_t i = 0; i < d2_.size(); ++i) d2_[i] += o.d2_[i];
  for (std::size_t i = 0; i < d3_.size(); ++i) d3_[i] += o.d3_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_dims(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  value_ -= o.value_;
  for (std::size_t i = 0; i < d1_.size(); ++i) d1_[i] -= o.d1_[i];
  for (std::size_t i = 0; i < d2_.size(); ++i) d2_[i] -= o.d2_[i];
  for (std::size_t i = 0; i < d3_.size(); ++i) d3_[i] -= o.d3_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet& Jet::operator*=(double c) {
  value_ *= c;
  for (double& x : d1_) x *= c;
  for (double& x : d2_) x *= c;
  for (double& x : d3_) x *= c;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  r *= -1.0;
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

Jet operator*(const Jet& a, const Jet& b) {
  check_dims(a, b);
  const int order = std::min(a.order(), b.order());
  const std::size_t n = a.dim();
  Jet r(n, order, a.value() * b.value());
  const double av = a.value(), bv = b.value();
  if (order >= 1) {
    for (std::size_t i = 0; i < n; ++i) r.d(i) = a.d(i) * bv + av * b.d(i);
  }
  if (order >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        r.d(i, j) = a.d(i, j) * bv + a.d(i) * b.d(j) + a.d(j) * b.d(i) + av * b.d(i, j);
  }
  if (order >= 3) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          r.d(i, j, k) = a.d(i, j, k) * bv + a.d(i, j) * b.d(k) + a.d(i, k) * b.d(j) +
                         a.d(j, k) * b.d(i) + a.d(i) * b.d(j, k) + a.d(j) * b.d(i, k) +
                         a.d(k) * b.d(i, j) + av * b.d(i, j, k);
        }
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double c) { return a += c; }
Jet operator+(double c, Jet a) { return a += c; }
Jet operator-(Jet a, double c) { return a -= c; }
Jet operator-(double c, const Jet& a) { return -a + c; }
Jet operator*(Jet a, double c) { return a *= c; }
Jet operator*(double c, Jet a) { return a *= c; }
Jet operator/(Jet a, double c) { return a /= c; }
Jet operator/(double c, const Jet& a) { return reciprocal(a) * c; }

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  const double r = 1.0 / x;
  return a.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e, e);
}

Jet log(const Jet& a) {
  const double x = a.value();
  const double r = 1.0 / x;
  return a.compose(std::log(x), r, -r * r, 2.0 * r * r * r);
}

Jet sqrt(const Jet& a) {
  const double x = a.value();
  const double s = std::sqrt(x);
  return a.compose(s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x));
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s, -c);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c, s);
}

Jet pow(const Jet& a, double c) {
  const double x = a.value();
  // Falling-factorial coefficients; an exactly-zero coefficient kills the
  // term so that x^2 at x = 0 does not produce 0 * inf.
  double g[4];
  double coef = 1.0;
  for (int k = 0; k < 4; ++k) {
    g[k] = coef == 0.0 ? 0.0 : coef * std::pow(x, c - k);
    coef *= (c - k);
  }
  return a.compose(g[0], g[1], g[2], g[3]);
}

Jet pow(const Jet& a, const Jet& b) { return exp(b * log(a)); }

std::vector<Jet> invert(std::span<const Jet> matrix, std::size_t n) {
  if (matrix.size() != n * n) throw DimensionError("invert: matrix is not n x n");
  if (n == 0) return {};
  const std::size_t dim = matrix[0].dim();
  int order = kMaxJetOrder;
  for (const Jet& e : matrix) order = std::min(order, e.order());

  std::vector<Jet> a(matrix.begin(), matrix.end());
  std::vector<Jet> inv(n * n, Jet(dim, order));
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = Jet(dim, order, 1.0);

  for (std::size_t col = 0; col < n; ++col) {
    const Jet pivot_inv = reciprocal(a[col * n + col]);
    for (std::size_t j = 0; j < n; ++j) {
      a[col * n + j] = a[col * n + j] * pivot_inv;
      inv[col * n + j] = inv[col * n + j] * pivot_inv;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const Jet factor = a[row * n + col];
      for (std::size_t j = 0; j < n; ++j) {
        a[row * n + j] -= factor * a[col * n + j];
        inv[row * n + j] -= factor * inv[col * n + j];
      }
    }
  }
  return inv;
}

}  // namespace cupgeo
