#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cupgeo {

enum class Slot { covariant, contravariant };

inline constexpr std::size_t kMaxTensorRank = 4;

/// Dense tensor of rank <= 4 over an n-dimensional chart.
///
/// Components are stored row-major with slot 0 as the leftmost (slowest)
/// index, so Gamma^k_{ij} is stored at (k, i, j) with variance
/// (contravariant, covariant, covariant). A rank-0 tensor holds one scalar.
class Tensor {
 public:
  Tensor() = default;
  /// Zero tensor.
  Tensor(std::size_t dim, std::vector<Slot> variance);
  Tensor(std::size_t dim, std::vector<Slot> variance, std::vector<double> components);

  static Tensor scalar(double value);
  static Tensor covector(std::vector<double> components);
  /// Kronecker delta as a (contravariant, covariant) tensor.
  static Tensor kronecker(std::size_t dim);
  static Tensor cov2(std::size_t dim, std::vector<double> components);
  static Tensor contra2(std::size_t dim, std::vector<double> components);
  static Tensor cov3(std::size_t dim, std::vector<double> components);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return variance_.size(); }
  const std::vector<Slot>& variance() const noexcept { return variance_; }
  std::span<const double> components() const noexcept { return components_; }
  std::span<double> components() noexcept { return components_; }

  template <class... I>
  double& operator()(I... idx) {
    return components_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    return components_[offset({static_cast<std::size_t>(idx)...})];
  }

  /// Component of a rank-0 tensor.
  double scalar_value() const noexcept { return components_[0]; }

  double at(std::span<const std::size_t> idx) const { return components_[offset(idx)]; }
  double& at(std::span<const std::size_t> idx) { return components_[offset(idx)]; }

  /// Componentwise equality under every permutation of the slots.
  bool is_fully_symmetric(double tol = 0.0) const;

  double max_abs() const noexcept;

  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  Tensor& operator*=(double c) noexcept;

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double c) { return a *= c; }
  friend Tensor operator*(double c, Tensor a) { return a *= c; }

 private:
  std::size_t offset(std::span<const std::size_t> idx) const;
  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    return offset(std::span<const std::size_t>(idx.begin(), idx.size()));
  }

  std::size_t dim_ = 0;
  std::vector<Slot> variance_;
  std::vector<double> components_{0.0};
};

/// Sum over a contravariant and a covariant slot; rank drops by two.
Tensor contract(const Tensor& t, std::size_t slot_a, std::size_t slot_b);

/// Contracts a covariant slot of `t` with g^{-1}; that slot becomes
/// contravariant and keeps its position.
Tensor raise_index(const Tensor& t, std::size_t slot, const Tensor& g_inv);

/// Contracts a contravariant slot with g; the slot becomes covariant.
Tensor lower_index(const Tensor& t, std::size_t slot, const Tensor& g);

/// S_{ijk} = g_{ij} u_k + g_{jk} u_i + g_{ki} u_j (unnormalized cyclic sum).
Tensor symmetrize_cov3(const Tensor& u, const Tensor& g);

/// Inverse of a symmetric positive-definite covariant 2-tensor. Throws
/// SingularMetricError carrying the smallest eigenvalue otherwise.
Tensor invert_metric(const Tensor& g);

/// Smallest eigenvalue of a symmetric 2-tensor.
double min_eigenvalue(const Tensor& g);

/// max_i |a_i - b_i|; tensors must share shape.
double max_abs_difference(const Tensor& a, const Tensor& b);

/// max(1, max|a_i|, max|b_i|): normalization used by residual checks.
double residual_scale(const Tensor& a, const Tensor& b);

}  // namespace cupgeo
