#include "cupgeo/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cupgeo/errors.hpp"

namespace cupgeo {
namespace {

std::size_t ipow(std::size_t n, std::size_t r) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < r; ++i) p *= n;
  return p;
}

void require_same_shape(const Tensor& a, const Tensor& b) {
  if (a.variance() != b.variance() || (a.rank() > 0 && a.dim() != b.dim())) {
    throw DimensionError("tensor shapes differ");
  }
}

// Iterates every multi-index of the given rank in row-major order.
template <class F>
void for_each_index(std::size_t dim, std::size_t rank, F&& f) {
  std::array<std::size_t, kMaxTensorRank> idx{};
  const std::size_t total = ipow(dim, rank);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t s = rank; s-- > 0;) {
      idx[s] = rem % dim;
      rem /= dim;
    }
    f(std::span<const std::size_t>(idx.data(), rank), flat);
  }
}

Eigen::MatrixXd as_matrix(const Tensor& g) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(i, j);
  return m;
}

}  // namespace

Tensor::Tensor(std::size_t dim, std::vector<Slot> variance)
    : dim_(dim), variance_(std::move(variance)) {
  if (variance_.size() > kMaxTensorRank) throw DimensionError("tensor rank above 4");
  if (dim_ == 0 && !variance_.empty()) throw DimensionError("tensor dimension must be positive");
  components_.assign(ipow(dim_, variance_.size()), 0.0);
}

Tensor::Tensor(std::size_t dim, std::vector<Slot> variance, std::vector<double> components)
    : Tensor(dim, std::move(variance)) {
  if (components.size() != components_.size()) {
    throw DimensionError("tensor expects " + std::to_string(components_.size()) +
                         " components, got " + std::to_string(components.size()));
  }
  components_ = std::move(components);
}

Tensor Tensor::scalar(double value) { return Tensor(1, {}, {value}); }

Tensor Tensor::covector(std::vector<double> components) {
  const std::size_t n = components.size();
  return Tensor(n, {Slot::covariant}, std::move(components));
}

Tensor Tensor::kronecker(std::size_t dim) {
  Tensor d(dim, {Slot::contravariant, Slot::covariant});
  for (std::size_t i = 0; i < dim; ++i) d(i, i) = 1.0;
  return d;
}

Tensor Tensor::cov2(std::size_t dim, std::vector<double> c) {
  return Tensor(dim, {Slot::covariant, Slot::covariant}, std::move(c));
}

Tensor Tensor::contra2(std::size_t dim, std::vector<double> c) {
  return Tensor(dim, {Slot::contravariant, Slot::contravariant}, std::move(c));
}

Tensor Tensor::cov3(std::size_t dim, std::vector<double> c) {
  return Tensor(dim, {Slot::covariant, Slot::covariant, Slot::covariant}, std::move(c));
}

std::size_t Tensor::offset(std::span<const std::size_t> idx) const {
  if (idx.size() != variance_.size()) {
    throw DimensionError("expected " + std::to_string(variance_.size()) + " indices, got " +
                         std::to_string(idx.size()));
  }
  std::size_t off = 0;
  for (std::size_t i : idx) {
    if (i >= dim_) throw DimensionError("tensor index out of range");
    off = off * dim_ + i;
  }
  return off;
}

bool Tensor::is_fully_symmetric(double tol) const {
  const std::size_t r = rank();
  if (r < 2) return true;
  bool ok = true;
  for_each_index(dim_, r, [&](std::span<const std::size_t> idx, std::size_t flat) {
    if (!ok) return;
    std::array<std::size_t, kMaxTensorRank> perm{};
    std::copy(idx.begin(), idx.end(), perm.begin());
    std::sort(perm.begin(), perm.begin() + r);
    do {
      const double v = at(std::span<const std::size_t>(perm.data(), r));
      if (std::abs(v - components_[flat]) > tol) {
        ok = false;
        return;
      }
    } while (std::next_permutation(perm.begin(), perm.begin() + r));
  });
  return ok;
}

double Tensor::max_abs() const noexcept {
  double m = 0.0;
  for (double c : components_) m = std::max(m, std::abs(c));
  return m;
}

Tensor& Tensor::operator+=(const Tensor& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += o.components_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= o.components_[i];
  return *this;
}

Tensor& Tensor::operator*=(double c) noexcept {
  for (double& x : components_) x *= c;
  return *this;
}

Tensor contract(const Tensor& t, std::size_t slot_a, std::size_t slot_b) {
  const std::size_t r = t.rank();
  if (slot_a >= r || slot_b >= r || slot_a == slot_b) {
    throw DimensionError("contract: invalid slot pair");
  }
  if (t.variance()[slot_a] == t.variance()[slot_b]) {
    throw VarianceError("contract: slots must have opposite variance");
  }
  std::vector<Slot> variance;
  for (std::size_t s = 0; s < r; ++s) {
    if (s != slot_a && s != slot_b) variance.push_back(t.variance()[s]);
  }
  const std::size_t n = t.dim();
  Tensor out(n, variance);
  std::array<std::size_t, kMaxTensorRank> full{};
  for_each_index(n, r - 2, [&](std::span<const std::size_t> idx, std::size_t flat) {
    double sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      std::size_t k = 0;
      for (std::size_t s = 0; s < r; ++s) full[s] = (s == slot_a || s == slot_b) ? m : idx[k++];
      sum += t.at(std::span<const std::size_t>(full.data(), r));
    }
    out.components()[flat] = sum;
  });
  return out;
}

namespace {

Tensor change_slot(const Tensor& t, std::size_t slot, const Tensor& form, Slot from, Slot to) {
  const std::size_t r = t.rank();
  if (slot >= r) throw DimensionError("slot out of range");
  if (t.variance()[slot] != from) throw VarianceError("slot has the wrong variance");
  if (form.dim() != t.dim() || form.rank() != 2) throw DimensionError("metric shape mismatch");
  std::vector<Slot> variance = t.variance();
  variance[slot] = to;
  Tensor out(t.dim(), variance);
  std::array<std::size_t, kMaxTensorRank> src{};
  for_each_index(t.dim(), r, [&](std::span<const std::size_t> idx, std::size_t flat) {
    std::copy(idx.begin(), idx.end(), src.begin());
    double sum = 0.0;
    for (std::size_t m = 0; m < t.dim(); ++m) {
      src[slot] = m;
      sum += form(idx[slot], m) * t.at(std::span<const std::size_t>(src.data(), r));
    }
    out.components()[flat] = sum;
  });
  return out;
}

}  // namespace

Tensor raise_index(const Tensor& t, std::size_t slot, const Tensor& g_inv) {
  if (g_inv.variance() != std::vector<Slot>{Slot::contravariant, Slot::contravariant}) {
    throw VarianceError("raise_index needs a contravariant 2-tensor");
  }
  return change_slot(t, slot, g_inv, Slot::covariant, Slot::contravariant);
}

Tensor lower_index(const Tensor& t, std::size_t slot, const Tensor& g) {
  if (g.variance() != std::vector<Slot>{Slot::covariant, Slot::covariant}) {
    throw VarianceError("lower_index needs a covariant 2-tensor");
  }
  return change_slot(t, slot, g, Slot::contravariant, Slot::covariant);
}

Tensor symmetrize_cov3(const Tensor& u, const Tensor& g) {
  if (u.rank() != 1 || g.rank() != 2 || u.dim() != g.dim()) {
    throw DimensionError("symmetrize_cov3: need a covector and a 2-tensor of equal dimension");
  }
  const std::size_t n = u.dim();
  Tensor s(n, {Slot::covariant, Slot::covariant, Slot::covariant});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        // Evaluated at the sorted index triple so every permutation gets
        // the bitwise-identical sum.
        std::array<std::size_t, 3> x{i, j, k};
        std::sort(x.begin(), x.end());
        s(i, j, k) = g(x[0], x[1]) * u(x[2]) + g(x[1], x[2]) * u(x[0]) + g(x[0], x[2]) * u(x[1]);
      }
  return s;
}

double min_eigenvalue(const Tensor& g) {
  if (g.rank() != 2) throw DimensionError("min_eigenvalue needs a 2-tensor");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(as_matrix(g), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Tensor invert_metric(const Tensor& g) {
  if (g.variance() != std::vector<Slot>{Slot::covariant, Slot::covariant}) {
    throw VarianceError("invert_metric needs a covariant 2-tensor");
  }
  const std::size_t n = g.dim();
  const Eigen::MatrixXd m = as_matrix(g);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw SingularMetricError("metric is not symmetric", std::nan(""));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    const double lmin = min_eigenvalue(g);
    throw SingularMetricError("metric is not positive-definite (smallest eigenvalue " +
                                  std::to_string(lmin) + ")",
                              lmin);
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  Tensor out(n, {Slot::contravariant, Slot::contravariant});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = 0.5 * (inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                         inv(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
  return out;
}

double max_abs_difference(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.components().size(); ++i) {
    m = std::max(m, std::abs(a.components()[i] - b.components()[i]));
  }
  return m;
}

double residual_scale(const Tensor& a, const Tensor& b) {
  return std::max({1.0, a.max_abs(), b.max_abs()});
}

}  // namespace cupgeo
