#include "cupgeo/geometry.hpp"

#include <cmath>
#include <string>

#include "cupgeo/errors.hpp"

namespace cupgeo {

HessianSpec HessianSpec::cup_invariant(std::size_t dim) {
  if (dim < 2) throw DimensionError("k = 1/(n-1) is undefined for n = 1");
  return {1.0 / static_cast<double>(dim - 1)};
}

NonlinearCoupling::NonlinearCoupling(ScalarField lambda, double a) : lambda_(std::move(lambda)), a_(a) {
  if (a == 0.0 || !std::isfinite(a)) throw ConfigError("nonlinear exponent a must be finite and nonzero");
}

LocalGeometry::LocalGeometry(const ManifoldModel& model, double alpha, const Point& p)
    : n_(model.dim()), alpha_(alpha), p_(p) {
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  const std::size_t n = n_;
  g_jets_ = model.metric_jets(p, 2);
  const std::vector<Jet> t_jets = model.skewness_jets(p, 1);

  g_ = values_of(g_jets_, n, {Slot::covariant, Slot::covariant});
  t_ = values_of(t_jets, n, {Slot::covariant, Slot::covariant, Slot::covariant});
  g_inv_ = invert_metric(g_);  // rejects non-positive-definite metrics

  std::vector<Jet> g1;
  g1.reserve(n * n);
  for (const Jet& j : g_jets_) g1.push_back(j.truncated(1));
  g_inv_jets_ = invert(g1, n);

  // First-kind symbols c_{ijl} = (d_i g_jl + d_j g_il - d_l g_ij) / 2.
  std::vector<Jet> first_kind(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        first_kind[(i * n + j) * n + l] =
            0.5 * (g_jets_[j * n + l].partial(i) + g_jets_[i * n + l].partial(j) -
                   g_jets_[i * n + j].partial(l));
      }

  gamma_jets_.assign(n * n * n, Jet(n, 1));
  levi_civita_ = {0.0, Tensor(n, {Slot::contravariant, Slot::covariant, Slot::covariant})};
  connection_ = {alpha, levi_civita_.symbols};
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Jet lc(n, 1);
        Jet skew(n, 1);
        for (std::size_t l = 0; l < n; ++l) {
          lc += g_inv_jets_[k * n + l] * first_kind[(i * n + j) * n + l];
          skew += t_jets[(i * n + j) * n + l] * g_inv_jets_[l * n + k];
        }
        levi_civita_.symbols(k, i, j) = lc.value();
        Jet full = lc - (0.5 * alpha) * skew;
        connection_.symbols(k, i, j) = full.value();
        gamma_jets_[(k * n + i) * n + j] = std::move(full);
      }

  // R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
  Tensor riem(n, {Slot::contravariant, Slot::covariant, Slot::covariant, Slot::covariant});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double r = gamma_jets_[(i * n + l) * n + j].d(k) - gamma_jets_[(i * n + k) * n + j].d(l);
          for (std::size_t m = 0; m < n; ++m) {
            r += gamma(i, k, m) * gamma(m, l, j) - gamma(i, l, m) * gamma(m, k, j);
          }
          riem(i, j, k, l) = r;
        }
  Tensor ric = contract(riem, 0, 2);
  double scalar = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) scalar += g_inv_(j, l) * ric(j, l);
  curvature_ = {std::move(riem), std::move(ric), scalar};
}

Tensor LocalGeometry::metric_derivative() const {
  const std::size_t n = n_;
  Tensor out(n, {Slot::covariant, Slot::covariant, Slot::covariant});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double v = g_jets_[i * n + j].d(k);
        for (std::size_t l = 0; l < n; ++l) v -= gamma(l, k, i) * g_(l, j) + gamma(l, k, j) * g_(i, l);
        out(k, i, j) = v;
      }
  return out;
}

Tensor LocalGeometry::covariant_derivative(std::span<const Jet> w) const {
  const std::size_t n = n_;
  if (w.size() != n) throw DimensionError("covector has the wrong number of components");
  Tensor out(n, {Slot::covariant, Slot::covariant});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = w[j].d(i);
      for (std::size_t k = 0; k < n; ++k) v -= gamma(k, i, j) * w[k].value();
      out(i, j) = v;
    }
  return out;
}

Tensor LocalGeometry::alpha_hessian(const ScalarField& f) const {
  const std::size_t n = n_;
  const Jet fj = f.jet(p_, 2);
  Tensor out(n, {Slot::covariant, Slot::covariant});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = fj.d(i, j);
      for (std::size_t k = 0; k < n; ++k) v -= gamma(k, i, j) * fj.d(k);
      out(i, j) = v;
    }
  return out;
}

Tensor LocalGeometry::modified_hessian(const HessianSpec& spec, const ScalarField& f) const {
  Tensor h = alpha_hessian(f);
  if (spec.k != 0.0) h += (spec.k * f.value(p_)) * curvature_.ricci;
  return h;
}

void LocalGeometry::require_curvature_dim() const {
  if (n_ < 2) throw DimensionError("curvature-coupled operators need n >= 2 (k = 1/(n-1))");
}

double LocalGeometry::cup_laplacian(const ScalarField& f) const {
  require_curvature_dim();
  const Tensor d = modified_hessian(HessianSpec::cup_invariant(n_), f);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) sum += g_inv_(i, j) * d(i, j);
  return sum;
}

double LocalGeometry::alpha_laplacian(const ScalarField& f) const {
  const std::size_t n = n_;
  const Jet fj = f.jet(p_, 2);
  // V^i = g^{ij} d_j f, divergence d_i V^i + Gamma^i_{ik} V^k.
  std::vector<double> v(n, 0.0);
  double div = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      v[i] += g_inv_(i, j) * fj.d(j);
      div += g_inv_jets_[i * n + j].d(i) * fj.d(j) + g_inv_(i, j) * fj.d(i, j);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) div += gamma(i, i, k) * v[k];
  return div;
}

double LocalGeometry::cup_laplacian_decomposed(const ScalarField& f) const {
  require_curvature_dim();
  const std::size_t n = n_;
  const Jet fj = f.jet(p_, 1);
  double correction = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t j = 0; j < n; ++j) correction += g_inv_(i, a) * g_inv_(j, b) * t_(i, a, b) * fj.d(j);
  return alpha_laplacian(f) + alpha_ * correction +
         curvature_.scalar * fj.value() / static_cast<double>(n - 1);
}

double LocalGeometry::nonlinear_cup_operator(const ScalarField& f, const NonlinearCoupling& c) const {
  const double fv = f.value(p_);
  const double a = c.a();
  if (fv < 0.0 && a != std::floor(a)) {
    throw DomainError("f^a with negative f and fractional a at " + p_.to_string());
  }
  const double power = std::pow(fv, a);
  if (!std::isfinite(power)) throw DomainError("f^a is not finite at " + p_.to_string());
  return cup_laplacian(f) + c.lambda().value(p_) * power;
}

double LocalGeometry::integrability_residual(double k) const {
  require_curvature_dim();
  const std::size_t n = n_;
  const Tensor& R = curvature_.riemann;
  const Tensor& Ric = curvature_.ricci;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          const double rhs = k * ((i == a ? Ric(j, b) : 0.0) - (i == b ? Ric(j, a) : 0.0));
          worst = std::max(worst, std::abs(R(i, j, a, b) - rhs));
        }
  return worst;
}

Christoffel levi_civita(const ManifoldModel& model, const Point& p) {
  return LocalGeometry(model, 0.0, p).levi_civita();
}

Christoffel alpha_connection(const ManifoldModel& model, double alpha, const Point& p) {
  return LocalGeometry(model, alpha, p).connection();
}

Tensor covariant_derivative_metric(const ManifoldModel& model, double alpha, const Point& p) {
  return LocalGeometry(model, alpha, p).metric_derivative();
}

CurvaturePack curvature(const ManifoldModel& model, double alpha, const Point& p) {
  return LocalGeometry(model, alpha, p).curvature();
}

Tensor riemann(const ManifoldModel& model, double alpha, const Point& p) {
  return curvature(model, alpha, p).riemann;
}

Tensor ricci(const ManifoldModel& model, double alpha, const Point& p) {
  return curvature(model, alpha, p).ricci;
}

double scalar_curvature(const ManifoldModel& model, double alpha, const Point& p) {
  return curvature(model, alpha, p).scalar;
}

Tensor alpha_hessian(const ManifoldModel& model, double alpha, const ScalarField& f, const Point& p) {
  return LocalGeometry(model, alpha, p).alpha_hessian(f);
}

Tensor modified_hessian(const ManifoldModel& model, double alpha, const HessianSpec& spec,
                        const ScalarField& f, const Point& p) {
  return LocalGeometry(model, alpha, p).modified_hessian(spec, f);
}

double cup_laplacian(const ManifoldModel& model, double alpha, const ScalarField& f, const Point& p) {
  if (model.dim() < 2) throw DimensionError("the c-cup-p Laplacian needs n >= 2");
  return LocalGeometry(model, alpha, p).cup_laplacian(f);
}

double nonlinear_cup_operator(const ManifoldModel& model, double alpha, const ScalarField& f,
                              const NonlinearCoupling& coupling, const Point& p) {
  if (model.dim() < 2) throw DimensionError("the c-cup-p Laplacian needs n >= 2");
  return LocalGeometry(model, alpha, p).nonlinear_cup_operator(f, coupling);
}

double integrability_residual(const ManifoldModel& model, double alpha, double k, const Point& p) {
  if (model.dim() < 2) throw DimensionError("integrability residual needs n >= 2");
  return LocalGeometry(model, alpha, p).integrability_residual(k);
}

}  // namespace cupgeo
