#pragma once

#include <span>
#include <vector>

#include "cupgeo/field.hpp"
#include "cupgeo/model.hpp"
#include "cupgeo/tensor.hpp"

namespace cupgeo {

/// Connection coefficients Gamma^k_{ij}, stored at (k, i, j).
struct Christoffel {
  double alpha = 0.0;
  Tensor symbols;

  std::size_t dim() const noexcept { return symbols.dim(); }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const { return symbols(k, i, j); }
};

/// R^i_{jkl} at (i, j, k, l), Ric_{jl} = R^k_{jkl}, R = g^{jl} Ric_{jl}.
struct CurvaturePack {
  Tensor riemann;
  Tensor ricci;
  double scalar = 0.0;
};

/// Coupling k of the Ricci term in (nabla^alpha d + k Ric^alpha) f.
struct HessianSpec {
  double k = 0.0;

  /// k = 1/(n-1); throws DimensionError for n < 2.
  static HessianSpec cup_invariant(std::size_t dim);
};

/// Self-interaction lambda f^a with a != 0.
class NonlinearCoupling {
 public:
  NonlinearCoupling(ScalarField lambda, double a);

  const ScalarField& lambda() const noexcept { return lambda_; }
  double a() const noexcept { return a_; }

 private:
  ScalarField lambda_;
  double a_;
};

/// Every pointwise geometric quantity of (model, alpha) at one point.
///
/// Metric jets of order 2 and skewness jets of order 1 are pulled once;
/// the Christoffel symbols are then carried as order-1 jets so that the
/// curvature comes from exact derivatives of the closed-form connection.
class LocalGeometry {
 public:
  LocalGeometry(const ManifoldModel& model, double alpha, const Point& p);

  std::size_t dim() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }
  const Point& point() const noexcept { return p_; }

  const Tensor& metric() const noexcept { return g_; }
  const Tensor& metric_inverse() const noexcept { return g_inv_; }
  const Tensor& skewness() const noexcept { return t_; }
  const Christoffel& levi_civita() const noexcept { return levi_civita_; }
  const Christoffel& connection() const noexcept { return connection_; }
  const CurvaturePack& curvature() const noexcept { return curvature_; }

  /// (nabla^alpha g)_{kij} = d_k g_ij - Gamma^l_{ki} g_lj - Gamma^l_{kj} g_il.
  Tensor metric_derivative() const;

  /// (nabla^alpha w)_{ij} = d_i w_j - Gamma^k_{ij} w_k for a covector field
  /// given as order >= 1 jets of its components.
  Tensor covariant_derivative(std::span<const Jet> covector) const;

  Tensor alpha_hessian(const ScalarField& f) const;
  /// alpha_hessian(f) + k Ric^alpha f.
  Tensor modified_hessian(const HessianSpec& spec, const ScalarField& f) const;
  /// Trace form g^{ij}[(nabla^alpha df)_ij + Ric_ij f / (n-1)].
  double cup_laplacian(const ScalarField& f) const;
  /// div^alpha grad f + alpha g^{-1}.t.g^{-1}.df + R f / (n-1), built from
  /// the divergence of the gradient rather than the trace of the Hessian.
  double cup_laplacian_decomposed(const ScalarField& f) const;
  /// div^alpha(grad f).
  double alpha_laplacian(const ScalarField& f) const;
  double nonlinear_cup_operator(const ScalarField& f, const NonlinearCoupling& c) const;
  /// max |R^i_{jkl} - k (delta^i_k Ric_jl - delta^i_l Ric_jk)|.
  double integrability_residual(double k) const;

 private:
  void require_curvature_dim() const;
  double gamma(std::size_t k, std::size_t i, std::size_t j) const {
    return gamma_jets_[(k * n_ + i) * n_ + j].value();
  }

  std::size_t n_;
  double alpha_;
  Point p_;
  std::vector<Jet> g_jets_;
  std::vector<Jet> g_inv_jets_;
  std::vector<Jet> gamma_jets_;
  Tensor g_, g_inv_, t_;
  Christoffel levi_civita_, connection_;
  CurvaturePack curvature_;
};

Christoffel levi_civita(const ManifoldModel& model, const Point& p);
Christoffel alpha_connection(const ManifoldModel& model, double alpha, const Point& p);
Tensor covariant_derivative_metric(const ManifoldModel& model, double alpha, const Point& p);
CurvaturePack curvature(const ManifoldModel& model, double alpha, const Point& p);
Tensor riemann(const ManifoldModel& model, double alpha, const Point& p);
Tensor ricci(const ManifoldModel& model, double alpha, const Point& p);
double scalar_curvature(const ManifoldModel& model, double alpha, const Point& p);
Tensor alpha_hessian(const ManifoldModel& model, double alpha, const ScalarField& f, const Point& p);
Tensor modified_hessian(const ManifoldModel& model, double alpha, const HessianSpec& spec,
                        const ScalarField& f, const Point& p);
double cup_laplacian(const ManifoldModel& model, double alpha, const ScalarField& f, const Point& p);
double nonlinear_cup_operator(const ManifoldModel& model, double alpha, const ScalarField& f,
                              const NonlinearCoupling& coupling, const Point& p);
double integrability_residual(const ManifoldModel& model, double alpha, double k, const Point& p);

}  // namespace cupgeo
