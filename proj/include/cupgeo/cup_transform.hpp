#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cupgeo/field.hpp"
#include "cupgeo/geometry.hpp"
#include "cupgeo/model.hpp"
#include "cupgeo/tensor.hpp"

namespace cupgeo {

/// Conformal-projective rescaling generated by a potential phi:
/// eta = exp(-alpha phi) and psi = d phi, so d(log eta) = -alpha psi holds
/// by construction and psi is exact.
class CupRescaling {
 public:
  CupRescaling(double alpha, ScalarField potential, std::string potential_text = {});

  double alpha() const noexcept { return alpha_; }
  const ScalarField& potential() const noexcept { return potential_; }
  /// Source expression when the potential was parsed; empty otherwise.
  const std::string& potential_text() const noexcept { return text_; }
  std::size_t dim() const noexcept { return potential_.dim(); }

  Jet eta_jet(const Point& p, int order) const;
  double eta(const Point& p) const;
  /// Jets of the components of psi; needs the potential to order + 1.
  std::vector<Jet> psi_jets(const Point& p, int order) const;
  Tensor psi(const Point& p) const;

  /// The field eta^power as a scalar field on the same chart.
  ScalarField eta_power(double power) const;

 private:
  double alpha_;
  ScalarField potential_;
  std::string text_;
};

/// Throws DomainError if the potential is not finite at p.
CupRescaling make_rescaling(double alpha, ScalarField potential);

enum class SymNormalization {
  cyclic_sum,  // g_ij u_k + g_jk u_i + g_ki u_j
  averaged,    // the same sum divided by 3; only used as a negative control
};

/// g~ = eta g, t~ = eta (t + sym(g (x) psi)).
ManifoldModel rescaled_model(const ManifoldModel& model, const CupRescaling& resc,
                             SymNormalization sym = SymNormalization::cyclic_sum);

/// Scalar field carrying a weight r: f~ = eta^r f under rescaling.
struct WeightedDensity {
  ScalarField f;
  double weight = 1.0;
};

WeightedDensity transform_density(const WeightedDensity& d, const CupRescaling& resc);
/// lambda~ = lambda / eta^a.
NonlinearCoupling transform_coupling(const NonlinearCoupling& c, const CupRescaling& resc);

/// -alpha (delta^k_i psi_j + delta^k_j psi_i), shaped like Gamma^k_{ij}.
Tensor connection_shift_prediction(const CupRescaling& resc, const Point& p);

/// Q_ij = (nabla^alpha psi)_ij + alpha psi_i psi_j on the original model.
Tensor projective_shift_form(const LocalGeometry& geom, const CupRescaling& resc);

/// (n-1) alpha Q_ij.
Tensor ricci_shift_prediction(const ManifoldModel& model, const CupRescaling& resc, const Point& p);
Tensor ricci_shift_prediction(const LocalGeometry& geom, const CupRescaling& resc);

/// alpha (delta^i_k Q_lj - delta^i_l Q_kj), shaped like R^i_{jkl}. Its
/// contraction over (i, k) is the Ricci shift.
Tensor curvature_shift_prediction(const ManifoldModel& model, const CupRescaling& resc, const Point& p);
Tensor curvature_shift_prediction(const LocalGeometry& geom, const CupRescaling& resc);

/// Rescaling config: {"alpha": 1, "potential": "0.3*mu"}.
CupRescaling parse_rescaling(std::string_view config_text, const std::vector<std::string>& coords);
std::string serialize_rescaling(const CupRescaling& resc);

}  // namespace cupgeo
