#include "cupgeo/cup_transform.hpp"

#include <cmath>

#include "cupgeo/errors.hpp"
#include "cupgeo/expression.hpp"
#include "json.hpp"

namespace cupgeo {

CupRescaling::CupRescaling(double alpha, ScalarField potential, std::string potential_text)
    : alpha_(alpha), potential_(std::move(potential)), text_(std::move(potential_text)) {
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (!potential_.valid()) throw ConfigError("rescaling needs a potential");
}

Jet CupRescaling::eta_jet(const Point& p, int order) const {
  return exp(-alpha_ * potential_.jet(p, order));
}

double CupRescaling::eta(const Point& p) const { return std::exp(-alpha_ * potential_.value(p)); }

std::vector<Jet> CupRescaling::psi_jets(const Point& p, int order) const {
  const Jet phi = potential_.jet(p, order + 1);
  std::vector<Jet> psi;
  psi.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) psi.push_back(phi.partial(i));
  return psi;
}

Tensor CupRescaling::psi(const Point& p) const {
  const Jet phi = potential_.jet(p, 1);
  std::vector<double> c(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) c[i] = phi.d(i);
  return Tensor::covector(std::move(c));
}

ScalarField CupRescaling::eta_power(double power) const {
  const double scale = -alpha_ * power;
  ScalarField phi = potential_;
  return ScalarField::composite(
      phi.dim(), [phi, scale](std::span<const Jet> vars) { return exp(scale * phi.jet(vars)); },
      phi.mode());
}

CupRescaling make_rescaling(double alpha, ScalarField potential) {
  return CupRescaling(alpha, std::move(potential));
}

ManifoldModel rescaled_model(const ManifoldModel& model, const CupRescaling& resc, SymNormalization sym) {
  if (resc.dim() != model.dim()) {
    throw DimensionError("rescaling potential is defined on a " + std::to_string(resc.dim()) +
                         "-dimensional chart, model '" + model.name() + "' has " +
                         std::to_string(model.dim()));
  }
  const std::size_t n = model.dim();
  const double sym_factor = sym == SymNormalization::averaged ? 1.0 / 3.0 : 1.0;

  auto metric = [model, resc](const Point& p, int order) {
    const Jet eta = resc.eta_jet(p, order);
    std::vector<Jet> g = model.metric_jets(p, order);
    for (Jet& c : g) c = eta * c;
    return g;
  };
  auto skewness = [model, resc, n, sym_factor](const Point& p, int order) {
    const Jet eta = resc.eta_jet(p, order);
    const std::vector<Jet> g = model.metric_jets(p, order);
    const std::vector<Jet> psi = resc.psi_jets(p, order);
    std::vector<Jet> t = model.skewness_jets(p, order);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          Jet s = g[i * n + j] * psi[k] + g[j * n + k] * psi[i] + g[k * n + i] * psi[j];
          Jet& c = t[(i * n + j) * n + k];
          c = eta * (c + sym_factor * s);
        }
    return t;
  };
  const DiffMode mode = (model.mode() == DiffMode::finite_difference ||
                         resc.potential().mode() == DiffMode::finite_difference)
                            ? DiffMode::finite_difference
                            : DiffMode::jet;
  return ManifoldModel(model.name() + "~", model.coord_names(), model.domain(), metric, skewness, mode);
}

WeightedDensity transform_density(const WeightedDensity& d, const CupRescaling& resc) {
  if (d.f.dim() != resc.dim()) throw DimensionError("density and rescaling live on different charts");
  if (d.weight == 0.0) return d;
  const ScalarField scale = resc.eta_power(d.weight);
  const ScalarField f = d.f;
  const DiffMode mode = (f.mode() == DiffMode::finite_difference || scale.mode() == DiffMode::finite_difference)
                            ? DiffMode::finite_difference
                            : DiffMode::jet;
  return {ScalarField::composite(
              f.dim(), [scale, f](std::span<const Jet> vars) { return scale.jet(vars) * f.jet(vars); }, mode),
          d.weight};
}

NonlinearCoupling transform_coupling(const NonlinearCoupling& c, const CupRescaling& resc) {
  if (c.lambda().dim() != resc.dim()) throw DimensionError("coupling and rescaling live on different charts");
  const ScalarField scale = resc.eta_power(-c.a());
  const ScalarField lambda = c.lambda();
  const DiffMode mode =
      (lambda.mode() == DiffMode::finite_difference || scale.mode() == DiffMode::finite_difference)
          ? DiffMode::finite_difference
          : DiffMode::jet;
  return NonlinearCoupling(
      ScalarField::composite(
          lambda.dim(), [scale, lambda](std::span<const Jet> vars) { return scale.jet(vars) * lambda.jet(vars); },
          mode),
      c.a());
}

Tensor connection_shift_prediction(const CupRescaling& resc, const Point& p) {
  const Tensor psi = resc.psi(p);
  const std::size_t n = p.dim();
  const double a = resc.alpha();
  Tensor shift(n, {Slot::contravariant, Slot::covariant, Slot::covariant});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        shift(k, i, j) = -a * ((k == i ? psi(j) : 0.0) + (k == j ? psi(i) : 0.0));
      }
  return shift;
}

Tensor projective_shift_form(const LocalGeometry& geom, const CupRescaling& resc) {
  if (geom.alpha() != resc.alpha()) {
    throw ConfigError("geometry and rescaling use different alpha values");
  }
  const std::vector<Jet> psi = resc.psi_jets(geom.point(), 1);
  Tensor q = geom.covariant_derivative(psi);
  const std::size_t n = geom.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) += resc.alpha() * psi[i].value() * psi[j].value();
  return q;
}

Tensor ricci_shift_prediction(const LocalGeometry& geom, const CupRescaling& resc) {
  const double factor = static_cast<double>(geom.dim() - 1) * resc.alpha();
  if (factor == 0.0) return Tensor(geom.dim(), {Slot::covariant, Slot::covariant});
  return factor * projective_shift_form(geom, resc);
}

Tensor ricci_shift_prediction(const ManifoldModel& model, const CupRescaling& resc, const Point& p) {
  return ricci_shift_prediction(LocalGeometry(model, resc.alpha(), p), resc);
}

Tensor curvature_shift_prediction(const LocalGeometry& geom, const CupRescaling& resc) {
  const std::size_t n = geom.dim();
  Tensor out(n, {Slot::contravariant, Slot::covariant, Slot::covariant, Slot::covariant});
  const double a = resc.alpha();
  if (a == 0.0) return out;
  const Tensor q = projective_shift_form(geom, resc);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          out(i, j, k, l) = a * ((i == k ? q(l, j) : 0.0) - (i == l ? q(k, j) : 0.0));
        }
  return out;
}

Tensor curvature_shift_prediction(const ManifoldModel& model, const CupRescaling& resc, const Point& p) {
  return curvature_shift_prediction(LocalGeometry(model, resc.alpha(), p), resc);
}

CupRescaling parse_rescaling(std::string_view config_text, const std::vector<std::string>& coords) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("rescaling config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("alpha") || !doc.contains("potential")) {
    throw ConfigError("rescaling config needs 'alpha' and 'potential'");
  }
  if (!doc.at("alpha").is_number() || !doc.at("potential").is_string()) {
    throw ConfigError("rescaling 'alpha' must be a number and 'potential' an expression string");
  }
  const std::string text = doc.at("potential").get<std::string>();
  const Expression e = Expression::parse(text, coords);
  return CupRescaling(doc.at("alpha").get<double>(), e.to_field(), text);
}

std::string serialize_rescaling(const CupRescaling& resc) {
  if (resc.potential_text().empty()) {
    throw ConfigError("rescaling potential has no expression form");
  }
  nlohmann::ordered_json doc;
  doc["alpha"] = resc.alpha();
  doc["potential"] = resc.potential_text();
  return doc.dump(2);
}

}  // namespace cupgeo
