#include "cupgeo/model.hpp"

#include <cmath>
#include <string>

#include "cupgeo/errors.hpp"

namespace cupgeo {

ManifoldModel::ManifoldModel(std::string name, std::vector<std::string> coord_names, Domain domain,
                             TensorRule metric, TensorRule skewness, DiffMode mode)
    : name_(std::move(name)),
      coords_(std::move(coord_names)),
      domain_(std::move(domain)),
      metric_(std::move(metric)),
      skewness_(std::move(skewness)),
      mode_(mode) {
  if (coords_.empty()) throw DimensionError("model dimension must be positive");
  if (domain_.dim() != coords_.size()) throw DimensionError("domain dimension does not match model");
}

ManifoldModel ManifoldModel::black_box(std::string name, std::vector<std::string> coord_names,
                                       Domain domain, VectorRule metric, VectorRule skewness) {
  const std::size_t n = coord_names.size();
  auto wrap = [](VectorRule rule, std::size_t count) -> TensorRule {
    return [rule = std::move(rule), count](const Point& p, int order) {
      return finite_difference_jets(rule, count, p, order);
    };
  };
  return ManifoldModel(std::move(name), std::move(coord_names), std::move(domain),
                       wrap(std::move(metric), n * n), wrap(std::move(skewness), n * n * n),
                       DiffMode::finite_difference);
}

std::vector<Jet> ManifoldModel::eval(const TensorRule& rule, std::size_t expected, const Point& p,
                                     int order, const char* what) const {
  if (order < 0 || order > kMaxJetOrder) {
    throw UnsupportedOrderError(std::string(what) + " jets of order " + std::to_string(order) +
                                " are not supported");
  }
  domain_.require(p);
  std::vector<Jet> out = rule(p, order);
  if (out.size() != expected) {
    throw DimensionError(std::string(what) + " rule of model '" + name_ +
                         "' returned the wrong component count");
  }
  for (const Jet& j : out) {
    if (!std::isfinite(j.value())) {
      throw DomainError(std::string(what) + " of model '" + name_ + "' is not finite at " +
                        p.to_string());
    }
  }
  return out;
}

std::vector<Jet> ManifoldModel::metric_jets(const Point& p, int order) const {
  return eval(metric_, dim() * dim(), p, order, "metric");
}

std::vector<Jet> ManifoldModel::skewness_jets(const Point& p, int order) const {
  return eval(skewness_, dim() * dim() * dim(), p, order, "skewness");
}

Tensor ManifoldModel::metric(const Point& p) const {
  return values_of(metric_jets(p, 0), dim(), {Slot::covariant, Slot::covariant});
}

Tensor ManifoldModel::skewness(const Point& p) const {
  return values_of(skewness_jets(p, 0), dim(), {Slot::covariant, Slot::covariant, Slot::covariant});
}

ManifoldModel ManifoldModel::with_source(std::shared_ptr<const ModelConfig> source) const {
  ManifoldModel m = *this;
  m.source_ = std::move(source);
  return m;
}

ManifoldModel ManifoldModel::renamed(std::string name) const {
  ManifoldModel m = *this;
  m.name_ = std::move(name);
  return m;
}

Tensor values_of(std::span<const Jet> jets, std::size_t dim, std::vector<Slot> variance) {
  std::vector<double> c;
  c.reserve(jets.size());
  for (const Jet& j : jets) c.push_back(j.value());
  return Tensor(dim, std::move(variance), std::move(c));
}

}  // namespace cupgeo
