#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cupgeo/field.hpp"
#include "cupgeo/jet.hpp"
#include "cupgeo/point.hpp"
#include "cupgeo/tensor.hpp"

namespace cupgeo {

struct ModelConfig;

/// A statistical manifold on a single chart: metric g and fully symmetric
/// skewness tensor t, both available as jets.
///
/// Rules return dense row-major components (n^2 for g, n^3 for t) as jets
/// of the requested order at a point already checked against the domain.
class ManifoldModel {
 public:
  using TensorRule = std::function<std::vector<Jet>(const Point&, int order)>;

  ManifoldModel(std::string name, std::vector<std::string> coord_names, Domain domain,
                TensorRule metric, TensorRule skewness, DiffMode mode = DiffMode::jet);

  /// Model whose components are only numerically evaluable; jets come from
  /// finite differences.
  static ManifoldModel black_box(std::string name, std::vector<std::string> coord_names,
                                 Domain domain, VectorRule metric, VectorRule skewness);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<std::string>& coord_names() const noexcept { return coords_; }
  const Domain& domain() const noexcept { return domain_; }
  DiffMode mode() const noexcept { return mode_; }

  bool contains(const Point& p) const { return domain_.contains(p); }

  std::vector<Jet> metric_jets(const Point& p, int order) const;
  std::vector<Jet> skewness_jets(const Point& p, int order) const;

  Tensor metric(const Point& p) const;
  Tensor skewness(const Point& p) const;

  /// Configuration the model was parsed from, if any.
  const std::shared_ptr<const ModelConfig>& source() const noexcept { return source_; }
  ManifoldModel with_source(std::shared_ptr<const ModelConfig> source) const;
  ManifoldModel renamed(std::string name) const;

 private:
  std::vector<Jet> eval(const TensorRule& rule, std::size_t expected, const Point& p, int order,
                        const char* what) const;

  std::string name_;
  std::vector<std::string> coords_;
  Domain domain_;
  TensorRule metric_;
  TensorRule skewness_;
  DiffMode mode_ = DiffMode::jet;
  std::shared_ptr<const ModelConfig> source_;
};

/// Value-level tensor from dense jets.
Tensor values_of(std::span<const Jet> jets, std::size_t dim, std::vector<Slot> variance);

}  // namespace cupgeo
