#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cupgeo/jet.hpp"
#include "cupgeo/point.hpp"

namespace cupgeo {

enum class DiffMode { jet, finite_difference };

/// Numeric callback returning several values at once; used for black-box
/// tensor fields so one stencil evaluation serves every component.
using VectorRule = std::function<std::vector<double>(std::span<const double>)>;

/// Jets of every output of `rule` at `p`, up to `order`, by 4th-order
/// central differences. The step for an order-m partial is
/// eps^(1/(m+2)) * max(1, |x_i|) per coordinate.
std::vector<Jet> finite_difference_jets(const VectorRule& rule, std::size_t outputs, const Point& p,
                                        int order);

/// A real function on a chart, evaluated to jets either exactly (analytic
/// rule written in jet arithmetic) or by finite differences of a numeric
/// black-box callback.
class ScalarField {
 public:
  using JetRule = std::function<Jet(std::span<const Jet>)>;
  using NumericRule = std::function<double(std::span<const double>)>;

  ScalarField() = default;

  static ScalarField analytic(std::size_t dim, JetRule rule);
  static ScalarField black_box(std::size_t dim, NumericRule rule);
  /// Rule built from other fields; `mode` records how its inputs are
  /// differentiated (finite_difference if any input is).
  static ScalarField composite(std::size_t dim, JetRule rule, DiffMode mode);
  static ScalarField constant(std::size_t dim, double c);
  static ScalarField coordinate(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return dim_; }
  DiffMode mode() const noexcept { return mode_; }
  bool valid() const noexcept { return static_cast<bool>(jet_rule_) || static_cast<bool>(numeric_); }

  /// Restricts evaluation to `domain`; points outside raise DomainError.
  ScalarField restricted_to(Domain domain) const;
  const std::optional<Domain>& domain() const noexcept { return domain_; }

  /// Value and all partials up to `order` (<= 3) at p.
  Jet jet(const Point& p, int order) const;

  /// Evaluation on seeded coordinate variables (Jet::variables). Black-box
  /// fields only support the identity chart map, i.e. exactly those seeds.
  Jet jet(std::span<const Jet> vars) const;

  double value(const Point& p) const;

  /// The same function exposed only through numeric evaluation, so its
  /// jets come from finite differences.
  ScalarField as_black_box() const;

 private:
  std::size_t dim_ = 0;
  DiffMode mode_ = DiffMode::jet;
  JetRule jet_rule_;
  NumericRule numeric_;
  std::optional<Domain> domain_;
};

/// Alias for the jet-evaluation entry point.
inline Jet evaluate_jet(const ScalarField& field, const Point& p, int order) {
  return field.jet(p, order);
}

}  // namespace cupgeo
