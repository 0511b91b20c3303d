#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cupgeo/field.hpp"
#include "cupgeo/jet.hpp"

namespace cupgeo {

/// Arithmetic expression over chart coordinates.
///
/// Grammar: numbers, coordinate identifiers, binary + - * / ^ (^ binds
/// tightest and is right-associative, so -x^2 is -(x^2)), unary -, and
/// parentheses, plus the functions exp, log, sqrt, sin, cos. The source
/// text is kept verbatim for round-tripping.
class Expression {
 public:
  struct Node;

  /// Throws ParseError (with byte offset) on syntax errors and unknown
  /// identifiers or functions.
  static Expression parse(std::string_view text, std::span<const std::string> identifiers);

  const std::string& text() const noexcept { return text_; }
  std::size_t arity() const noexcept { return arity_; }
  bool is_constant() const noexcept;

  Jet evaluate(std::span<const Jet> vars) const;
  double evaluate(std::span<const double> x) const;

  /// Analytic field on an arity-dimensional chart.
  ScalarField to_field() const;

 private:
  std::string text_;
  std::size_t arity_ = 0;
  std::shared_ptr<const Node> root_;
};

}  // namespace cupgeo
