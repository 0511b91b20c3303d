#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cupgeo {

/// Chart coordinates of a point on an n-dimensional manifold.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  std::string to_string() const;

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// Margin kept between evaluation points and the chart boundary.
inline constexpr double kDomainMargin = 1e-6;

struct Bound {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Open box in the chart, optionally intersected with {sum of coords < c}.
/// Points closer than `margin` to any face are outside.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Bound> bounds, std::optional<double> sum_below = std::nullopt,
                  double margin = kDomainMargin);

  static Domain unbounded(std::size_t dim);

  std::size_t dim() const noexcept { return bounds_.size(); }
  const std::vector<Bound>& bounds() const noexcept { return bounds_; }
  const std::optional<double>& sum_below() const noexcept { return sum_below_; }
  double margin() const noexcept { return margin_; }

  bool contains(const Point& p) const;

  /// Throws DomainError naming the violated constraint.
  void require(const Point& p) const;

 private:
  std::vector<Bound> bounds_;
  std::optional<double> sum_below_;
  double margin_ = kDomainMargin;
};

}  // namespace cupgeo
