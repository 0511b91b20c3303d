#include "cupgeo/point.hpp"

#include <charconv>

#include <cmath>
#include <numeric>

#include "cupgeo/errors.hpp"

namespace cupgeo {

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double c : coords_) {
    if (!std::isfinite(c)) throw DomainError("point coordinates must be finite");
  }
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

std::string Point::to_string() const {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ", ";
    const auto res = std::to_chars(buf, buf + sizeof buf, coords_[i]);
    out.append(buf, res.ptr);
  }
  out += ')';
  return out;
}

Domain::Domain(std::vector<Bound> bounds, std::optional<double> sum_below, double margin)
    : bounds_(std::move(bounds)), sum_below_(sum_below), margin_(margin) {}

Domain Domain::unbounded(std::size_t dim) { return Domain(std::vector<Bound>(dim)); }

bool Domain::contains(const Point& p) const {
  if (p.dim() != bounds_.size()) return false;
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (!(p[i] > bounds_[i].lower + margin_) || !(p[i] < bounds_[i].upper - margin_)) return false;
  }
  if (sum_below_) {
    const double s = std::accumulate(p.coords().begin(), p.coords().end(), 0.0);
    if (!(s < *sum_below_ - margin_)) return false;
  }
  return true;
}

void Domain::require(const Point& p) const {
  if (p.dim() != bounds_.size()) {
    throw DimensionError("point " + p.to_string() + " has dimension " + std::to_string(p.dim()) +
                         ", chart has " + std::to_string(bounds_.size()));
  }
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (!(p[i] > bounds_[i].lower + margin_) || !(p[i] < bounds_[i].upper - margin_)) {
      throw DomainError("coordinate " + std::to_string(i) + " of " + p.to_string() +
                        " is outside the chart domain");
    }
  }
  if (sum_below_ && !contains(p)) {
    throw DomainError("coordinate sum of " + p.to_string() + " is not below " +
                      std::to_string(*sum_below_));
  }
}

}  // namespace cupgeo
