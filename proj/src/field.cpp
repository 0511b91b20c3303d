#include "cupgeo/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "cupgeo/errors.hpp"

namespace cupgeo {
namespace {

struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

// 4th-order central stencils for d^m/dx^m, m = 1..3 (unit step).
const Stencil& stencil(int m) {
  static const std::array<Stencil, 3> table = {
      Stencil{{-2, -1, 1, 2}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12}},
      Stencil{{-2, -1, 0, 1, 2}, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}},
      Stencil{{-3, -2, -1, 1, 2, 3}, {1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8}},
  };
  return table[static_cast<std::size_t>(m - 1)];
}

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw UnsupportedOrderError("derivative order " + std::to_string(order) +
                                " is not supported (max 3)");
  }
}

// Mixed partial of total order m for the coordinate multiplicities in
// `mult`, as a tensor product of 1-D stencils.
std::vector<double> mixed_partial(const VectorRule& rule, std::size_t outputs, const Point& p,
                                  const std::vector<int>& mult, int m) {
  const std::size_t n = p.dim();
  const double eps = std::numeric_limits<double>::epsilon();
  const double base = std::pow(eps, 1.0 / (m + 2));

  std::vector<std::size_t> axes;
  std::vector<double> steps;
  for (std::size_t i = 0; i < n; ++i) {
    if (mult[i] > 0) {
      axes.push_back(i);
      steps.push_back(base * std::max(1.0, std::abs(p[i])));
    }
  }

  std::vector<double> result(outputs, 0.0);
  std::vector<std::size_t> pos(axes.size(), 0);
  std::vector<double> x(p.coords().begin(), p.coords().end());
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const Stencil& s = stencil(mult[axes[a]]);
      w *= s.weights[pos[a]];
      x[axes[a]] = p[axes[a]] + s.offsets[pos[a]] * steps[a];
    }
    const std::vector<double> f = rule(x);
    if (f.size() != outputs) throw DimensionError("black-box rule returned the wrong number of values");
    for (std::size_t o = 0; o < outputs; ++o) result[o] += w * f[o];

    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++pos[a] < stencil(mult[axes[a]]).offsets.size()) break;
      pos[a] = 0;
    }
    if (a == axes.size()) break;
  }
  double scale = 1.0;
  for (std::size_t a = 0; a < axes.size(); ++a) scale *= std::pow(steps[a], mult[axes[a]]);
  for (double& r : result) r /= scale;
  return result;
}

}  // namespace

std::vector<Jet> finite_difference_jets(const VectorRule& rule, std::size_t outputs, const Point& p,
                                        int order) {
  check_order(order);
  const std::size_t n = p.dim();
  const std::vector<double> f0 = rule(p.coords());
  if (f0.size() != outputs) throw DimensionError("black-box rule returned the wrong number of values");
  std::vector<Jet> jets;
  jets.reserve(outputs);
  for (double v : f0) jets.emplace_back(n, order, v);

  std::vector<int> mult(n, 0);
  if (order >= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(mult.begin(), mult.end(), 0);
      mult[i] = 1;
      const auto d = mixed_partial(rule, outputs, p, mult, 1);
      for (std::size_t o = 0; o < outputs; ++o) jets[o].d(i) = d[o];
    }
  }
  if (order >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        std::fill(mult.begin(), mult.end(), 0);
        ++mult[i];
        ++mult[j];
        const auto d = mixed_partial(rule, outputs, p, mult, 2);
        for (std::size_t o = 0; o < outputs; ++o) jets[o].d(i, j) = jets[o].d(j, i) = d[o];
      }
  }
  if (order >= 3) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
          std::fill(mult.begin(), mult.end(), 0);
          ++mult[i];
          ++mult[j];
          ++mult[k];
          const auto d = mixed_partial(rule, outputs, p, mult, 3);
          std::array<std::size_t, 3> idx{i, j, k};
          do {
            for (std::size_t o = 0; o < outputs; ++o) jets[o].d(idx[0], idx[1], idx[2]) = d[o];
          } while (std::next_permutation(idx.begin(), idx.end()));
        }
  }
  return jets;
}

ScalarField ScalarField::analytic(std::size_t dim, JetRule rule) {
  return composite(dim, std::move(rule), DiffMode::jet);
}

ScalarField ScalarField::composite(std::size_t dim, JetRule rule, DiffMode mode) {
  ScalarField f;
  f.dim_ = dim;
  f.mode_ = mode;
  f.jet_rule_ = std::move(rule);
  return f;
}

ScalarField ScalarField::black_box(std::size_t dim, NumericRule rule) {
  ScalarField f;
  f.dim_ = dim;
  f.mode_ = DiffMode::finite_difference;
  f.numeric_ = std::move(rule);
  return f;
}

ScalarField ScalarField::constant(std::size_t dim, double c) {
  return analytic(dim, [c](std::span<const Jet> vars) {
    return Jet(vars.empty() ? 0 : vars[0].dim(), vars.empty() ? 0 : vars[0].order(), c);
  });
}

ScalarField ScalarField::coordinate(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("coordinate index out of range");
  return analytic(dim, [index](std::span<const Jet> vars) { return vars[index]; });
}

ScalarField ScalarField::restricted_to(Domain domain) const {
  if (domain.dim() != dim_) throw DimensionError("domain dimension does not match field");
  ScalarField f = *this;
  f.domain_ = std::move(domain);
  return f;
}

Jet ScalarField::jet(const Point& p, int order) const {
  check_order(order);
  if (!valid()) throw Error("evaluation of an empty scalar field");
  if (p.dim() != dim_) {
    throw DimensionError("field of dimension " + std::to_string(dim_) + " evaluated at " +
                         p.to_string());
  }
  if (domain_) domain_->require(p);
  Jet out;
  if (jet_rule_) {
    out = jet_rule_(Jet::variables(p, order));
  } else {
    const NumericRule& f = numeric_;
    out = finite_difference_jets(
        [&f](std::span<const double> x) { return std::vector<double>{f(x)}; }, 1, p, order)[0];
  }
  if (!std::isfinite(out.value())) {
    throw DomainError("field is not finite at " + p.to_string());
  }
  return out;
}

Jet ScalarField::jet(std::span<const Jet> vars) const {
  if (vars.size() != dim_) throw DimensionError("field evaluated on the wrong number of variables");
  if (jet_rule_) {
    if (domain_) {
      std::vector<double> x;
      for (const Jet& v : vars) x.push_back(v.value());
      domain_->require(Point(std::move(x)));
    }
    return jet_rule_(vars);
  }
  std::vector<double> x;
  x.reserve(vars.size());
  for (const Jet& v : vars) x.push_back(v.value());
  return jet(Point(std::move(x)), vars.empty() ? 0 : vars[0].order());
}

double ScalarField::value(const Point& p) const { return jet(p, 0).value(); }

ScalarField ScalarField::as_black_box() const {
  if (numeric_) return *this;
  JetRule rule = jet_rule_;
  const std::size_t n = dim_;
  ScalarField f = black_box(n, [rule, n](std::span<const double> x) {
    std::vector<Jet> vars;
    vars.reserve(n);
    for (std::size_t i = 0; i < n; ++i) vars.emplace_back(n, 0, x[i]);
    return rule(vars).value();
  });
  f.domain_ = domain_;
  return f;
}

}  // namespace cupgeo
