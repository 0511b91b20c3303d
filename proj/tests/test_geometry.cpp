#include <cmath>

#include "cupgeo/errors.hpp"
#include "cupgeo/expression.hpp"
#include "cupgeo/geometry.hpp"
#include "cupgeo/models.hpp"
#include "support.hpp"

using namespace cupgeo;
using support::Vec;

namespace {

Vec vec(const Tensor& t) { return Vec(t.components().begin(), t.components().end()); }

ScalarField field(const std::string& text, const ManifoldModel& m) {
  return Expression::parse(text, m.coord_names()).to_field();
}

const std::vector<double> kAlphas = {-1.0, -0.5, 0.0, 0.5, 1.0};

struct OracleModel {
  ManifoldModel model;
  support::Fn g, t;
  std::function<Point(support::Rng&)> draw;
  std::function<double(const Vec&)> reach;
};

std::vector<OracleModel> oracle_models() {
  std::vector<OracleModel> out;
  out.push_back({gaussian_model(), support::gaussian_g, support::gaussian_t,
                 [](support::Rng& r) { return Point{r.uniform(-2, 2), r.uniform(0.4, 2.5)}; },
                 [](const Vec& x) { return std::min(1.0, x[1]); }});
  for (int k : {3, 4}) {
    out.push_back({multinomial_model(k), support::categorical_g, support::categorical_t,
                   [k](support::Rng& r) { return Point(support::random_simplex_point(r, k - 1)); },
                   support::simplex_reach});
  }
  return out;
}

// A 3D model with t = 0 whose curvature is not of the projectively flat form.
ManifoldModel warped_model() {
  return parse_model(R"({"dim": 3, "coords": ["x", "y", "z"],
    "metric": {"11": "1", "22": "1 + x^2", "33": "1 + y^2"}})");
}

}  // namespace

TEST_CASE("flat chart") {
  const ManifoldModel e = euclidean_model(3);
  const Point p{0.3, -1.2, 2.0};
  for (double alpha : kAlphas) {
    const LocalGeometry geom(e, alpha, p);
    CHECK(geom.connection().symbols.max_abs() == 0.0);
    CHECK(geom.curvature().riemann.max_abs() == 0.0);
    CHECK(geom.curvature().ricci.max_abs() == 0.0);
    CHECK(geom.curvature().scalar == 0.0);
    CHECK(geom.cup_laplacian(field("x^2", e)) == 2.0);
    CHECK(geom.integrability_residual(0.5) == 0.0);
  }
  const Tensor h = alpha_hessian(euclidean_model(2), 0.3, field("x*y", euclidean_model(2)), Point{1, 2});
  CHECK(vec(h) == Vec{0, 1, 1, 0});
}

TEST_CASE("normal family connection coefficients") {
  const ManifoldModel m = gaussian_model();
  // (k, i, j) with k, i, j zero-based: 0 = mu, 1 = sigma.
  const Christoffel lc = levi_civita(m, Point{0, 1});
  CHECK(lc(0, 0, 1) == -1.0);
  CHECK(lc(0, 1, 0) == -1.0);
  CHECK(lc(1, 0, 0) == 0.5);
  CHECK(lc(1, 1, 1) == -1.0);
  CHECK(lc(0, 0, 0) == 0.0);
  CHECK(lc(1, 0, 1) == 0.0);
  CHECK(lc(0, 1, 1) == 0.0);

  const Christoffel lc2 = levi_civita(m, Point{0, 2});
  CHECK(lc2(0, 0, 1) == -0.5);
  CHECK(lc2(1, 0, 0) == 0.25);
  CHECK(lc2(1, 1, 1) == -0.5);

  const Christoffel a0 = alpha_connection(m, 0.0, Point{0.7, 1.3});
  CHECK(vec(a0.symbols) == vec(levi_civita(m, Point{0.7, 1.3}).symbols));

  const Christoffel plus = alpha_connection(m, 1.0, Point{0, 1});
  CHECK(plus(1, 0, 0) == 0.0);
  CHECK(plus(0, 0, 1) == -2.0);
  CHECK(plus(1, 1, 1) == -3.0);

  const Christoffel minus = alpha_connection(m, -1.0, Point{0, 1});
  CHECK(minus(1, 0, 0) == 1.0);
  CHECK(minus(0, 0, 1) == 0.0);
  CHECK(minus(1, 1, 1) == 1.0);
}

TEST_CASE("property: connections match a finite-difference oracle and are torsion-free") {
  const auto models = oracle_models();
  support::for_all(31, 60, [&](support::Rng& rng) {
    const OracleModel& om = models[rng.index(models.size())];
    const Point p = om.draw(rng);
    const double alpha = rng.uniform(-1.5, 1.5);
    CAPTURE(om.model.name());
    CAPTURE(p.to_string());
    const Christoffel c = alpha_connection(om.model, alpha, p);
    const Vec x(p.coords().begin(), p.coords().end());
    CHECK(support::max_rel_diff(vec(c.symbols), support::christoffel(om.g, om.t, x, alpha, om.reach(x))) <= 1e-8);
    const std::size_t n = c.dim();
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) CHECK(c(k, i, j) == c(k, j, i));
  });
}

TEST_CASE("covariant derivative of the metric") {
  const ManifoldModel m = gaussian_model();
  CHECK(covariant_derivative_metric(m, 0.0, Point{0.4, 1.7}).max_abs() <= 1e-10);
  const Tensor d = covariant_derivative_metric(m, 1.0, Point{0, 1});
  CHECK(support::max_rel_diff(vec(d), vec(m.skewness(Point{0, 1}))) <= 1e-15);
}

TEST_CASE("property: metric compatibility and Codazzi symmetry") {
  const auto models = oracle_models();
  support::for_all(32, 60, [&](support::Rng& rng) {
    const OracleModel& om = models[rng.index(models.size())];
    const Point p = om.draw(rng);
    const double alpha = rng.pick(kAlphas);
    CAPTURE(om.model.name());
    const LocalGeometry geom(om.model, alpha, p);
    const Tensor d = geom.metric_derivative();
    const double scale = std::max(1.0, d.max_abs());
    CHECK(max_abs_difference(d, alpha * geom.skewness()) <= 1e-8 * scale);
    const std::size_t n = d.dim();
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(d(k, i, j) - d(i, k, j)) <= 1e-9 * scale);
  });
}

TEST_CASE("normal family curvature") {
  const ManifoldModel m = gaussian_model();
  support::for_all(33, 30, [&](support::Rng& rng) {
    const Point p{rng.uniform(-3, 3), rng.uniform(0.2, 4)};
    const CurvaturePack c0 = curvature(m, 0.0, p);
    CHECK(std::abs(c0.scalar + 1.0) <= 1e-12);
    CHECK(max_abs_difference(c0.ricci, -0.5 * m.metric(p)) <= 1e-12 * std::max(1.0, c0.ricci.max_abs()));
    for (double alpha : {-1.0, 1.0}) CHECK(riemann(m, alpha, p).max_abs() <= 1e-7);
  });
  CHECK(vec(ricci(m, 0.0, Point{0, 1})) == Vec{-0.5, 0, 0, -1});
}

TEST_CASE("property: curvature matches a nested finite-difference oracle") {
  const auto models = oracle_models();
  support::for_all(34, 24, [&](support::Rng& rng) {
    const OracleModel& om = models[rng.index(models.size())];
    const Point p = om.draw(rng);
    const double alpha = rng.uniform(-1.5, 1.5);
    CAPTURE(om.model.name());
    CAPTURE(p.to_string());
    CAPTURE(alpha);
    const Vec x(p.coords().begin(), p.coords().end());
    const Vec oracle = support::riemann(om.g, om.t, x, alpha, om.reach(x));
    CHECK(support::max_rel_diff(vec(riemann(om.model, alpha, p)), oracle) <= 1e-5);
  });
}

TEST_CASE("property: curvature symmetries and traces") {
  const auto models = oracle_models();
  support::for_all(35, 40, [&](support::Rng& rng) {
    const OracleModel& om = models[rng.index(models.size())];
    const Point p = om.draw(rng);
    const LocalGeometry geom(om.model, rng.uniform(-1.5, 1.5), p);
    const CurvaturePack& c = geom.curvature();
    const std::size_t n = geom.dim();
    const double scale = std::max(1.0, c.riemann.max_abs());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) CHECK(std::abs(c.riemann(i, j, k, l) + c.riemann(i, j, l, k)) <= 1e-9 * scale);
    CHECK(max_abs_difference(c.ricci, contract(c.riemann, 0, 2)) == 0.0);
    double trace = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) trace += geom.metric_inverse()(j, l) * c.ricci(j, l);
    CHECK(std::abs(trace - c.scalar) <= 1e-12 * std::max(1.0, std::abs(c.scalar)));
  });
}

TEST_CASE("Hessians") {
  const ManifoldModel m = gaussian_model();
  const Point p{0, 1};
  CHECK(alpha_hessian(m, 0.7, ScalarField::constant(2, 3.0), p).max_abs() == 0.0);
  CHECK(vec(alpha_hessian(m, 0.0, field("sigma", m), p)) == Vec{-0.5, 0, 0, 1});

  const ScalarField f = field("1 + 0.1*mu*sigma", m);
  const Point q{0.5, 1.4};
  CHECK(vec(modified_hessian(m, 0.5, HessianSpec{0.0}, f, q)) == vec(alpha_hessian(m, 0.5, f, q)));
  const Tensor ric = ricci(m, 0.3, q);
  CHECK(max_abs_difference(modified_hessian(m, 0.3, HessianSpec{0.7}, ScalarField::constant(2, 1.0), q), 0.7 * ric) <= 1e-15);
  CHECK(vec(modified_hessian(m, 0.0, HessianSpec::cup_invariant(2), ScalarField::constant(2, 1.0), p)) ==
        Vec{-0.5, 0, 0, -1});
  CHECK(HessianSpec::cup_invariant(3).k == 0.5);
  CHECK_THROWS_AS(HessianSpec::cup_invariant(1), DimensionError);
}

TEST_CASE("cup-Laplacian") {
  const ManifoldModel m = gaussian_model();
  support::for_all(36, 10, [&](support::Rng& rng) {
    const Point p{rng.uniform(-3, 3), rng.uniform(0.2, 4)};
    CHECK(std::abs(cup_laplacian(m, 0.0, ScalarField::constant(2, 1.0), p) + 1.0) <= 1e-12);
  });
  // alpha = 1 at (0, 1): R^1 through the oracle's Ricci contraction.
  const Vec r = support::riemann(support::gaussian_g, support::gaussian_t, {0.0, 1.0}, 1.0);
  double scalar = 0.0;
  const Vec gi = support::inverse(support::gaussian_g({0.0, 1.0}), 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t l = 0; l < 2; ++l)
      for (std::size_t k = 0; k < 2; ++k) scalar += gi[j * 2 + l] * r[((k * 2 + j) * 2 + k) * 2 + l];
  CHECK(std::abs(cup_laplacian(m, 1.0, ScalarField::constant(2, 1.0), Point{0, 1}) - scalar) <= 1e-6);

  CHECK_THROWS_AS(cup_laplacian(euclidean_model(1), 0.0, ScalarField::constant(1, 1.0), Point{0.0}), DimensionError);
}

TEST_CASE("property: decomposition of the cup-Laplacian") {
  const auto models = oracle_models();
  const std::vector<std::string> g_texts = {"1 + 0.1*mu*sigma", "sin(mu) + sigma^2", "exp(0.2*mu)/sigma"};
  const std::vector<std::string> p_texts = {"1 + 0.1*p1*p2", "log(p1) + p2^2", "sqrt(p1 + p2)"};
  support::for_all(37, 60, [&](support::Rng& rng) {
    const OracleModel& om = models[rng.index(2)];
    const Point p = om.draw(rng);
    const double alpha = rng.pick(kAlphas);
    const ScalarField f = field(om.model.name() == "gaussian" ? rng.pick(g_texts) : rng.pick(p_texts), om.model);
    const LocalGeometry geom(om.model, alpha, p);
    const double direct = geom.cup_laplacian(f);
    CHECK(support::rel_diff(direct, geom.cup_laplacian_decomposed(f)) <= 1e-8);
    if (alpha == 0.0) {
      const double k = 1.0 / (geom.dim() - 1.0);
      CHECK(support::rel_diff(direct, geom.alpha_laplacian(f) + k * geom.curvature().scalar * f.value(p)) <= 1e-10);
    }
  });
}

TEST_CASE("operator with self-interaction") {
  const ManifoldModel m = gaussian_model();
  const Point p{0, 1};
  const ScalarField one = ScalarField::constant(2, 1.0);
  CHECK(nonlinear_cup_operator(m, 0.0, one, NonlinearCoupling(ScalarField::constant(2, 0.0), 3), p) ==
        cup_laplacian(m, 0.0, one, p));
  CHECK(std::abs(nonlinear_cup_operator(m, 0.0, one, NonlinearCoupling(ScalarField::constant(2, 2.0), 3), p) - 1.0) <= 1e-12);

  const NonlinearCoupling linear(ScalarField::constant(2, 0.7), 1.0);
  const ScalarField f = field("mu*sigma + 2", m), g = field("sin(mu) + sigma", m);
  const ScalarField sum = field("mu*sigma + 2 + sin(mu) + sigma", m);
  const Point q{0.3, 1.2};
  CHECK(support::rel_diff(nonlinear_cup_operator(m, 0.4, sum, linear, q),
                          nonlinear_cup_operator(m, 0.4, f, linear, q) + nonlinear_cup_operator(m, 0.4, g, linear, q)) <= 1e-10);

  CHECK_THROWS_AS(NonlinearCoupling(ScalarField::constant(2, 1.0), 0.0), ConfigError);
  const NonlinearCoupling half(ScalarField::constant(2, 1.0), 0.5);
  CHECK_THROWS_AS(nonlinear_cup_operator(m, 0.0, field("mu - 5", m), half, q), DomainError);
  const NonlinearCoupling cube(ScalarField::constant(2, 1.0), 3.0);
  CHECK(std::isfinite(nonlinear_cup_operator(m, 0.0, field("mu - 5", m), cube, q)));
}

TEST_CASE("integrability residual") {
  CHECK(integrability_residual(euclidean_model(3), 0.4, 0.5, Point{1, 2, 3}) == 0.0);
  support::for_all(38, 20, [](support::Rng& rng) {
    const Point g{rng.uniform(-2, 2), rng.uniform(0.3, 3)};
    CHECK(integrability_residual(gaussian_model(), 0.0, 1.0, g) <= 1e-7);
    const Point q(support::random_simplex_point(rng, 2));
    CHECK(integrability_residual(multinomial_model(3), 0.5, 1.0, q) <= 1e-7);
    // The 3D categorical family has constant alpha-curvature, so the
    // projective-flatness form holds with k = 1/2 at every alpha.
    const Point t(support::random_simplex_point(rng, 3));
    const double alpha = rng.uniform(-1, 1);
    const LocalGeometry geom(multinomial_model(4), alpha, t);
    CHECK(geom.integrability_residual(0.5) <= 1e-9 * std::max(1.0, geom.curvature().riemann.max_abs()));
  });
  // A warped 3D chart is not of that form: the residual is far from zero.
  CHECK(integrability_residual(warped_model(), 0.0, 0.5, Point{0.5, 0.8, 0.1}) > 1e-2);
  CHECK_THROWS_AS(integrability_residual(euclidean_model(1), 0.0, 1.0, Point{0.0}), DimensionError);
}

TEST_CASE("finite-difference models track analytic geometry") {
  const ManifoldModel bb = ManifoldModel::black_box(
      "bb-gauss", {"mu", "sigma"}, Domain({Bound{}, Bound{0.0, INFINITY}}),
      [](std::span<const double> x) { return support::gaussian_g(Vec(x.begin(), x.end())); },
      [](std::span<const double> x) { return support::gaussian_t(Vec(x.begin(), x.end())); });
  const ManifoldModel ref = gaussian_model();
  for (double alpha : kAlphas) {
    const Point p{0.2, 1.1};
    const LocalGeometry a(bb, alpha, p), b(ref, alpha, p);
    CHECK(support::max_rel_diff(vec(a.connection().symbols), vec(b.connection().symbols)) <= 1e-8);
    CHECK(support::max_rel_diff(vec(a.curvature().riemann), vec(b.curvature().riemann)) <= 1e-4);
  }
}

TEST_CASE("geometry rejects bad inputs") {
  CHECK_THROWS_AS(LocalGeometry(gaussian_model(), 0.0, Point{0, -1}), DomainError);
  CHECK_THROWS_AS(LocalGeometry(gaussian_model(), 0.0, Point{0, 1, 2}), DimensionError);
  const ManifoldModel bad = parse_model(R"({"dim": 2, "coords": ["x", "y"],
    "metric": {"11": "1", "22": "1", "12": "2"}})");
  CHECK_THROWS_AS(LocalGeometry(bad, 0.0, Point{0, 0}), SingularMetricError);
}
