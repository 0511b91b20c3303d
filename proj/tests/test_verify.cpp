#include <cmath>

#include "cupgeo/errors.hpp"
#include "cupgeo/expression.hpp"
#include "cupgeo/geometry.hpp"
#include "cupgeo/models.hpp"
#include "cupgeo/verify.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace cupgeo;

namespace {

ScalarField field(const std::string& text, const ManifoldModel& m) {
  return Expression::parse(text, m.coord_names()).to_field();
}

DensityOperator hessian_op(double alpha, double k) {
  return [alpha, k](const ManifoldModel& m, const ScalarField& f, const Point& p) {
    return LocalGeometry(m, alpha, p).modified_hessian(HessianSpec{k}, f);
  };
}

const std::vector<Point> kGaussGrid = {Point{-1, 0.6}, Point{0, 1}, Point{1, 1.8}};

SuiteConfig small_config() {
  SuiteConfig cfg = default_suite_config();
  cfg.alphas = {-1.0, 0.5};
  cfg.monte_carlo_count = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("identity rescaling gives zero residual for any operator") {
  const ManifoldModel m = gaussian_model();
  const CupRescaling id(0.7, ScalarField::constant(2, 0.0));
  const DensityOperator weird = [](const ManifoldModel& model, const ScalarField& f, const Point& p) {
    return LocalGeometry(model, 0.3, p).alpha_hessian(f) * 5.0;
  };
  const CheckReport r = check_type_invariance("weird", weird, {1.0, 4.0}, m, id,
                                              {field("mu*sigma", m), 1.0}, kGaussGrid, 1e-12);
  CHECK(r.points_evaluated == 3);
  CHECK(r.max_abs_residual == 0.0);
  CHECK(r.passed);
}

TEST_CASE("modified Hessian is invariant of type (1;1) only with the Ricci term") {
  const ManifoldModel m = gaussian_model();
  const CupRescaling r(1.0, field("0.3*mu", m), "0.3*mu");
  const WeightedDensity f{field("1 + 0.1*mu*sigma", m), 1.0};
  const CheckReport good = check_type_invariance("hessian_inv", hessian_op(1.0, 1.0), {1, 1}, m, r, f, kGaussGrid, 1e-7);
  CHECK(good.passed);
  CHECK(good.max_rel_residual <= 1e-12);
  const CheckReport bad = check_type_invariance("neg", hessian_op(1.0, 0.0), {1, 1}, m, r, f, kGaussGrid, 1e-7);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_rel_residual >= 1e3 * 1e-7);
  REQUIRE(bad.worst_point.has_value());
  CHECK(m.contains(*bad.worst_point));
  CHECK_THROWS_AS(check_type_invariance("x", hessian_op(1.0, 1.0), {0, 1}, m, r, f, kGaussGrid, 1e-7), ConfigError);
}

TEST_CASE("evaluation errors carry the point") {
  const ManifoldModel m = gaussian_model();
  const CupRescaling r(1.0, field("log(mu)", m), "log(mu)");
  try {
    check_type_invariance("hessian_inv", hessian_op(1.0, 1.0), {1, 1}, m, r, {ScalarField::constant(2, 1.0), 1.0},
                          kGaussGrid, 1e-7);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(-1, 0.6)") != std::string::npos);
  }
}

TEST_CASE("check ids and tolerances") {
  CHECK(proposition_check_ids().size() == 9);
  CHECK(is_known_check("curv_shift"));
  CHECK(is_known_check("neg_hessian_k0"));
  CHECK_FALSE(is_known_check("nosuch"));
  const SuiteConfig cfg = default_suite_config();
  CHECK(default_tolerance("hessian_inv", cfg) == 1e-7);
  CHECK(default_tolerance("curv_shift", cfg) == 1e-6);
  CHECK(default_tolerance("curv_trace", cfg) == 1e-9);
  CHECK(default_tolerance("laplacian_decomp", cfg) == 1e-8);
  CHECK(default_tolerance("neg_laplacian_s1", cfg) == 1e-7);
  SuiteConfig over = cfg;
  over.tolerance_overrides["hessian_inv"] = 1e-3;
  CHECK(default_tolerance("hessian_inv", over) == 1e-3);
  CHECK(default_tolerance("neg_hessian_k0", over) == 1e-3);

  SuiteConfig fd = cfg;
  fd.models.push_back(generic_model_case(
      ManifoldModel::black_box("bb", {"x", "y"}, Domain::unbounded(2),
                               [](std::span<const double>) { return std::vector<double>{1, 0, 0, 1}; },
                               [](std::span<const double>) { return std::vector<double>(8, 0.0); }),
      {Point{0, 0}}));
  CHECK(default_tolerance("hessian_inv", fd) == 1e-4);
  CHECK(default_tolerance("fisher_oracle", fd) == 3.0);
  CHECK_THROWS_AS(run_check("nosuch", cfg), ConfigError);
}

TEST_CASE("individual checks") {
  SuiteConfig cfg = default_suite_config();
  cfg.alphas = {-1.0, 0.0, 1.0};
  cfg.models.erase(cfg.models.begin() + 1, cfg.models.end());
  cfg.models[0].potentials = {"0.3*mu"};
  cfg.models[0].densities = {"1 + 0.1*mu*sigma"};
  const CheckReport lap = run_check("laplacian_inv", cfg);
  CHECK(lap.passed);
  CHECK(lap.points_evaluated == 27);
  CHECK(lap.max_rel_residual <= 1e-7);

  const CheckReport nl = run_check("nonlinear_inv", cfg);
  CHECK(nl.passed);
  CHECK(nl.points_evaluated == 27 * 4);

  SuiteConfig flat = cfg;
  flat.models = {generic_model_case(euclidean_model(3), {Point{0, 0, 0}, Point{1, 2, 3}})};
  const CheckReport integ = run_check("integrability", flat);
  CHECK(integ.passed);
  CHECK(integ.max_abs_residual == 0.0);
  CHECK(integ.points_skipped == 6);

  SuiteConfig warped = cfg;
  warped.models = {generic_model_case(parse_model(R"({"dim": 3, "coords": ["x", "y", "z"],
    "metric": {"11": "1", "22": "1 + x^2", "33": "1 + y^2"}})"), {Point{0.5, 0.8, 0.1}})};
  const CheckReport w = run_check("integrability", warped);
  CHECK_FALSE(w.passed);
  CHECK(w.worst_point == Point{0.5, 0.8, 0.1});
}

TEST_CASE("default suite") {
  const SuiteConfig cfg = small_config();
  const SuiteResult result = run_suite(cfg);
  CHECK(result.ok());
  REQUIRE(result.reports.size() == 15);
  for (const CheckReport& r : result.reports) {
    CAPTURE(r.check_id);
    CHECK(r.expectation_met());
    CHECK(r.points_evaluated > 0);
    if (r.kind == CheckKind::negative_control) {
      CHECK_FALSE(r.passed);
      CHECK(r.max_rel_residual >= kNegativeControlMargin * r.tolerance);
    } else {
      CHECK(r.passed);
      CHECK(r.max_rel_residual <= r.tolerance);
    }
  }
  CHECK(result.reports.front().check_id == "metric_compat");
  CHECK(result.reports.back().check_id == "neg_laplacian_s1");

  const auto summary = nlohmann::json::parse(suite_summary_json(result));
  REQUIRE(summary.is_array());
  CHECK(summary.size() == 15);
  CHECK(summary[0]["check_id"] == "metric_compat");
  CHECK(summary[0]["worst_point"].size() == 2);
  CHECK(suite_summary_json(run_suite(cfg)) == suite_summary_json(result));
}

TEST_CASE("an injected wrong coupling fails with a located worst point") {
  SuiteConfig cfg = small_config();
  cfg.checks = {"hessian_inv"};
  cfg.hessian_k = 0.25;
  const SuiteResult result = run_suite(cfg);
  CHECK_FALSE(result.ok());
  REQUIRE(result.reports.size() == 1);
  CHECK_FALSE(result.reports[0].passed);
  CHECK(result.reports[0].worst_point.has_value());
  CHECK(result.reports[0].worst_case.find("alpha=") != std::string::npos);
}

TEST_CASE("failures inside a check do not abort the suite") {
  SuiteConfig cfg = small_config();
  cfg.checks = {"codazzi", "hessian_inv"};
  cfg.models[0].densities = {"log(mu)"};
  const SuiteResult result = run_suite(cfg);
  REQUIRE(result.reports.size() == 2);
  CHECK(result.reports[0].passed);
  CHECK_FALSE(result.reports[1].passed);
  REQUIRE_FALSE(result.reports[1].notes.empty());
  CHECK(result.reports[1].notes.back().find("error") != std::string::npos);
}

TEST_CASE("suite config validation") {
  SuiteConfig cfg = default_suite_config();
  cfg.alphas.clear();
  CHECK_THROWS_AS(validate_suite_config(cfg), ConfigError);
  CHECK_THROWS_AS(run_suite(cfg), ConfigError);

  cfg = default_suite_config();
  cfg.models[0].grid.push_back(Point{0, 0});
  CHECK_THROWS_AS(validate_suite_config(cfg), ConfigError);

  cfg = default_suite_config();
  cfg.models[1].densities.clear();
  CHECK_THROWS_AS(validate_suite_config(cfg), ConfigError);

  cfg = default_suite_config();
  cfg.models[0].potentials = {"0.3*nu"};
  CHECK_THROWS_AS(validate_suite_config(cfg), ConfigError);

  cfg = default_suite_config();
  cfg.checks = {"nosuch"};
  CHECK_THROWS_AS(validate_suite_config(cfg), ConfigError);
}

TEST_CASE("suite config files") {
  const char* text = R"json({
    "alphas": [0.5],
    "seed": 7,
    "monte_carlo_count": 1000,
    "checks": ["conn_shift", "hessian_inv"],
    "tolerances": {"hessian_inv": 1e-6},
    "models": [
      {"model": "gaussian", "grid": [[0, 1], [1, 2]], "potentials": ["0.1*sigma"]},
      {"model": {"dim": 2, "coords": ["a", "b"], "metric": {"11": "1 + a^2", "22": "exp(b)"},
                 "skewness": {"112": "a*b"}},
       "grid": [[0.1, 0.2]],
       "densities": ["1 + a"],
       "couplings": [{"lambda": "2", "a": 3}]}
    ]
  })json";
  const SuiteConfig cfg = parse_suite_config(text);
  CHECK(cfg.alphas == std::vector<double>{0.5});
  CHECK(cfg.seed == 7);
  CHECK(cfg.models.size() == 2);
  CHECK(cfg.models[0].potentials == std::vector<std::string>{"0.1*sigma"});
  CHECK(cfg.models[1].couplings.size() == 1);
  CHECK(default_tolerance("hessian_inv", cfg) == 1e-6);
  const SuiteResult result = run_suite(cfg);
  CHECK(result.ok());
  CHECK(result.reports.size() == 2);

  CHECK_THROWS_AS(parse_suite_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_suite_config(R"({"alphas": [], "models": []})"), ConfigError);
  CHECK_THROWS_AS(parse_suite_config(R"({"alphas": [1], "models": [{"model": "nosuch", "grid": [[0, 1]]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_suite_config(R"({"alphas": [1], "models": [{"model": "gaussian", "grid": [[0, -1]]}]})"),
                  ConfigError);
}
