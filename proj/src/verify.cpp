#include "cupgeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "cupgeo/errors.hpp"
#include "cupgeo/expression.hpp"
#include "cupgeo/geometry.hpp"
#include "cupgeo/models.hpp"
#include "json.hpp"

namespace cupgeo {
namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Running maximum of residuals with the point and context that produced it.
class Accumulator {
 public:
  void add(const Point& p, double abs_res, double rel_res, const std::string& context) {
    ++evaluated_;
    max_abs_ = std::max(max_abs_, abs_res);
    if (!worst_ || rel_res > max_rel_ || (std::isnan(rel_res) && !std::isnan(max_rel_))) {
      max_rel_ = rel_res;
      worst_ = p;
      context_ = context;
    }
  }

  void add_tensors(const Point& p, const Tensor& lhs, const Tensor& rhs, const std::string& context) {
    const double abs_res = max_abs_difference(lhs, rhs);
    add(p, abs_res, abs_res / residual_scale(lhs, rhs), context);
  }

  void skip(std::size_t count = 1) { skipped_ += count; }
  void note(std::string n) { notes_.push_back(std::move(n)); }

  void merge(const CheckReport& r) {
    evaluated_ += r.points_evaluated;
    skipped_ += r.points_skipped;
    max_abs_ = std::max(max_abs_, r.max_abs_residual);
    if (r.worst_point && (!worst_ || r.max_rel_residual > max_rel_ ||
                          (std::isnan(r.max_rel_residual) && !std::isnan(max_rel_)))) {
      max_rel_ = r.max_rel_residual;
      worst_ = r.worst_point;
      context_ = r.worst_case;
    }
    notes_.insert(notes_.end(), r.notes.begin(), r.notes.end());
  }

  CheckReport finish(const std::string& id, CheckKind kind, double tolerance) const {
    CheckReport r;
    r.check_id = id;
    r.kind = kind;
    r.points_evaluated = evaluated_;
    r.points_skipped = skipped_;
    r.max_abs_residual = max_abs_;
    r.max_rel_residual = max_rel_;
    r.tolerance = tolerance;
    r.passed = (evaluated_ > 0 || skipped_ > 0) && max_rel_ <= tolerance;
    r.worst_point = worst_;
    r.worst_case = context_;
    r.notes = notes_;
    if (evaluated_ == 0 && skipped_ == 0) r.notes.push_back("no points evaluated");
    return r;
  }

 private:
  std::size_t evaluated_ = 0;
  std::size_t skipped_ = 0;
  double max_abs_ = 0.0;
  double max_rel_ = 0.0;
  std::optional<Point> worst_;
  std::string context_;
  std::vector<std::string> notes_;
};

// Reruns `body` at `p`, attaching the point and context to any error.
template <class F>
void at_point(const Point& p, const std::string& context, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " [at " + p.to_string() + "; " + context + "]");
  }
}

ScalarField field_of(const std::string& text, const ManifoldModel& model) {
  return Expression::parse(text, model.coord_names()).to_field();
}

struct RescaledCase {
  const ModelCase* mc;
  double alpha;
  CupRescaling resc;
  ManifoldModel rescaled;
  std::string context;
};

std::vector<RescaledCase> rescaled_cases(const SuiteConfig& cfg,
                                         SymNormalization sym = SymNormalization::cyclic_sum) {
  std::vector<RescaledCase> out;
  for (const ModelCase& mc : cfg.models)
    for (double alpha : cfg.alphas)
      for (const std::string& pot : mc.potentials) {
        CupRescaling resc(alpha, field_of(pot, mc.model), pot);
        ManifoldModel rescaled = rescaled_model(mc.model, resc, sym);
        std::string ctx = "model=" + mc.model.name() + " alpha=" + fmt(alpha) + " potential=" + pot;
        out.push_back({&mc, alpha, std::move(resc), std::move(rescaled), std::move(ctx)});
      }
  return out;
}

bool any_finite_difference(const SuiteConfig& cfg) {
  return std::any_of(cfg.models.begin(), cfg.models.end(),
                     [](const ModelCase& mc) { return mc.model.mode() == DiffMode::finite_difference; });
}

std::optional<SampleSpec> sample_spec_for(const ManifoldModel& model, std::size_t count, std::uint64_t seed) {
  if (model.name() == "gaussian") return gaussian_sample_spec(count, seed);
  const std::string prefix = "multinomial:";
  if (model.name().rfind(prefix, 0) == 0) {
    return categorical_sample_spec(std::stoi(model.name().substr(prefix.size())), count, seed);
  }
  return std::nullopt;
}

// --- individual residual computations -------------------------------------

// Models checked by the pointwise identities: each base model and each of
// its rescalings, per alpha.
template <class F>
void for_each_model_alpha(const SuiteConfig& cfg, F&& fn) {
  for (const ModelCase& mc : cfg.models)
    for (double alpha : cfg.alphas) {
      fn(mc.model, alpha, mc.grid, "model=" + mc.model.name() + " alpha=" + fmt(alpha));
    }
  for (const RescaledCase& rc : rescaled_cases(cfg)) fn(rc.rescaled, rc.alpha, rc.mc->grid, rc.context + " (rescaled)");
}

Accumulator metric_compat(const SuiteConfig& cfg) {
  Accumulator acc;
  for_each_model_alpha(cfg, [&](const ManifoldModel& m, double alpha, const std::vector<Point>& grid,
                                const std::string& ctx) {
    for (const Point& p : grid) {
      at_point(p, ctx, [&] {
        LocalGeometry geom(m, alpha, p);
        acc.add_tensors(p, geom.metric_derivative(), alpha * geom.skewness(), ctx);
      });
    }
  });
  return acc;
}

Accumulator codazzi(const SuiteConfig& cfg) {
  Accumulator acc;
  for_each_model_alpha(cfg, [&](const ManifoldModel& m, double alpha, const std::vector<Point>& grid,
                                const std::string& ctx) {
    for (const Point& p : grid) {
      at_point(p, ctx, [&] {
        const Tensor d = LocalGeometry(m, alpha, p).metric_derivative();
        Tensor swapped = d;
        const std::size_t n = d.dim();
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) swapped(k, i, j) = d(i, k, j);
        acc.add_tensors(p, d, swapped, ctx);
      });
    }
  });
  return acc;
}

Accumulator conn_shift(const SuiteConfig& cfg, SymNormalization sym) {
  Accumulator acc;
  for (const RescaledCase& rc : rescaled_cases(cfg, sym)) {
    for (const Point& p : rc.mc->grid) {
      at_point(p, rc.context, [&] {
        const Tensor diff = alpha_connection(rc.rescaled, rc.alpha, p).symbols -
                            alpha_connection(rc.mc->model, rc.alpha, p).symbols;
        acc.add_tensors(p, diff, connection_shift_prediction(rc.resc, p), rc.context);
      });
    }
  }
  return acc;
}

enum class ShiftPart { curvature, ricci, trace };

Accumulator shift_check(const SuiteConfig& cfg, ShiftPart part) {
  Accumulator acc;
  for (const RescaledCase& rc : rescaled_cases(cfg)) {
    for (const Point& p : rc.mc->grid) {
      at_point(p, rc.context, [&] {
        const LocalGeometry base(rc.mc->model, rc.alpha, p);
        switch (part) {
          case ShiftPart::curvature: {
            const LocalGeometry other(rc.rescaled, rc.alpha, p);
            acc.add_tensors(p, other.curvature().riemann - base.curvature().riemann,
                            curvature_shift_prediction(base, rc.resc), rc.context);
            break;
          }
          case ShiftPart::ricci: {
            const LocalGeometry other(rc.rescaled, rc.alpha, p);
            acc.add_tensors(p, other.curvature().ricci - base.curvature().ricci,
                            ricci_shift_prediction(base, rc.resc), rc.context);
            break;
          }
          case ShiftPart::trace:
            acc.add_tensors(p, contract(curvature_shift_prediction(base, rc.resc), 0, 2),
                            ricci_shift_prediction(base, rc.resc), rc.context);
            break;
        }
      });
    }
  }
  return acc;
}

Accumulator type_invariance(const SuiteConfig& cfg, const std::string& id, OperatorType type,
                            const std::function<DensityOperator(const ModelCase&, double alpha)>& make_op,
                            double tol) {
  Accumulator acc;
  for (const RescaledCase& rc : rescaled_cases(cfg)) {
    const DensityOperator op = make_op(*rc.mc, rc.alpha);
    for (const std::string& dens : rc.mc->densities) {
      const WeightedDensity d{field_of(dens, rc.mc->model), type.r};
      CheckReport r = check_type_invariance(id, op, type, rc.mc->model, rc.resc, d, rc.mc->grid, tol);
      r.worst_case += " density=" + dens;
      acc.merge(r);
    }
  }
  return acc;
}

Accumulator hessian_check(const SuiteConfig& cfg, const std::string& id, std::optional<double> k,
                          double tol) {
  return type_invariance(
      cfg, id, {1.0, 1.0},
      [k](const ModelCase& mc, double alpha) -> DensityOperator {
        const HessianSpec spec{k ? *k : HessianSpec::cup_invariant(mc.model.dim()).k};
        return [alpha, spec](const ManifoldModel& m, const ScalarField& f, const Point& p) {
          return LocalGeometry(m, alpha, p).modified_hessian(spec, f);
        };
      },
      tol);
}

Accumulator laplacian_check(const SuiteConfig& cfg, const std::string& id, double s, double tol) {
  return type_invariance(
      cfg, id, {1.0, s},
      [](const ModelCase&, double alpha) -> DensityOperator {
        return [alpha](const ManifoldModel& m, const ScalarField& f, const Point& p) {
          return Tensor::scalar(LocalGeometry(m, alpha, p).cup_laplacian(f));
        };
      },
      tol);
}

Accumulator laplacian_decomp(const SuiteConfig& cfg) {
  Accumulator acc;
  auto one = [&acc](const ManifoldModel& m, double alpha, const ScalarField& f, const Point& p,
                    const std::string& ctx) {
    at_point(p, ctx, [&] {
      const LocalGeometry geom(m, alpha, p);
      const double direct = geom.cup_laplacian(f);
      const double split = geom.cup_laplacian_decomposed(f);
      const double abs_res = std::abs(direct - split);
      acc.add(p, abs_res, abs_res / std::max({1.0, std::abs(direct), std::abs(split)}), ctx);
    });
  };
  for (const ModelCase& mc : cfg.models)
    for (double alpha : cfg.alphas)
      for (const std::string& dens : mc.densities) {
        const ScalarField f = field_of(dens, mc.model);
        const std::string ctx = "model=" + mc.model.name() + " alpha=" + fmt(alpha) + " density=" + dens;
        for (const Point& p : mc.grid) one(mc.model, alpha, f, p, ctx);
      }
  for (const RescaledCase& rc : rescaled_cases(cfg))
    for (const std::string& dens : rc.mc->densities) {
      const WeightedDensity d = transform_density({field_of(dens, rc.mc->model), 1.0}, rc.resc);
      const std::string ctx = rc.context + " (rescaled) density=" + dens;
      for (const Point& p : rc.mc->grid) one(rc.rescaled, rc.alpha, d.f, p, ctx);
    }
  return acc;
}

Accumulator nonlinear_check(const SuiteConfig& cfg) {
  Accumulator acc;
  for (const RescaledCase& rc : rescaled_cases(cfg))
    for (const std::string& dens : rc.mc->densities)
      for (const CouplingSpec& cs : rc.mc->couplings) {
        const WeightedDensity d{field_of(dens, rc.mc->model), 1.0};
        const WeightedDensity dt = transform_density(d, rc.resc);
        const NonlinearCoupling c(field_of(cs.lambda, rc.mc->model), cs.a);
        const NonlinearCoupling ct = transform_coupling(c, rc.resc);
        const std::string ctx =
            rc.context + " density=" + dens + " lambda=" + cs.lambda + " a=" + fmt(cs.a);
        for (const Point& p : rc.mc->grid) {
          at_point(p, ctx, [&] {
            const double lhs = nonlinear_cup_operator(rc.rescaled, rc.alpha, dt.f, ct, p);
            const double rhs = nonlinear_cup_operator(rc.mc->model, rc.alpha, d.f, c, p);
            const double abs_res = std::abs(lhs - rhs);
            acc.add(p, abs_res, abs_res / std::max({1.0, std::abs(lhs), std::abs(rhs)}), ctx);
          });
        }
      }
  return acc;
}

Accumulator integrability(const SuiteConfig& cfg, double tol) {
  Accumulator acc;
  std::size_t flat = 0;
  for (const ModelCase& mc : cfg.models)
    for (double alpha : cfg.alphas) {
      const std::string ctx = "model=" + mc.model.name() + " alpha=" + fmt(alpha);
      for (const Point& p : mc.grid) {
        at_point(p, ctx, [&] {
          const LocalGeometry geom(mc.model, alpha, p);
          const double riem = geom.curvature().riemann.max_abs();
          if (riem <= tol) {
            acc.skip();
            ++flat;
            return;
          }
          const double k = HessianSpec::cup_invariant(mc.model.dim()).k;
          const double abs_res = geom.integrability_residual(k);
          acc.add(p, abs_res, abs_res / std::max(1.0, riem), ctx);
        });
      }
    }
  if (flat > 0) acc.note(std::to_string(flat) + " flat point(s) with max|Riem| <= tolerance skipped");
  return acc;
}

Accumulator fisher_oracle(const SuiteConfig& cfg) {
  Accumulator acc;
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    const ModelCase& mc = cfg.models[m];
    const std::size_t points = std::min(cfg.monte_carlo_points, mc.grid.size());
    for (std::size_t i = 0; i < points; ++i) {
      const std::uint64_t seed = cfg.seed + 1000 * m + i;
      auto spec = sample_spec_for(mc.model, cfg.monte_carlo_count, seed);
      if (!spec) {
        if (i == 0) acc.note("model " + mc.model.name() + " has no sampler; skipped");
        acc.skip(points);
        break;
      }
      const Point& p = mc.grid[i];
      const std::string ctx = "model=" + mc.model.name() + " count=" + std::to_string(cfg.monte_carlo_count);
      at_point(p, ctx, [&] {
        const FisherEstimate est = estimate_fisher_tensors(*spec, p);
        const double z = std::max(max_standard_score(est.metric, est.metric_stderr, mc.model.metric(p)),
                                  max_standard_score(est.skewness, est.skewness_stderr, mc.model.skewness(p)));
        acc.add(p, z, z, ctx);
      });
    }
  }
  return acc;
}

const std::map<std::string, double>& base_tolerances() {
  static const std::map<std::string, double> table = {
      {"metric_compat", 1e-7},  {"codazzi", 1e-7},       {"conn_shift", 1e-7},
      {"curv_shift", 1e-6},     {"ricci_shift", 1e-6},   {"hessian_inv", 1e-7},
      {"laplacian_inv", 1e-7},  {"nonlinear_inv", 1e-7}, {"integrability", 1e-6},
      {"curv_trace", 1e-9},     {"laplacian_decomp", 1e-8}, {"fisher_oracle", 3.0},
  };
  return table;
}

// Negative controls inherit the tolerance of the check they perturb.
std::string tolerance_key(const std::string& id) {
  if (id == "neg_hessian_k0") return "hessian_inv";
  if (id == "neg_sym_averaged") return "conn_shift";
  if (id == "neg_laplacian_s1") return "laplacian_inv";
  return id;
}

CheckKind kind_of(const std::string& id) {
  const auto& neg = negative_control_ids();
  if (std::find(neg.begin(), neg.end(), id) != neg.end()) return CheckKind::negative_control;
  const auto& cons = consistency_check_ids();
  if (std::find(cons.begin(), cons.end(), id) != cons.end()) return CheckKind::consistency;
  return CheckKind::proposition;
}

std::vector<Point> read_points(const json& arr) {
  std::vector<Point> pts;
  for (const json& p : arr) pts.emplace_back(p.get<std::vector<double>>());
  return pts;
}

}  // namespace

bool CheckReport::expectation_met() const {
  if (kind == CheckKind::negative_control) {
    return points_evaluated > 0 && !passed && !(max_rel_residual < kNegativeControlMargin * tolerance);
  }
  return passed;
}

std::string_view to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::proposition: return "proposition";
    case CheckKind::consistency: return "consistency";
    case CheckKind::negative_control: return "negative_control";
  }
  return "unknown";
}

CheckReport check_type_invariance(const std::string& check_id, const DensityOperator& op,
                                  OperatorType type, const ManifoldModel& model,
                                  const CupRescaling& resc, const WeightedDensity& density,
                                  std::span<const Point> points, double tolerance) {
  if (density.weight != type.r) {
    throw ConfigError("density weight " + fmt(density.weight) + " does not match operator type r = " +
                      fmt(type.r));
  }
  const ManifoldModel rescaled = rescaled_model(model, resc);
  const WeightedDensity transformed = transform_density(density, resc);
  std::string ctx = "model=" + model.name() + " alpha=" + fmt(resc.alpha());
  if (!resc.potential_text().empty()) ctx += " potential=" + resc.potential_text();
  Accumulator acc;
  for (const Point& p : points) {
    at_point(p, ctx, [&] {
      const Tensor lhs = op(rescaled, transformed.f, p);
      Tensor rhs = op(model, density.f, p);
      if (type.s != 0.0) rhs *= std::pow(resc.eta(p), type.s);
      acc.add_tensors(p, lhs, rhs, ctx);
    });
  }
  return acc.finish(check_id, kind_of(check_id), tolerance);
}

const std::vector<std::string>& proposition_check_ids() {
  static const std::vector<std::string> ids = {
      "metric_compat", "codazzi",       "conn_shift",    "curv_shift",    "ricci_shift",
      "hessian_inv",   "laplacian_inv", "nonlinear_inv", "integrability",
  };
  return ids;
}

const std::vector<std::string>& consistency_check_ids() {
  static const std::vector<std::string> ids = {"curv_trace", "laplacian_decomp", "fisher_oracle"};
  return ids;
}

const std::vector<std::string>& negative_control_ids() {
  static const std::vector<std::string> ids = {"neg_hessian_k0", "neg_sym_averaged", "neg_laplacian_s1"};
  return ids;
}

bool is_known_check(const std::string& id) {
  for (const auto* list : {&proposition_check_ids(), &consistency_check_ids(), &negative_control_ids()}) {
    if (std::find(list->begin(), list->end(), id) != list->end()) return true;
  }
  return false;
}

double default_tolerance(const std::string& check_id, const SuiteConfig& config) {
  if (auto it = config.tolerance_overrides.find(check_id); it != config.tolerance_overrides.end()) {
    return it->second;
  }
  const std::string key = tolerance_key(check_id);
  if (auto it = config.tolerance_overrides.find(key); it != config.tolerance_overrides.end()) {
    return it->second;
  }
  const double base = base_tolerances().at(key);
  if (key != "fisher_oracle" && any_finite_difference(config)) return std::max(base, 1e-4);
  return base;
}

SuiteConfig default_suite_config() {
  SuiteConfig cfg;
  cfg.alphas = {-1.0, -0.5, 0.0, 0.5, 1.0};

  ModelCase gauss{gaussian_model(), {}, {}, {}, {}};
  for (double mu : {-1.0, 0.0, 1.0})
    for (double sigma : {0.6, 1.0, 1.8}) gauss.grid.push_back(Point{mu, sigma});
  gauss.potentials = {"0.3*mu", "0.2*sigma^2 - 0.1*mu*sigma"};
  gauss.densities = {"1", "1 + 0.1*mu*sigma"};
  gauss.couplings = {{"0.5 + 0.2*sigma", -2.0}, {"0.5 + 0.2*sigma", 0.5}, {"0.5 + 0.2*sigma", 1.0},
                     {"0.5 + 0.2*sigma", 3.0}};

  ModelCase multi{multinomial_model(3), {}, {}, {}, {}};
  const double c = 1.0 / 3.0;
  multi.grid = {Point{c, c}, Point{c + 0.1, c}, Point{c - 0.1, c}, Point{c, c + 0.1}, Point{c, c - 0.1}};
  multi.potentials = {"0.5*p1", "p1*p2 + 0.2*log(p2)"};
  multi.densities = {"1", "1 + 0.1*p1*p2"};
  multi.couplings = {{"1 + p1", -2.0}, {"1 + p1", 0.5}, {"1 + p1", 1.0}, {"1 + p1", 3.0}};

  cfg.models.push_back(std::move(gauss));
  cfg.models.push_back(std::move(multi));
  return cfg;
}

ModelCase generic_model_case(ManifoldModel model, std::vector<Point> grid) {
  const auto& c = model.coord_names();
  const std::string& first = c.front();
  const std::string& last = c.back();
  ModelCase mc{std::move(model), std::move(grid), {}, {}, {}};
  mc.potentials = {"0.3*" + first, "0.1*" + first + "*" + last + " + 0.05*" + last + "^2"};
  mc.densities = {"1", "1 + 0.1*" + first + "*" + last};
  for (double a : {-2.0, 0.5, 1.0, 3.0}) mc.couplings.push_back({"0.5", a});
  return mc;
}

SuiteConfig parse_suite_config(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("suite config is not valid JSON: ") + e.what());
  }
  SuiteConfig cfg;
  try {
    if (!doc.is_object()) throw ConfigError("suite config must be a JSON object");
    cfg.alphas = doc.at("alphas").get<std::vector<double>>();
    if (doc.contains("checks")) cfg.checks = doc.at("checks").get<std::vector<std::string>>();
    cfg.negative_controls = doc.value("negative_controls", true);
    cfg.seed = doc.value("seed", std::uint64_t{42});
    cfg.monte_carlo_count = doc.value("monte_carlo_count", cfg.monte_carlo_count);
    cfg.monte_carlo_points = doc.value("monte_carlo_points", cfg.monte_carlo_points);
    if (doc.contains("hessian_k") && !doc.at("hessian_k").is_null()) cfg.hessian_k = doc.at("hessian_k").get<double>();
    if (doc.contains("tolerances")) {
      for (const auto& [id, tol] : doc.at("tolerances").items()) cfg.tolerance_overrides[id] = tol.get<double>();
    }
    for (const json& entry : doc.at("models")) {
      const json& spec = entry.at("model");
      ManifoldModel model = spec.is_string() ? model_from_name(spec.get<std::string>())
                                             : build_model(parse_model_config(spec.dump()));
      ModelCase mc = generic_model_case(std::move(model), read_points(entry.at("grid")));
      if (entry.contains("potentials")) mc.potentials = entry.at("potentials").get<std::vector<std::string>>();
      if (entry.contains("densities")) mc.densities = entry.at("densities").get<std::vector<std::string>>();
      if (entry.contains("couplings")) {
        mc.couplings.clear();
        for (const json& c : entry.at("couplings")) {
          mc.couplings.push_back({c.at("lambda").get<std::string>(), c.at("a").get<double>()});
        }
      }
      cfg.models.push_back(std::move(mc));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed suite config: ") + e.what());
  }
  validate_suite_config(cfg);
  return cfg;
}

void validate_suite_config(const SuiteConfig& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("suite config: alpha list is empty");
  if (cfg.models.empty()) throw ConfigError("suite config: model list is empty");
  for (double a : cfg.alphas) {
    if (!std::isfinite(a)) throw ConfigError("suite config: alpha values must be finite");
  }
  for (const std::string& id : cfg.checks) {
    if (!is_known_check(id)) throw ConfigError("unknown check id '" + id + "'");
  }
  if (cfg.monte_carlo_count < 1) throw ConfigError("suite config: monte_carlo_count must be positive");
  for (const ModelCase& mc : cfg.models) {
    const std::string& name = mc.model.name();
    if (mc.grid.empty()) throw ConfigError("suite config: grid of model " + name + " is empty");
    if (mc.potentials.empty()) throw ConfigError("suite config: model " + name + " has no rescalings");
    if (mc.densities.empty()) throw ConfigError("suite config: model " + name + " has no densities");
    if (mc.couplings.empty()) throw ConfigError("suite config: model " + name + " has no couplings");
    for (const Point& p : mc.grid) {
      if (!mc.model.contains(p)) {
        throw ConfigError("suite config: grid point " + p.to_string() + " is outside the domain of " + name);
      }
    }
    try {
      for (const auto& text : mc.potentials) Expression::parse(text, mc.model.coord_names());
      for (const auto& text : mc.densities) Expression::parse(text, mc.model.coord_names());
      for (const auto& c : mc.couplings) {
        Expression::parse(c.lambda, mc.model.coord_names());
        if (c.a == 0.0) throw ConfigError("coupling exponent a must be nonzero");
      }
    } catch (const ParseError& e) {
      throw ConfigError("suite config, model " + name + ": " + e.what());
    }
  }
}

CheckReport run_check(const std::string& id, const SuiteConfig& cfg) {
  if (!is_known_check(id)) throw ConfigError("unknown check id '" + id + "'");
  const double tol = default_tolerance(id, cfg);
  Accumulator acc;
  if (id == "metric_compat") acc = metric_compat(cfg);
  else if (id == "codazzi") acc = codazzi(cfg);
  else if (id == "conn_shift") acc = conn_shift(cfg, SymNormalization::cyclic_sum);
  else if (id == "curv_shift") acc = shift_check(cfg, ShiftPart::curvature);
  else if (id == "ricci_shift") acc = shift_check(cfg, ShiftPart::ricci);
  else if (id == "hessian_inv") acc = hessian_check(cfg, id, cfg.hessian_k, tol);
  else if (id == "laplacian_inv") acc = laplacian_check(cfg, id, 0.0, tol);
  else if (id == "nonlinear_inv") acc = nonlinear_check(cfg);
  else if (id == "integrability") acc = integrability(cfg, tol);
  else if (id == "curv_trace") acc = shift_check(cfg, ShiftPart::trace);
  else if (id == "laplacian_decomp") acc = laplacian_decomp(cfg);
  else if (id == "fisher_oracle") acc = fisher_oracle(cfg);
  else if (id == "neg_hessian_k0") acc = hessian_check(cfg, id, 0.0, tol);
  else if (id == "neg_sym_averaged") acc = conn_shift(cfg, SymNormalization::averaged);
  else if (id == "neg_laplacian_s1") acc = laplacian_check(cfg, id, 1.0, tol);
  return acc.finish(id, kind_of(id), tol);
}

bool SuiteResult::ok() const {
  return !reports.empty() &&
         std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.expectation_met(); });
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  validate_suite_config(cfg);
  std::vector<std::string> ids = cfg.checks;
  if (ids.empty()) {
    ids = proposition_check_ids();
    ids.insert(ids.end(), consistency_check_ids().begin(), consistency_check_ids().end());
    if (cfg.negative_controls) ids.insert(ids.end(), negative_control_ids().begin(), negative_control_ids().end());
  }
  std::vector<std::future<CheckReport>> jobs;
  for (const std::string& id : ids) {
    jobs.push_back(std::async(std::launch::async, [&cfg, id] {
      try {
        return run_check(id, cfg);
      } catch (const std::exception& e) {
        CheckReport r;
        r.check_id = id;
        r.kind = kind_of(id);
        r.tolerance = default_tolerance(id, cfg);
        r.passed = false;
        r.notes.push_back(std::string("error: ") + e.what());
        return r;
      }
    }));
  }
  SuiteResult result;
  for (auto& j : jobs) result.reports.push_back(j.get());
  return result;
}

std::string suite_summary_json(const SuiteResult& result) {
  json out = json::array();
  for (const CheckReport& r : result.reports) {
    json j;
    j["check_id"] = r.check_id;
    j["kind"] = std::string(to_string(r.kind));
    j["points_evaluated"] = r.points_evaluated;
    j["points_skipped"] = r.points_skipped;
    j["max_abs_residual"] = r.max_abs_residual;
    j["max_rel_residual"] = r.max_rel_residual;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    j["expectation_met"] = r.expectation_met();
    j["worst_point"] = r.worst_point ? json(std::vector<double>(r.worst_point->coords().begin(),
                                                                r.worst_point->coords().end()))
                                     : json(nullptr);
    j["worst_case"] = r.worst_case;
    j["notes"] = r.notes;
    out.push_back(std::move(j));
  }
  return out.dump(2);
}

}  // namespace cupgeo
