#include "cupgeo/cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cupgeo/cup_transform.hpp"
#include "cupgeo/errors.hpp"
#include "cupgeo/expression.hpp"
#include "cupgeo/fisher.hpp"
#include "cupgeo/geometry.hpp"
#include "cupgeo/models.hpp"
#include "cupgeo/verify.hpp"
#include "json.hpp"

namespace cupgeo {
namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json nest(const Tensor& t, std::vector<std::size_t>& idx) {
  if (idx.size() == t.rank()) return t.at(idx);
  json arr = json::array();
  for (std::size_t i = 0; i < t.dim(); ++i) {
    idx.push_back(i);
    arr.push_back(nest(t, idx));
    idx.pop_back();
  }
  return arr;
}

json to_json(const Tensor& t) {
  std::vector<std::size_t> idx;
  return nest(t, idx);
}

void unnest(const json& j, Tensor& t, std::vector<std::size_t>& idx) {
  if (idx.size() == t.rank()) {
    if (!j.is_number()) throw ConfigError("tensor JSON: expected a number");
    t.at(idx) = j.get<double>();
    return;
  }
  if (!j.is_array() || j.size() != t.dim()) throw ConfigError("tensor JSON: shape mismatch");
  for (std::size_t i = 0; i < t.dim(); ++i) {
    idx.push_back(i);
    unnest(j[i], t, idx);
    idx.pop_back();
  }
}

json point_json(const Point& p) { return std::vector<double>(p.coords().begin(), p.coords().end()); }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

void print_tensor(std::ostream& out, std::string_view symbol, const Tensor& t,
                  const std::vector<std::string>& coords) {
  if (t.rank() == 0) {
    out << "  " << symbol << " = " << num(t.scalar_value()) << '\n';
    return;
  }
  std::vector<std::size_t> idx(t.rank(), 0);
  const std::size_t total = t.components().size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t s = t.rank(); s-- > 0;) {
      idx[s] = rest % t.dim();
      rest /= t.dim();
    }
    out << "  " << component_label(symbol, t.variance(), idx, coords) << " = " << num(t.at(idx)) << '\n';
  }
}

struct ModelOptions {
  std::string model = "gaussian";
  std::vector<std::string> points;
  std::optional<double> alpha;
  std::string rescaling;
  bool json = false;
};

void add_model_options(CLI::App* cmd, ModelOptions& o, bool points_required) {
  cmd->add_option("--model", o.model, "built-in model name or model config path");
  auto* pt = cmd->add_option("--point", o.points, "evaluation point as comma-separated reals (repeatable)");
  if (points_required) pt->required();
  cmd->add_option("--alpha", o.alpha, "alpha of the connection family");
  cmd->add_option("--rescaling", o.rescaling, "rescaling config path");
  cmd->add_flag("--json", o.json, "JSON output");
}

std::vector<Point> read_points(const ManifoldModel& model, const std::vector<std::string>& texts) {
  std::vector<Point> pts;
  for (const std::string& t : texts) {
    Point p = parse_point(t);
    if (p.dim() != model.dim()) {
      throw DimensionError("point " + p.to_string() + " has " + std::to_string(p.dim()) +
                           " coordinates; model " + model.name() + " needs " + std::to_string(model.dim()));
    }
    if (!model.contains(p)) throw DomainError("point " + p.to_string() + " is outside the domain of " + model.name());
    pts.push_back(std::move(p));
  }
  return pts;
}

struct Setup {
  ManifoldModel base;
  std::optional<CupRescaling> resc;
  double alpha;
};

Setup load_setup(const ModelOptions& o) {
  ManifoldModel base = model_from_name(o.model);
  std::optional<CupRescaling> resc;
  if (!o.rescaling.empty()) resc = parse_rescaling(read_file(o.rescaling), base.coord_names());
  double alpha = o.alpha ? *o.alpha : (resc ? resc->alpha() : 0.0);
  return {std::move(base), std::move(resc), alpha};
}

int cmd_tensors(const ModelOptions& o, std::ostream& out) {
  const Setup s = load_setup(o);
  const ManifoldModel model = s.resc ? rescaled_model(s.base, *s.resc) : s.base;
  const std::vector<Point> pts = read_points(model, o.points);
  json doc = json::array();
  for (const Point& p : pts) {
    const LocalGeometry geom(model, s.alpha, p);
    const CurvaturePack& c = geom.curvature();
    if (o.json) {
      json j;
      j["model"] = model.name();
      j["alpha"] = s.alpha;
      j["point"] = point_json(p);
      j["metric"] = to_json(geom.metric());
      j["metric_inverse"] = to_json(geom.metric_inverse());
      j["skewness"] = to_json(geom.skewness());
      j["levi_civita"] = to_json(geom.levi_civita().symbols);
      j["connection"] = to_json(geom.connection().symbols);
      j["riemann"] = to_json(c.riemann);
      j["ricci"] = to_json(c.ricci);
      j["scalar_curvature"] = c.scalar;
      doc.push_back(std::move(j));
      continue;
    }
    const auto& names = model.coord_names();
    out << "model " << model.name() << ", alpha " << num(s.alpha) << ", point " << p.to_string() << '\n';
    out << "metric\n";
    print_tensor(out, "g", geom.metric(), names);
    out << "inverse metric\n";
    print_tensor(out, "g", geom.metric_inverse(), names);
    out << "skewness\n";
    print_tensor(out, "t", geom.skewness(), names);
    out << "Levi-Civita connection\n";
    print_tensor(out, "Γ0", geom.levi_civita().symbols, names);
    out << "alpha-connection\n";
    print_tensor(out, "Γ", geom.connection().symbols, names);
    out << "Riemann tensor\n";
    print_tensor(out, "R", c.riemann, names);
    out << "Ricci tensor\n";
    print_tensor(out, "Ric", c.ricci, names);
    out << "scalar curvature\n";
    out << "  R = " << num(c.scalar) << '\n';
  }
  if (o.json) out << doc.dump(2) << '\n';
  return kExitPass;
}

struct LaplacianOptions {
  std::string density = "1";
  double weight = 1.0;
  std::optional<std::string> lambda;
  std::optional<double> a;
};

int cmd_laplacian(const ModelOptions& o, const LaplacianOptions& lo, std::ostream& out) {
  const Setup s = load_setup(o);
  if (lo.lambda.has_value() != lo.a.has_value()) throw ConfigError("--lambda and --a must be given together");
  const auto& coords = s.base.coord_names();
  WeightedDensity d{Expression::parse(lo.density, coords).to_field(), lo.weight};
  std::optional<NonlinearCoupling> coupling;
  if (lo.lambda) coupling.emplace(Expression::parse(*lo.lambda, coords).to_field(), *lo.a);
  ManifoldModel model = s.base;
  if (s.resc) {
    model = rescaled_model(s.base, *s.resc);
    d = transform_density(d, *s.resc);
    if (coupling) coupling = transform_coupling(*coupling, *s.resc);
  }
  const std::vector<Point> pts = read_points(model, o.points);
  json doc = json::array();
  for (const Point& p : pts) {
    const LocalGeometry geom(model, s.alpha, p);
    const double lap = geom.cup_laplacian(d.f);
    std::optional<double> nonlinear;
    if (coupling) nonlinear = geom.nonlinear_cup_operator(d.f, *coupling);
    if (o.json) {
      json j;
      j["model"] = model.name();
      j["alpha"] = s.alpha;
      j["point"] = point_json(p);
      j["density"] = lo.density;
      j["cup_laplacian"] = lap;
      if (nonlinear) j["nonlinear"] = *nonlinear;
      doc.push_back(std::move(j));
    } else {
      out << "point " << p.to_string() << ": cup-Laplacian = " << num(lap);
      if (nonlinear) out << ", with coupling = " << num(*nonlinear);
      out << '\n';
    }
  }
  if (o.json) out << doc.dump(2) << '\n';
  return kExitPass;
}

struct VerifyOptions {
  bool use_default = false;
  std::string config;
  std::vector<std::string> checks;
  std::string model;
  std::vector<std::string> points;
  std::vector<double> alphas;
  std::optional<double> k;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  bool json = false;
};

SuiteConfig build_suite(const VerifyOptions& v) {
  if (v.use_default && !v.config.empty()) throw ConfigError("--default and --config are exclusive");
  SuiteConfig cfg = v.config.empty() ? default_suite_config() : parse_suite_config(read_file(v.config));
  if (!v.model.empty()) {
    std::vector<ModelCase> kept;
    for (const ModelCase& mc : cfg.models) {
      if (mc.model.name() == v.model) kept.push_back(mc);
    }
    if (kept.empty() || !v.points.empty()) {
      ManifoldModel model = model_from_name(v.model);
      if (v.points.empty()) throw ConfigError("--model " + v.model + " has no default grid; give --point");
      kept = {generic_model_case(model, read_points(model, v.points))};
    }
    cfg.models = std::move(kept);
  } else if (!v.points.empty()) {
    throw ConfigError("--point needs --model");
  }
  if (!v.alphas.empty()) cfg.alphas = v.alphas;
  if (!v.checks.empty()) cfg.checks = v.checks;
  if (v.k) cfg.hessian_k = *v.k;
  if (v.seed) cfg.seed = *v.seed;
  if (v.count) cfg.monte_carlo_count = *v.count;
  if (v.tol) {
    for (const auto* ids : {&proposition_check_ids(), &consistency_check_ids(), &negative_control_ids()})
      for (const std::string& id : *ids) {
        if (id != "fisher_oracle") cfg.tolerance_overrides[id] = *v.tol;
      }
  }
  validate_suite_config(cfg);
  return cfg;
}

int cmd_verify(const VerifyOptions& v, std::ostream& out) {
  const SuiteConfig cfg = build_suite(v);
  const SuiteResult result = run_suite(cfg);
  if (v.json) {
    out << suite_summary_json(result) << '\n';
  } else {
    for (const CheckReport& r : result.reports) {
      out << std::left << std::setw(18) << r.check_id << std::setw(17) << to_string(r.kind)
          << " points " << std::setw(5) << r.points_evaluated << " max_rel " << std::setw(13)
          << num(r.max_rel_residual) << " tol " << std::setw(8) << num(r.tolerance) << ' '
          << (r.expectation_met() ? "ok" : "UNEXPECTED") << (r.passed ? " (passed)" : " (failed)") << '\n';
      if (!r.expectation_met() && r.worst_point) {
        out << "    worst at " << r.worst_point->to_string() << ": " << r.worst_case << '\n';
      }
      for (const std::string& n : r.notes) out << "    note: " << n << '\n';
    }
    out << (result.ok() ? "suite passed" : "suite FAILED") << '\n';
  }
  return result.ok() ? kExitPass : kExitCheckFailure;
}

struct EstimateOptions {
  std::size_t count = 1000000;
  std::uint64_t seed = 42;
};

int cmd_estimate(const ModelOptions& o, const EstimateOptions& eo, std::ostream& out) {
  const ManifoldModel model = model_from_name(o.model);
  SampleSpec spec;
  const std::string prefix = "multinomial:";
  if (model.name() == "gaussian") {
    spec = gaussian_sample_spec(eo.count, eo.seed);
  } else if (model.name().rfind(prefix, 0) == 0) {
    spec = categorical_sample_spec(std::stoi(model.name().substr(prefix.size())), eo.count, eo.seed);
  } else {
    throw ConfigError("no sampler for model " + model.name());
  }
  json doc = json::array();
  for (const Point& p : read_points(model, o.points)) {
    const FisherEstimate est = estimate_fisher_tensors(spec, p);
    const Tensor g = model.metric(p);
    const Tensor t = model.skewness(p);
    const double zg = max_standard_score(est.metric, est.metric_stderr, g);
    const double zt = max_standard_score(est.skewness, est.skewness_stderr, t);
    if (o.json) {
      json j;
      j["model"] = model.name();
      j["point"] = point_json(p);
      j["count"] = est.count;
      j["seed"] = eo.seed;
      j["metric"] = to_json(est.metric);
      j["metric_stderr"] = to_json(est.metric_stderr);
      j["metric_closed_form"] = to_json(g);
      j["metric_max_score"] = zg;
      j["skewness"] = to_json(est.skewness);
      j["skewness_stderr"] = to_json(est.skewness_stderr);
      j["skewness_closed_form"] = to_json(t);
      j["skewness_max_score"] = zt;
      doc.push_back(std::move(j));
      continue;
    }
    const auto& names = model.coord_names();
    out << "model " << model.name() << ", point " << p.to_string() << ", " << est.count << " draws\n";
    out << "metric estimate\n";
    print_tensor(out, "g", est.metric, names);
    out << "metric standard error\n";
    print_tensor(out, "se(g)", est.metric_stderr, names);
    out << "skewness estimate\n";
    print_tensor(out, "t", est.skewness, names);
    out << "skewness standard error\n";
    print_tensor(out, "se(t)", est.skewness_stderr, names);
    out << "max standard score vs closed form: metric " << num(zg) << ", skewness " << num(zt) << '\n';
  }
  if (o.json) out << doc.dump(2) << '\n';
  return kExitPass;
}

}  // namespace

Point parse_point(std::string_view text) {
  std::vector<double> coords;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string_view piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (!piece.empty() && piece.front() == '+') piece.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size() || !std::isfinite(v)) {
      throw ConfigError("malformed point '" + std::string(text) + "'");
    }
    coords.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Point(std::move(coords));
}

std::string tensor_to_json(const Tensor& t) { return to_json(t).dump(); }

Tensor tensor_from_json(std::string_view text, std::vector<Slot> variance) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("tensor JSON: ") + e.what());
  }
  std::size_t dim = 1;
  if (!variance.empty()) {
    if (!j.is_array() || j.empty()) throw ConfigError("tensor JSON: expected a nonempty array");
    dim = j.size();
  }
  Tensor t(dim, std::move(variance));
  std::vector<std::size_t> idx;
  unnest(j, t, idx);
  return t;
}

std::string component_label(std::string_view symbol, const std::vector<Slot>& variance,
                            std::span<const std::size_t> index, const std::vector<std::string>& coords) {
  std::string label(symbol);
  std::size_t s = 0;
  while (s < variance.size()) {
    const Slot kind = variance[s];
    std::size_t e = s;
    while (e < variance.size() && variance[e] == kind) ++e;
    label += kind == Slot::contravariant ? "^" : "_";
    const bool braces = e - s > 1 || kind == Slot::covariant;
    if (braces) label += "{";
    for (std::size_t i = s; i < e; ++i) {
      if (i > s) label += " ";
      label += coords.at(index[i]);
    }
    if (braces) label += "}";
    s = e;
  }
  return label;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical-manifold geometry and conformal-projective invariance checks", "cupgeo"};
  app.require_subcommand(1);

  ModelOptions tensors_opts;
  auto* tensors = app.add_subcommand("tensors", "print metric, skewness, connections and curvature");
  add_model_options(tensors, tensors_opts, true);

  ModelOptions lap_opts;
  LaplacianOptions lap_extra;
  auto* lap = app.add_subcommand("laplacian", "evaluate the cup-Laplacian of a density");
  add_model_options(lap, lap_opts, true);
  lap->add_option("--density", lap_extra.density, "density expression in chart coordinates");
  lap->add_option("--weight", lap_extra.weight, "density weight r");
  lap->add_option("--lambda", lap_extra.lambda, "coupling coefficient expression");
  lap->add_option("--a", lap_extra.a, "coupling exponent");

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "run the invariance check suite");
  verify->add_flag("--default", ver.use_default, "use the default suite");
  verify->add_option("--config", ver.config, "suite config path");
  verify->add_option("--check", ver.checks, "check id to run (repeatable)");
  verify->add_option("--model", ver.model, "restrict to one model, or a model with --point grid");
  verify->add_option("--point", ver.points, "grid point (repeatable)");
  verify->add_option("--alpha", ver.alphas, "alpha value (repeatable)");
  verify->add_option("--k", ver.k, "Ricci coupling used by hessian_inv");
  verify->add_option("--tol", ver.tol, "tolerance for every residual check");
  verify->add_option("--seed", ver.seed, "Monte-Carlo seed");
  verify->add_option("--count", ver.count, "Monte-Carlo draws per point");
  verify->add_flag("--json", ver.json, "JSON summary");

  ModelOptions est_opts;
  EstimateOptions est_extra;
  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo estimate of the Fisher metric and skewness");
  estimate->add_option("--model", est_opts.model, "gaussian or multinomial:K");
  estimate->add_option("--point", est_opts.points, "evaluation point (repeatable)")->required();
  estimate->add_option("--count", est_extra.count, "number of draws")->check(CLI::PositiveNumber);
  estimate->add_option("--seed", est_extra.seed, "generator seed");
  estimate->add_flag("--json", est_opts.json, "JSON output");

  std::vector<std::string> argv_store{"cupgeo"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
    return kExitUsage;
  }

  try {
    if (tensors->parsed()) return cmd_tensors(tensors_opts, out);
    if (lap->parsed()) return cmd_laplacian(lap_opts, lap_extra, out);
    if (verify->parsed()) return cmd_verify(ver, out);
    if (estimate->parsed()) return cmd_estimate(est_opts, est_extra, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cupgeo
