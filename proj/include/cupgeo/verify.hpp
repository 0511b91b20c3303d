#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cupgeo/cup_transform.hpp"
#include "cupgeo/fisher.hpp"
#include "cupgeo/model.hpp"

namespace cupgeo {

/// D~(eta^r f) = eta^s D f.
struct OperatorType {
  double r = 0.0;
  double s = 0.0;
};

enum class CheckKind {
  proposition,       // one of the invariance identities
  consistency,       // internal cross-check between two routes
  negative_control,  // deliberately wrong setup that must fail
};

struct CheckReport {
  std::string check_id;
  CheckKind kind = CheckKind::proposition;
  std::size_t points_evaluated = 0;
  std::size_t points_skipped = 0;
  double max_abs_residual = 0.0;
  double max_rel_residual = 0.0;
  double tolerance = 0.0;
  /// max_rel_residual <= tolerance.
  bool passed = false;
  std::optional<Point> worst_point;
  /// Model / alpha / rescaling / density at the worst point.
  std::string worst_case;
  std::vector<std::string> notes;

  /// Negative controls meet expectations when they fail by at least
  /// kNegativeControlMargin x tolerance; everything else when it passes.
  bool expectation_met() const;
};

inline constexpr double kNegativeControlMargin = 1e3;

/// Operator acting on a density over a model, evaluated at a point;
/// scalar operators return rank-0 tensors.
using DensityOperator =
    std::function<Tensor(const ManifoldModel&, const ScalarField&, const Point&)>;

/// Residual |D~(eta^r f) - eta^s D f| (componentwise, normalized by
/// max(1, larger side)) over `points`, with D~ evaluated on the rescaled
/// model. The density's weight must equal type.r.
CheckReport check_type_invariance(const std::string& check_id, const DensityOperator& op,
                                  OperatorType type, const ManifoldModel& model,
                                  const CupRescaling& resc, const WeightedDensity& density,
                                  std::span<const Point> points, double tolerance);

struct CouplingSpec {
  std::string lambda;
  double a = 1.0;
};

/// One model with its evaluation grid and the expressions (in the model's
/// coordinates) for rescaling potentials, densities and couplings.
struct ModelCase {
  ManifoldModel model;
  std::vector<Point> grid;
  std::vector<std::string> potentials;
  std::vector<std::string> densities;
  std::vector<CouplingSpec> couplings;
};

struct SuiteConfig {
  std::vector<ModelCase> models;
  std::vector<double> alphas;
  /// Subset of checks to run; empty means every check.
  std::vector<std::string> checks;
  bool negative_controls = true;
  std::map<std::string, double> tolerance_overrides;
  /// Overrides k = 1/(n-1) in hessian_inv.
  std::optional<double> hessian_k;
  std::uint64_t seed = 42;
  std::size_t monte_carlo_count = 1000000;
  std::size_t monte_carlo_points = 3;
};

/// Gaussian (3x3 grid) and multinomial k = 3 (barycenter plus 4 offsets),
/// alpha in {-1, -0.5, 0, 0.5, 1}, two rescalings and two densities each.
SuiteConfig default_suite_config();

/// Case with generic potentials, densities and couplings built from the
/// model's coordinate names.
ModelCase generic_model_case(ManifoldModel model, std::vector<Point> grid);

SuiteConfig parse_suite_config(std::string_view config_text);

/// Throws ConfigError: empty lists, grid points outside the domain,
/// unparsable expressions, unknown check ids.
void validate_suite_config(const SuiteConfig& config);

/// The nine identity checks, in suite order.
const std::vector<std::string>& proposition_check_ids();
const std::vector<std::string>& consistency_check_ids();
const std::vector<std::string>& negative_control_ids();
bool is_known_check(const std::string& id);

double default_tolerance(const std::string& check_id, const SuiteConfig& config);

/// Runs one check over the whole parameter matrix. Evaluation errors are
/// rethrown with the offending point attached.
CheckReport run_check(const std::string& check_id, const SuiteConfig& config);

struct SuiteResult {
  std::vector<CheckReport> reports;
  /// Every report meets its expectation.
  bool ok() const;
};

/// Runs every selected check (concurrently) and returns reports in a fixed
/// order. A check that throws becomes a failed report with the error in
/// its notes.
SuiteResult run_suite(const SuiteConfig& config);

/// JSON array of report objects.
std::string suite_summary_json(const SuiteResult& result);

std::string_view to_string(CheckKind kind);

}  // namespace cupgeo
