#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cupgeo/model.hpp"

namespace cupgeo {

/// Parsed form of a model config file. Expressions and keys are kept as
/// written so that serialization reproduces them exactly.
struct ModelConfig {
  std::size_t dim = 0;
  std::vector<std::string> coords;
  std::vector<std::pair<std::string, std::string>> metric;
  std::vector<std::pair<std::string, std::string>> skewness;
  std::vector<std::pair<std::string, Bound>> bounds;
  std::optional<double> sum_below;
};

/// Normal family in (mu, sigma): g = diag(1, 2)/sigma^2,
/// t_{mu mu sigma} = 2/sigma^3, t_{sigma sigma sigma} = 8/sigma^3.
ManifoldModel gaussian_model();

/// Categorical distribution over k >= 2 outcomes in the coordinates
/// (p_1, ..., p_{k-1}), p_k = 1 - sum p_i.
ManifoldModel multinomial_model(int categories);

/// Flat chart with g = identity and t = 0. Coordinates are named x, y, z
/// for n <= 3 and x1..xn otherwise.
ManifoldModel euclidean_model(std::size_t dim);

/// Builds a model from a JSON config:
///
///   {"dim": 2, "coords": ["m", "s"],
///    "metric": {"11": "1/s^2", "22": "2/s^2"},
///    "skewness": {"112": "2/s^3", "222": "8/s^3"},
///    "domain": {"s": [0, null]}, "sum_below": 1}
///
/// Index keys are 1-based, either one digit per index or comma-separated.
/// Unlisted components are zero; every diagonal metric entry is required.
/// One skewness representative populates all of its permutations.
ManifoldModel parse_model(std::string_view config_text);
ModelConfig parse_model_config(std::string_view config_text);
ManifoldModel build_model(const ModelConfig& config, std::string name = "custom");

/// JSON text of a parsed model's config; throws ConfigError for models
/// without a config source.
std::string serialize_model(const ManifoldModel& model);
std::string serialize_model_config(const ModelConfig& config);

/// "gaussian", "multinomial:K", "euclidean", "euclidean:N", or a path to a
/// JSON model config.
ManifoldModel model_from_name(const std::string& name);

}  // namespace cupgeo
