#include "cupgeo/models.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <cctype>
#include <cmath>

#include "json.hpp"
#include <sstream>

#include "cupgeo/errors.hpp"
#include "cupgeo/expression.hpp"

namespace cupgeo {
namespace {

using json = nlohmann::ordered_json;

std::vector<Jet> zeros(std::size_t count, std::size_t dim, int order) {
  return std::vector<Jet>(count, Jet(dim, order));
}

// Writes `value` into every permutation of (i, j, k).
void set_sym3(std::vector<Jet>& t, std::size_t n, std::size_t i, std::size_t j, std::size_t k,
              const Jet& value) {
  std::array<std::size_t, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  do {
    t[(idx[0] * n + idx[1]) * n + idx[2]] = value;
  } while (std::next_permutation(idx.begin(), idx.end()));
}

std::vector<std::size_t> parse_index_key(const std::string& key, std::size_t rank, std::size_t dim) {
  std::vector<std::size_t> idx;
  auto push = [&](std::string_view digits) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || v < 1 || v > dim) {
      throw ConfigError("component key '" + key + "' has an invalid index (indices are 1-based, dim " +
                        std::to_string(dim) + ")");
    }
    idx.push_back(v - 1);
  };
  if (key.find(',') != std::string::npos) {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = key.find(',', start);
      push(std::string_view(key).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else {
    for (std::size_t i = 0; i < key.size(); ++i) push(std::string_view(key).substr(i, 1));
  }
  if (idx.size() != rank) {
    throw ConfigError("component key '" + key + "' must name exactly " + std::to_string(rank) +
                      " indices");
  }
  return idx;
}

struct Component {
  std::vector<std::size_t> index;  // sorted representative
  Expression expr;
};

// Parses and de-duplicates symmetric components. Two keys naming the same
// symmetry class must carry identical expressions.
std::vector<Component> compile_components(const std::vector<std::pair<std::string, std::string>>& entries,
                                          std::size_t rank, const ModelConfig& cfg,
                                          const char* what) {
  std::map<std::vector<std::size_t>, std::pair<std::string, std::string>> seen;
  std::vector<Component> out;
  for (const auto& [key, text] : entries) {
    std::vector<std::size_t> idx = parse_index_key(key, rank, cfg.dim);
    std::sort(idx.begin(), idx.end());
    if (auto it = seen.find(idx); it != seen.end()) {
      if (it->second.second != text) {
        throw ConfigError(std::string(what) + " components '" + it->second.first + "' and '" + key +
                          "' are permutations of each other but differ");
      }
      continue;
    }
    seen.emplace(idx, std::make_pair(key, text));
    Expression e;
    try {
      e = Expression::parse(text, cfg.coords);
    } catch (const ParseError& err) {
      throw ParseError(std::string(what) + " component '" + key + "': " + err.what(), err.position());
    }
    out.push_back({idx, std::move(e)});
  }
  return out;
}

Bound read_bound(const json& b, const std::string& coord) {
  if (!b.is_array() || b.size() != 2) {
    throw ConfigError("domain bound for '" + coord + "' must be [lower, upper]");
  }
  Bound out;
  if (!b[0].is_null()) out.lower = b[0].get<double>();
  if (!b[1].is_null()) out.upper = b[1].get<double>();
  if (!(out.lower < out.upper)) throw ConfigError("domain bound for '" + coord + "' is empty");
  return out;
}

std::vector<std::pair<std::string, std::string>> read_components(const json& doc, const char* field) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!doc.contains(field)) return out;
  const json& obj = doc.at(field);
  if (!obj.is_object()) throw ConfigError(std::string("'") + field + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_string()) {
      throw ConfigError(std::string(field) + " component '" + key + "' must be an expression string");
    }
    out.emplace_back(key, value.get<std::string>());
  }
  return out;
}

}  // namespace

ManifoldModel gaussian_model() {
  auto metric = [](const Point& p, int order) {
    const Jet s = Jet::variable(2, order, 1, p[1]);
    const Jet inv2 = pow(s, -2.0);
    auto g = zeros(4, 2, order);
    g[0] = inv2;
    g[3] = 2.0 * inv2;
    return g;
  };
  auto skewness = [](const Point& p, int order) {
    const Jet s = Jet::variable(2, order, 1, p[1]);
    const Jet inv3 = pow(s, -3.0);
    auto t = zeros(8, 2, order);
    set_sym3(t, 2, 0, 0, 1, 2.0 * inv3);
    set_sym3(t, 2, 1, 1, 1, 8.0 * inv3);
    return t;
  };
  Domain domain({Bound{}, Bound{0.0}});
  return ManifoldModel("gaussian", {"mu", "sigma"}, std::move(domain), metric, skewness);
}

ManifoldModel multinomial_model(int categories) {
  if (categories < 2) throw ConfigError("multinomial model needs at least 2 categories");
  const auto n = static_cast<std::size_t>(categories - 1);
  auto last_prob = [n](const std::vector<Jet>& p) {
    Jet pk(n, p[0].order(), 1.0);
    for (const Jet& pi : p) pk -= pi;
    return pk;
  };
  auto metric = [n, last_prob](const Point& p, int order) {
    const auto vars = Jet::variables(p, order);
    const Jet inv_last = reciprocal(last_prob(vars));
    std::vector<Jet> g(n * n, inv_last);
    for (std::size_t i = 0; i < n; ++i) g[i * n + i] += reciprocal(vars[i]);
    return g;
  };
  // Third score moment of a categorical draw:
  // E[s_i s_j s_k] = [i=j=k]/p_i^2 - 1/p_k^2.
  auto skewness = [n, last_prob](const Point& p, int order) {
    const auto vars = Jet::variables(p, order);
    const Jet inv_last2 = -pow(last_prob(vars), -2.0);
    std::vector<Jet> t(n * n * n, inv_last2);
    for (std::size_t i = 0; i < n; ++i) t[(i * n + i) * n + i] += pow(vars[i], -2.0);
    return t;
  };
  std::vector<std::string> coords;
  for (std::size_t i = 0; i < n; ++i) coords.push_back("p" + std::to_string(i + 1));
  Domain domain(std::vector<Bound>(n, Bound{0.0, 1.0}), 1.0);
  return ManifoldModel("multinomial:" + std::to_string(categories), std::move(coords),
                       std::move(domain), metric, skewness);
}

ManifoldModel euclidean_model(std::size_t dim) {
  if (dim == 0) throw ConfigError("euclidean model needs a positive dimension");
  std::vector<std::string> coords;
  if (dim <= 3) {
    const std::array<const char*, 3> names{"x", "y", "z"};
    for (std::size_t i = 0; i < dim; ++i) coords.emplace_back(names[i]);
  } else {
    for (std::size_t i = 0; i < dim; ++i) coords.push_back("x" + std::to_string(i + 1));
  }
  auto metric = [dim](const Point&, int order) {
    auto g = zeros(dim * dim, dim, order);
    for (std::size_t i = 0; i < dim; ++i) g[i * dim + i] = Jet(dim, order, 1.0);
    return g;
  };
  auto skewness = [dim](const Point&, int order) { return zeros(dim * dim * dim, dim, order); };
  return ManifoldModel(dim == 2 ? "euclidean" : "euclidean:" + std::to_string(dim), std::move(coords),
                       Domain::unbounded(dim), metric, skewness);
}

ModelConfig parse_model_config(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
  ModelConfig cfg;
  try {
    if (!doc.contains("dim")) throw ConfigError("model config needs 'dim'");
    const auto dim = doc.at("dim").get<long long>();
    if (dim < 1) throw ConfigError("'dim' must be positive");
    cfg.dim = static_cast<std::size_t>(dim);
    if (!doc.contains("coords")) throw ConfigError("model config needs 'coords'");
    cfg.coords = doc.at("coords").get<std::vector<std::string>>();
    cfg.metric = read_components(doc, "metric");
    cfg.skewness = read_components(doc, "skewness");
    if (doc.contains("domain")) {
      for (const auto& [coord, bound] : doc.at("domain").items()) {
        cfg.bounds.emplace_back(coord, read_bound(bound, coord));
      }
    }
    if (doc.contains("sum_below") && !doc.at("sum_below").is_null()) {
      cfg.sum_below = doc.at("sum_below").get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model config: ") + e.what());
  }
  if (cfg.coords.size() != cfg.dim) {
    throw ConfigError("model declares dim " + std::to_string(cfg.dim) + " but " +
                      std::to_string(cfg.coords.size()) + " coordinate names");
  }
  for (std::size_t i = 0; i < cfg.coords.size(); ++i) {
    const std::string& c = cfg.coords[i];
    if (c.empty() || !(std::isalpha(static_cast<unsigned char>(c[0])) || c[0] == '_')) {
      throw ConfigError("invalid coordinate name '" + c + "'");
    }
    if (std::find(cfg.coords.begin(), cfg.coords.begin() + static_cast<long>(i), c) !=
        cfg.coords.begin() + static_cast<long>(i)) {
      throw ConfigError("duplicate coordinate name '" + c + "'");
    }
  }
  for (const auto& [coord, bound] : cfg.bounds) {
    if (std::find(cfg.coords.begin(), cfg.coords.end(), coord) == cfg.coords.end()) {
      throw ConfigError("domain names unknown coordinate '" + coord + "'");
    }
  }
  return cfg;
}

ManifoldModel build_model(const ModelConfig& cfg, std::string name) {
  const std::size_t n = cfg.dim;
  const auto metric_parts = compile_components(cfg.metric, 2, cfg, "metric");
  const auto skew_parts = compile_components(cfg.skewness, 3, cfg, "skewness");
  if (metric_parts.size() > n * (n + 1) / 2) throw ConfigError("too many metric components");
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_diag = std::any_of(metric_parts.begin(), metric_parts.end(), [i](const Component& c) {
      return c.index[0] == i && c.index[1] == i;
    });
    if (!has_diag) {
      throw ConfigError("metric component " + std::to_string(i + 1) + std::to_string(i + 1) +
                        " is missing; every diagonal entry is required");
    }
  }

  auto metric = [n, metric_parts](const Point& p, int order) {
    const auto vars = Jet::variables(p, order);
    auto g = zeros(n * n, n, order);
    for (const Component& c : metric_parts) {
      const Jet v = c.expr.evaluate(vars);
      g[c.index[0] * n + c.index[1]] = v;
      g[c.index[1] * n + c.index[0]] = v;
    }
    return g;
  };
  auto skewness = [n, skew_parts](const Point& p, int order) {
    const auto vars = Jet::variables(p, order);
    auto t = zeros(n * n * n, n, order);
    for (const Component& c : skew_parts) {
      set_sym3(t, n, c.index[0], c.index[1], c.index[2], c.expr.evaluate(vars));
    }
    return t;
  };

  std::vector<Bound> bounds(n);
  for (const auto& [coord, bound] : cfg.bounds) {
    const auto it = std::find(cfg.coords.begin(), cfg.coords.end(), coord);
    bounds[static_cast<std::size_t>(it - cfg.coords.begin())] = bound;
  }
  ManifoldModel model(std::move(name), cfg.coords, Domain(std::move(bounds), cfg.sum_below), metric,
                      skewness);
  return model.with_source(std::make_shared<const ModelConfig>(cfg));
}

ManifoldModel parse_model(std::string_view config_text) {
  return build_model(parse_model_config(config_text));
}

std::string serialize_model_config(const ModelConfig& cfg) {
  json doc;
  doc["dim"] = cfg.dim;
  doc["coords"] = cfg.coords;
  doc["metric"] = json::object();
  for (const auto& [k, v] : cfg.metric) doc["metric"][k] = v;
  doc["skewness"] = json::object();
  for (const auto& [k, v] : cfg.skewness) doc["skewness"][k] = v;
  if (!cfg.bounds.empty()) {
    doc["domain"] = json::object();
    for (const auto& [coord, b] : cfg.bounds) {
      json lo = std::isfinite(b.lower) ? json(b.lower) : json(nullptr);
      json hi = std::isfinite(b.upper) ? json(b.upper) : json(nullptr);
      doc["domain"][coord] = json::array({lo, hi});
    }
  }
  if (cfg.sum_below) doc["sum_below"] = *cfg.sum_below;
  return doc.dump(2);
}

std::string serialize_model(const ManifoldModel& model) {
  if (!model.source()) {
    throw ConfigError("model '" + model.name() + "' was not built from a config and cannot be serialized");
  }
  return serialize_model_config(*model.source());
}

ManifoldModel model_from_name(const std::string& name) {
  if (name == "gaussian") return gaussian_model();
  if (name == "euclidean") return euclidean_model(2);
  auto suffix_int = [&](std::string_view prefix) -> std::optional<int> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    int v = 0;
    const char* first = name.data() + prefix.size();
    const char* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError("malformed model name '" + name + "'");
    return v;
  };
  if (auto k = suffix_int("multinomial:")) return multinomial_model(*k);
  if (auto d = suffix_int("euclidean:")) {
    if (*d < 1) throw ConfigError("euclidean dimension must be positive");
    return euclidean_model(static_cast<std::size_t>(*d));
  }
  if (std::filesystem::is_regular_file(name)) {
    std::ifstream in(name);
    std::stringstream buf;
    buf << in.rdbuf();
    return build_model(parse_model_config(buf.str()), std::filesystem::path(name).stem().string());
  }
  throw ConfigError("unknown model '" + name + "' (expected gaussian, multinomial:K, euclidean[:N] or a config path)");
}

}  // namespace cupgeo
