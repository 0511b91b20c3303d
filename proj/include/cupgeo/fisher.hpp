#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cupgeo/jet.hpp"
#include "cupgeo/point.hpp"
#include "cupgeo/tensor.hpp"

namespace cupgeo {

using Sample = std::vector<double>;

/// Monte-Carlo description of a parametric family: draw samples at a
/// parameter point and evaluate the log-likelihood as a jet in the
/// parameters (first partials give the score).
struct SampleSpec {
  std::function<Jet(std::span<const double> sample, std::span<const Jet> theta)> log_likelihood;
  std::function<Sample(const Point&, std::mt19937_64&)> sampler;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Sample means of s_i s_j and s_i s_j s_k with their standard errors.
struct FisherEstimate {
  Tensor metric;
  Tensor metric_stderr;
  Tensor skewness;
  Tensor skewness_stderr;
  std::size_t count = 0;
  /// False when count < 2: standard errors are then undefined (NaN).
  bool stderr_reliable = false;
};

/// Draws are split into fixed-size chunks, each with its own generator
/// seeded from (seed, chunk index), so results do not depend on how many
/// threads run the chunks.
FisherEstimate estimate_fisher_tensors(const SampleSpec& spec, const Point& p);

/// Normal family in (mu, sigma).
SampleSpec gaussian_sample_spec(std::size_t count, std::uint64_t seed);

/// Categorical family with `categories` outcomes in (p_1..p_{k-1}); k = 2
/// is the Bernoulli family.
SampleSpec categorical_sample_spec(int categories, std::size_t count, std::uint64_t seed);

/// Number of standard errors separating estimate and reference, maximized
/// over components. Components with zero standard error count as 0 when
/// they agree to 1e-12 relative and +inf otherwise.
double max_standard_score(const Tensor& estimate, const Tensor& stderr_, const Tensor& reference);

}  // namespace cupgeo
