#include "cupgeo/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "cupgeo/errors.hpp"

namespace cupgeo {
namespace {

constexpr std::size_t kChunkSize = 1 << 15;

struct Moments {
  std::vector<double> sum2, sq2, sum3, sq3;

  explicit Moments(std::size_t n)
      : sum2(n * n, 0.0), sq2(n * n, 0.0), sum3(n * n * n, 0.0), sq3(n * n * n, 0.0) {}

  void merge(const Moments& o) {
    for (std::size_t i = 0; i < sum2.size(); ++i) {
      sum2[i] += o.sum2[i];
      sq2[i] += o.sq2[i];
    }
    for (std::size_t i = 0; i < sum3.size(); ++i) {
      sum3[i] += o.sum3[i];
      sq3[i] += o.sq3[i];
    }
  }
};

Moments run_chunk(const SampleSpec& spec, const Point& p, std::size_t chunk, std::size_t draws) {
  const std::size_t n = p.dim();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 rng(seq);
  const std::vector<Jet> theta = Jet::variables(p, 1);
  Moments m(n);
  std::vector<double> score(n);
  for (std::size_t d = 0; d < draws; ++d) {
    const Sample x = spec.sampler(p, rng);
    const Jet ll = spec.log_likelihood(x, theta);
    if (!ll.is_finite()) {
      throw DomainError("log-likelihood is not finite for a sample drawn at " + p.to_string());
    }
    for (std::size_t i = 0; i < n; ++i) score[i] = ll.d(i);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double v2 = score[i] * score[j];
        m.sum2[i * n + j] += v2;
        m.sq2[i * n + j] += v2 * v2;
        for (std::size_t k = 0; k < n; ++k) {
          const double v3 = v2 * score[k];
          m.sum3[(i * n + j) * n + k] += v3;
          m.sq3[(i * n + j) * n + k] += v3 * v3;
        }
      }
  }
  return m;
}

void finish(const std::vector<double>& sum, const std::vector<double>& sq, std::size_t count,
            Tensor& mean, Tensor& se) {
  const double N = static_cast<double>(count);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const double mu = sum[i] / N;
    mean.components()[i] = mu;
    if (count < 2) {
      se.components()[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double var = std::max(0.0, (sq[i] - N * mu * mu) / (N - 1.0));
      se.components()[i] = std::sqrt(var / N);
    }
  }
}

}  // namespace

FisherEstimate estimate_fisher_tensors(const SampleSpec& spec, const Point& p) {
  if (spec.count < 1) throw ConfigError("Monte-Carlo sample count must be at least 1");
  if (!spec.sampler || !spec.log_likelihood) throw ConfigError("sample spec is incomplete");
  const std::size_t n = p.dim();
  const std::size_t chunks = (spec.count + kChunkSize - 1) / kChunkSize;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(chunks, std::thread::hardware_concurrency()));

  // Worker w handles chunks w, w + workers, ...; partial results are merged
  // in chunk order afterwards.
  std::vector<Moments> partial(chunks, Moments(n));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        const std::size_t draws = std::min(kChunkSize, spec.count - c * kChunkSize);
        partial[c] = run_chunk(spec, p, c, draws);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  Moments total(n);
  for (const Moments& m : partial) total.merge(m);

  FisherEstimate est;
  est.count = spec.count;
  est.stderr_reliable = spec.count >= 2;
  est.metric = Tensor(n, {Slot::covariant, Slot::covariant});
  est.metric_stderr = est.metric;
  est.skewness = Tensor(n, {Slot::covariant, Slot::covariant, Slot::covariant});
  est.skewness_stderr = est.skewness;
  finish(total.sum2, total.sq2, spec.count, est.metric, est.metric_stderr);
  finish(total.sum3, total.sq3, spec.count, est.skewness, est.skewness_stderr);
  return est;
}

SampleSpec gaussian_sample_spec(std::size_t count, std::uint64_t seed) {
  SampleSpec spec;
  spec.count = count;
  spec.seed = seed;
  spec.sampler = [](const Point& p, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    return Sample{p[0] + p[1] * z(rng)};
  };
  spec.log_likelihood = [](std::span<const double> x, std::span<const Jet> theta) {
    const Jet& mu = theta[0];
    const Jet& sigma = theta[1];
    const Jet r = (x[0] - mu) / sigma;
    return -log(sigma) - 0.5 * r * r;
  };
  return spec;
}

SampleSpec categorical_sample_spec(int categories, std::size_t count, std::uint64_t seed) {
  if (categories < 2) throw ConfigError("categorical family needs at least 2 categories");
  SampleSpec spec;
  spec.count = count;
  spec.seed = seed;
  spec.sampler = [](const Point& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double draw = u(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      acc += p[i];
      if (draw < acc) return Sample{static_cast<double>(i)};
    }
    return Sample{static_cast<double>(p.dim())};
  };
  spec.log_likelihood = [](std::span<const double> x, std::span<const Jet> theta) {
    const auto outcome = static_cast<std::size_t>(x[0]);
    if (outcome < theta.size()) return log(theta[outcome]);
    Jet last(theta[0].dim(), theta[0].order(), 1.0);
    for (const Jet& t : theta) last -= t;
    return log(last);
  };
  return spec;
}

double max_standard_score(const Tensor& estimate, const Tensor& stderr_, const Tensor& reference) {
  double worst = 0.0;
  const double scale = std::max(1.0, reference.max_abs());
  for (std::size_t i = 0; i < estimate.components().size(); ++i) {
    const double diff = std::abs(estimate.components()[i] - reference.components()[i]);
    const double se = stderr_.components()[i];
    double z;
    if (std::isnan(se)) {
      z = std::numeric_limits<double>::infinity();
    } else if (se == 0.0) {
      z = diff <= 1e-12 * scale ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      z = diff / se;
    }
    worst = std::max(worst, z);
  }
  return worst;
}

}  // namespace cupgeo
