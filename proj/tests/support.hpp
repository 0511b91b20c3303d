#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

namespace support {

using Vec = std::vector<double>;
using Fn = std::function<Vec(const Vec&)>;

// Small property-testing harness: `trials` cases drawn from a seeded stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
  template <class T>
  const T& pick(const std::vector<T>& items) { return items[index(items.size())]; }

 private:
  std::mt19937_64 gen_;
};

template <class F>
void for_all(std::uint64_t seed, int trials, F&& body) {
  Rng rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    CAPTURE(trial);
    body(rng);
  }
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_diff(const Vec& a, const Vec& b) {
  REQUIRE(a.size() == b.size());
  double scale = 1.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff / scale;
}

// Gauss-Jordan with partial pivoting on a dense row-major matrix.
inline Vec inverse(Vec m, std::size_t n) {
  Vec inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(m[c * n + k], m[piv * n + k]);
      std::swap(inv[c * n + k], inv[piv * n + k]);
    }
    const double d = m[c * n + c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r * n + c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r * n + k] -= f * m[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

// 4th-order central difference of every output of f along coordinate i.
inline Vec partial(const Fn& f, const Vec& x, std::size_t i, double h) {
  auto shifted = [&](double s) {
    Vec y = x;
    y[i] += s * h;
    return f(y);
  };
  const Vec m2 = shifted(-2), m1 = shifted(-1), p1 = shifted(1), p2 = shifted(2);
  Vec d(m1.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (m2[k] - 8 * m1[k] + 8 * p1[k] - p2[k]) / (12 * h);
  return d;
}

// Gamma^k_{ij} at x (stored (k, i, j)) from plain numeric g and t, by
// differencing g directly. `reach` is the distance to the chart boundary
// (capped at 1) and scales the steps.
inline Vec christoffel(const Fn& g, const Fn& t, const Vec& x, double alpha, double reach = 1.0) {
  const std::size_t n = x.size();
  const Vec gx = g(x), tx = t(x), gi = inverse(gx, n);
  std::vector<Vec> dg(n);
  for (std::size_t l = 0; l < n; ++l) dg[l] = partial(g, x, l, 1e-4 * reach);
  Vec out(n * n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          const double first = dg[i][j * n + l] + dg[j][i * n + l] - dg[l][i * n + j];
          s += gi[k * n + l] * (0.5 * first - 0.5 * alpha * tx[(i * n + j) * n + l]);
        }
        out[(k * n + i) * n + j] = s;
      }
  return out;
}

// R^i_{jkl} from nested differences of the Christoffel oracle.
inline Vec riemann(const Fn& g, const Fn& t, const Vec& x, double alpha, double reach = 1.0) {
  const std::size_t n = x.size();
  const Fn gamma = [&](const Vec& y) { return christoffel(g, t, y, alpha, reach); };
  const Vec G = gamma(x);
  std::vector<Vec> dG(n);
  for (std::size_t k = 0; k < n; ++k) dG[k] = partial(gamma, x, k, 2e-3 * reach);
  auto at = [n](const Vec& v, std::size_t a, std::size_t b, std::size_t c) { return v[(a * n + b) * n + c]; };
  Vec out(n * n * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double r = at(dG[k], i, l, j) - at(dG[l], i, k, j);
          for (std::size_t m = 0; m < n; ++m) r += at(G, i, k, m) * at(G, m, l, j) - at(G, i, l, m) * at(G, m, k, j);
          out[((i * n + j) * n + k) * n + l] = r;
        }
  return out;
}

// Closed forms restated independently of the library.
inline Vec gaussian_g(const Vec& x) {
  const double s = x[1];
  return {1 / (s * s), 0, 0, 2 / (s * s)};
}

inline Vec gaussian_t(const Vec& x) {
  const double s3 = x[1] * x[1] * x[1];
  Vec t(8, 0.0);
  t[1] = t[2] = t[4] = 2 / s3;  // (mu mu sigma) and its permutations
  t[7] = 8 / s3;
  return t;
}

// Categorical family: exact expectations by summing over outcomes, so
// these are oracles for E[s_i s_j] and E[s_i s_j s_k].
inline std::vector<Vec> categorical_scores(const Vec& p) {
  const std::size_t n = p.size();
  double last = 1.0;
  for (double v : p) last -= v;
  std::vector<Vec> scores;
  for (std::size_t outcome = 0; outcome <= n; ++outcome) {
    Vec s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (outcome == i ? 1 / p[i] : 0.0) - (outcome == n ? 1 / last : 0.0);
    scores.push_back(s);
  }
  return scores;
}

inline double categorical_prob(const Vec& p, std::size_t outcome) {
  if (outcome < p.size()) return p[outcome];
  double last = 1.0;
  for (double v : p) last -= v;
  return last;
}

inline Vec categorical_g(const Vec& p) {
  const std::size_t n = p.size();
  const auto scores = categorical_scores(p);
  Vec g(n * n, 0.0);
  for (std::size_t o = 0; o < scores.size(); ++o)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += categorical_prob(p, o) * scores[o][i] * scores[o][j];
  return g;
}

inline Vec categorical_t(const Vec& p) {
  const std::size_t n = p.size();
  const auto scores = categorical_scores(p);
  Vec t(n * n * n, 0.0);
  for (std::size_t o = 0; o < scores.size(); ++o)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          t[(i * n + j) * n + k] += categorical_prob(p, o) * scores[o][i] * scores[o][j] * scores[o][k];
  return t;
}

inline double simplex_reach(const Vec& p) {
  double last = 1.0, r = 1.0;
  for (double v : p) {
    last -= v;
    r = std::min(r, v);
  }
  return std::min(r, last);
}

inline Vec random_simplex_point(Rng& rng, std::size_t n) {
  while (true) {
    Vec p(n);
    double s = 0.0;
    for (double& v : p) s += v = rng.uniform(0.05, 0.9);
    if (s < 0.95) return p;
  }
}

}  // namespace support
