#pragma once

// Straightforward reference implementations used as test oracles. They share
// no code with the library: every objective is evaluated from scratch per
// split in long double, and clustering is done by breadth-first search.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Counts = std::array<std::int64_t, 256>;
using real = long double;

struct ClassStats {
  real n = 0, mean = 0, var = 0;  // population variance in bin units
};

// Class over bins [a, b] using bin index as the value; two-pass variance.
inline ClassStats class_stats(const Counts& h, int a, int b) {
  ClassStats s;
  real sum = 0;
  for (int k = a; k <= b; ++k) {
    s.n += h[k];
    sum += static_cast<real>(h[k]) * k;
  }
  if (s.n == 0) return s;
  s.mean = sum / s.n;
  real ss = 0;
  for (int k = a; k <= b; ++k) ss += h[k] * (k - s.mean) * (k - s.mean);
  s.var = ss / s.n;
  return s;
}

inline real total(const Counts& h) {
  real t = 0;
  for (auto c : h) t += c;
  return t;
}

// Objective value per split 0..254; nullopt marks inadmissible splits.
using Table = std::vector<std::optional<real>>;

template <typename F>
Table tabulate(F&& objective) {
  Table t(255);
  for (int s = 0; s < 255; ++s) t[s] = objective(s);
  return t;
}

// Lowest index attaining the maximum, -1 when nothing is admissible.
inline int argmax(const Table& t) {
  int best = -1;
  real best_value = -std::numeric_limits<real>::infinity();
  for (int s = 0; s < 255; ++s) {
    if (t[s] && *t[s] > best_value) {
      best_value = *t[s];
      best = s;
    }
  }
  return best;
}

// True when `split` is the oracle's argmax or attains the same maximum within
// a relative tolerance (near-ties may resolve differently in double).
inline bool agrees(const Table& t, int split, real rel = 1e-9L) {
  const int best = argmax(t);
  if (split == best) return true;
  if (best < 0 || split < 0 || split >= 255 || !t[split]) return false;
  const real a = *t[best], b = *t[split];
  return std::fabs(a - b) <= rel * std::max<real>(1, std::fabs(a));
}

inline Table otsu(const Counts& h) {
  const real n = total(h);
  return tabulate([&](int t) -> std::optional<real> {
    const auto lo = class_stats(h, 0, t), hi = class_stats(h, t + 1, 255);
    if (lo.n == 0 || hi.n == 0) return 0.0L;
    return (lo.n / n) * (hi.n / n) * (lo.mean - hi.mean) * (lo.mean - hi.mean);
  });
}

// Negated minimum-error cost; admissible only when both classes vary.
inline Table met(const Counts& h) {
  const real n = total(h);
  return tabulate([&](int t) -> std::optional<real> {
    const auto lo = class_stats(h, 0, t), hi = class_stats(h, t + 1, 255);
    if (lo.n == 0 || hi.n == 0 || lo.var == 0 || hi.var == 0) return std::nullopt;
    const real p0 = lo.n / n, p1 = hi.n / n;
    const real j = 1 + 2 * (p0 * std::log(std::sqrt(lo.var)) + p1 * std::log(std::sqrt(hi.var))) -
                   2 * (p0 * std::log(p0) + p1 * std::log(p1));
    return -j;
  });
}

inline real class_entropy(const Counts& h, int a, int b) {
  real n = 0;
  for (int k = a; k <= b; ++k) n += h[k];
  real e = 0;
  for (int k = a; k <= b; ++k) {
    if (h[k] == 0) continue;
    const real p = h[k] / n;
    e -= p * std::log(p);
  }
  return e;
}

inline Table max_entropy(const Counts& h) {
  return tabulate([&](int t) -> std::optional<real> {
    const auto lo = class_stats(h, 0, t), hi = class_stats(h, t + 1, 255);
    if (lo.n == 0 || hi.n == 0) return std::nullopt;
    return class_entropy(h, 0, t) + class_entropy(h, t + 1, 255);
  });
}

inline Table mve(const Counts& h, int window = 5) {
  const real n = total(h);
  const int r = window / 2;
  return tabulate([&](int t) -> std::optional<real> {
    const int a = std::max(0, t - r), b = std::min(255, t + r);
    real local = 0;
    for (int k = a; k <= b; ++k) local += h[k] / n;
    local /= (b - a + 1);
    const auto lo = class_stats(h, 0, t), hi = class_stats(h, t + 1, 255);
    if (lo.n == 0 || hi.n == 0) return std::nullopt;
    return (1 - local) * (lo.n / n * lo.mean * lo.mean + hi.n / n * hi.mean * hi.mean);
  });
}

// Posterior criterion of generalized histogram thresholding, class scatter in
// bin units, clipped at 1e-30.
inline Table ght(const Counts& h, real nu, real tau, real kappa, real omega) {
  const real tiny = 1e-30L;
  return tabulate([&](int t) -> std::optional<real> {
    const auto lo = class_stats(h, 0, t), hi = class_stats(h, t + 1, 255);
    const real w0 = std::max(tiny, lo.n), w1 = std::max(tiny, hi.n);
    const real p0 = w0 / (w0 + w1), p1 = w1 / (w0 + w1);
    const real d0 = lo.n * lo.var, d1 = hi.n * hi.var;
    const real v0 = std::max(tiny, (p0 * nu * tau * tau + d0) / (p0 * nu + w0));
    const real v1 = std::max(tiny, (p1 * nu * tau * tau + d1) / (p1 * nu + w1));
    return -d0 / v0 - w0 * std::log(v0) + 2 * (w0 + kappa * omega) * std::log(w0) - d1 / v1 -
           w1 * std::log(v1) + 2 * (w1 + kappa * (1 - omega)) * std::log(w1);
  });
}

// Li's fixed-point map at a threshold t (bin units), values at bin centers.
inline std::optional<real> li_map(const Counts& h, real t) {
  real n0 = 0, s0 = 0, n1 = 0, s1 = 0;
  for (int k = 0; k < 256; ++k) {
    const real x = k + 0.5L;
    if (x <= t) {
      n0 += h[k];
      s0 += h[k] * x;
    } else {
      n1 += h[k];
      s1 += h[k] * x;
    }
  }
  if (n0 == 0 || n1 == 0) return std::nullopt;
  const real m0 = s0 / n0, m1 = s1 / n1;
  return (m0 - m1) / (std::log(m0) - std::log(m1));
}

// Connected components of {(i, j): popcount(a_i ^ a_j) <= cutoff}, size >= 2,
// each sorted, ordered by first member.
inline std::vector<std::vector<std::size_t>> hamming_components(const std::vector<std::uint64_t>& h,
                                                                 int cutoff) {
  std::vector<int> comp(h.size(), -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < h.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> members;
    std::queue<std::size_t> q;
    q.push(s);
    comp[s] = static_cast<int>(s);
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      members.push_back(i);
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (comp[j] < 0 && std::popcount(h[i] ^ h[j]) <= cutoff) {
          comp[j] = static_cast<int>(s);
          q.push(j);
        }
      }
    }
    std::sort(members.begin(), members.end());
    if (members.size() >= 2) out.push_back(members);
  }
  return out;
}

// Percentile by sorting and interpolating at position (n-1) q / 100.
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = (v.size() - 1) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - lo);
}

// 4-neighbour Laplacian written as an explicit 3x3 stencil with mirrored
// (edge-excluded) indexing; population variance of the response.
inline double laplacian_variance(const std::vector<double>& p, int w, int h) {
  auto mirror = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  const int kernel[3][3] = {{0, 1, 0}, {1, -4, 1}, {0, 1, 0}};
  std::vector<double> r;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          acc += kernel[dy + 1][dx + 1] * p[mirror(y + dy, h) * w + mirror(x + dx, w)];
      r.push_back(acc);
    }
  }
  double mean = 0;
  for (double v : r) mean += v;
  mean /= r.size();
  double var = 0;
  for (double v : r) var += (v - mean) * (v - mean);
  return var / r.size();
}

}  // namespace oracle
