// Two-component gamma mixture fitted by EM, thresholded at the crossing of
// the weighted component densities.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "pixelaudit/error.hpp"
#include "pixelaudit/threshold.hpp"

namespace pixelaudit {
namespace {

constexpr double kMinVariance = 1e-12;

double gamma_log_pdf(double x, double shape, double scale) {
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Weighted gamma MLE: solves ln k - digamma(k) = ln(mean) - mean(ln x).
// Returns false when the component has collapsed.
bool gamma_mle(double mean_x, double mean_log_x, double& shape, double& scale) {
  const double s = std::log(mean_x) - mean_log_x;
  if (!(s > 1e-14) || !std::isfinite(s)) return false;
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int i = 0; i < 100; ++i) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = k / 2.0;
    const bool done = std::abs(next - k) <= 1e-12 * k;
    k = next;
    if (done) break;
  }
  shape = k;
  scale = mean_x / k;
  return std::isfinite(shape) && std::isfinite(scale) && shape * scale * scale >= kMinVariance;
}

bool moments_init(std::span<const double> values, double& shape, double& scale) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  if (var < kMinVariance || mean <= 0.0) return false;
  shape = mean * mean / var;
  scale = var / mean;
  return true;
}

}  // namespace

GammaMixtureFit fit_gamma_mixture(std::span<const double> values, int max_iterations,
                                  double tolerance) {
  GammaMixtureFit fit;
  const std::size_t n = values.size();
  if (n < 2) {
    fit.degenerate = true;
    return fit;
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = n / 2;
  if (!moments_init(std::span(sorted).first(half), fit.shape1, fit.scale1) ||
      !moments_init(std::span(sorted).subspan(half), fit.shape2, fit.scale2)) {
    fit.degenerate = true;
    return fit;
  }
  fit.weight = static_cast<double>(half) / static_cast<double>(n);

  std::vector<double> logs(n);
  std::transform(values.begin(), values.end(), logs.begin(), [](double v) { return std::log(v); });
  std::vector<double> resp(n);

  auto log_likelihood = [&](bool fill_resp) {
    double ll = 0.0;
    const double lw1 = std::log(fit.weight);
    const double lw2 = std::log1p(-fit.weight);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = lw1 + gamma_log_pdf(values[i], fit.shape1, fit.scale1);
      const double b = lw2 + gamma_log_pdf(values[i], fit.shape2, fit.scale2);
      const double total = log_sum_exp(a, b);
      ll += total;
      if (fill_resp) resp[i] = std::exp(a - total);
    }
    return ll;
  };

  double ll = log_likelihood(true);
  fit.log_likelihood_trace.push_back(ll);
  for (int iter = 0; iter < max_iterations; ++iter) {
    const GammaMixtureFit previous = fit;
    // M-step.
    double r1 = 0, x1 = 0, l1 = 0, r2 = 0, x2 = 0, l2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r1 += resp[i];
      x1 += resp[i] * values[i];
      l1 += resp[i] * logs[i];
      const double q = 1.0 - resp[i];
      r2 += q;
      x2 += q * values[i];
      l2 += q * logs[i];
    }
    if (r1 < 1e-9 || r2 < 1e-9 ||
        !gamma_mle(x1 / r1, l1 / r1, fit.shape1, fit.scale1) ||
        !gamma_mle(x2 / r2, l2 / r2, fit.shape2, fit.scale2)) {
      fit.degenerate = true;
      break;
    }
    fit.weight = r1 / static_cast<double>(n);

    // E-step. A step that loses likelihood (rounding at convergence) is
    // rejected so the returned parameters are the best seen.
    const double next = log_likelihood(true);
    if (next < ll) {
      fit = previous;
      fit.converged = true;
      break;
    }
    fit.log_likelihood_trace.push_back(next);
    fit.iterations = iter + 1;
    const double gain = next - ll;
    ll = next;
    if (gain < tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.log_likelihood = ll;

  if (fit.mean1() > fit.mean2()) {
    std::swap(fit.shape1, fit.shape2);
    std::swap(fit.scale1, fit.scale2);
    fit.weight = 1.0 - fit.weight;
  }
  return fit;
}

GmmResult threshold_gmm(std::span<const double> scores) {
  if (scores.empty()) throw EmptyScores();
  GmmResult result;
  ThresholdDecision& d = result.decision;
  d.method = ThresholdMethod::kGmm;

  auto fall_back = [&](const std::string& why) {
    const ThresholdDecision otsu = threshold_otsu(build_score_histogram(scores));
    d.threshold = otsu.threshold;
    d.split = otsu.split;
    d.diagnostics.values["fallback"] = 1.0;
    d.diagnostics.notes.push_back(why + ": fell back to Otsu on binned scores");
    d.diagnostics.notes.insert(d.diagnostics.notes.end(), otsu.diagnostics.notes.begin(),
                               otsu.diagnostics.notes.end());
    return result;
  };

  if (scores.size() < 8) return fall_back("too few scores for a mixture fit");

  const double shift = 0.5 / kBins;
  std::vector<double> values(scores.begin(), scores.end());
  for (double& v : values) v = std::max(v, shift);

  result.fit = fit_gamma_mixture(values);
  const GammaMixtureFit& fit = result.fit;
  if (fit.degenerate) return fall_back("DegenerateFit");

  d.diagnostics.values["weight"] = fit.weight;
  d.diagnostics.values["shape1"] = fit.shape1;
  d.diagnostics.values["scale1"] = fit.scale1;
  d.diagnostics.values["shape2"] = fit.shape2;
  d.diagnostics.values["scale2"] = fit.scale2;
  d.diagnostics.values["log_likelihood"] = fit.log_likelihood;
  d.diagnostics.values["iterations"] = fit.iterations;

  // g > 0 where component 1 dominates.
  auto g = [&](double x) {
    return std::log(fit.weight) + gamma_log_pdf(x, fit.shape1, fit.scale1) -
           std::log1p(-fit.weight) - gamma_log_pdf(x, fit.shape2, fit.scale2);
  };
  const double lo = fit.mean1();
  const double hi = fit.mean2();
  constexpr int kGrid = 1024;
  const double g_lo = g(lo);
  double threshold = 0.5 * (lo + hi);
  bool found = false;
  if (g_lo == 0.0) {
    threshold = lo;
    found = true;
  } else {
    double prev_x = lo;
    for (int i = 1; i <= kGrid && !found; ++i) {
      const double x = lo + (hi - lo) * i / kGrid;
      if ((g(x) > 0.0) != (g_lo > 0.0)) {
        double a = prev_x, b = x;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (a + b);
          if ((g(mid) > 0.0) == (g_lo > 0.0)) a = mid; else b = mid;
        }
        threshold = 0.5 * (a + b);
        found = true;
      }
      prev_x = x;
    }
  }
  if (!found) {
    d.diagnostics.values["no_crossing"] = 1.0;
    d.diagnostics.notes.push_back("no density crossing between component means; used midpoint");
  }
  d.threshold = std::clamp(threshold, 0.0, 1.0);
  return result;
}

}  // namespace pixelaudit
