#include "pixelaudit/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pixelaudit/error.hpp"

namespace pixelaudit {
namespace {

__extension__ typedef __int128 int128;

// Exact integer prefix moments over bin index k.
struct PrefixMoments {
  std::array<std::int64_t, kBins + 1> count{};
  std::array<std::int64_t, kBins + 1> first{};
  std::array<int128, kBins + 1> second{};

  explicit PrefixMoments(const Histogram256& hist) {
    for (int k = 0; k < kBins; ++k) {
      const std::int64_t h = hist.counts[k];
      count[k + 1] = count[k] + h;
      first[k + 1] = first[k] + h * k;
      second[k + 1] = second[k] + static_cast<int128>(h) * k * k;
    }
  }
};

struct ClassSums {
  std::int64_t n = 0;
  std::int64_t s = 0;
  int128 q = 0;

  double mean() const { return static_cast<double>(s) / static_cast<double>(n); }
  // Sum of squared deviations, exact until the final conversion.
  double scatter() const {
    const int128 num = static_cast<int128>(n) * q - static_cast<int128>(s) * s;
    return static_cast<double>(num) / static_cast<double>(n);
  }
  bool zero_variance() const {
    return static_cast<int128>(n) * q == static_cast<int128>(s) * s;
  }
};

std::pair<ClassSums, ClassSums> split_classes(const PrefixMoments& m, int split) {
  ClassSums lower{m.count[split + 1], m.first[split + 1], m.second[split + 1]};
  ClassSums upper{m.count[kBins] - lower.n, m.first[kBins] - lower.s, m.second[kBins] - lower.q};
  return {lower, upper};
}

void check_histogram(const Histogram256& hist) {
  if (hist.total < 1) throw EmptyScores();
  if (!(hist.hi > hist.lo)) throw std::invalid_argument("histogram range must satisfy lo < hi");
}

ThresholdDecision from_split(ThresholdMethod method, const Histogram256& hist, int split,
                             double objective) {
  ThresholdDecision d;
  d.method = method;
  d.split = split;
  d.threshold = hist.upper_edge(split);
  d.diagnostics.values["objective"] = objective;
  return d;
}

// Single occupied bin: nothing to separate, so flag nothing.
std::optional<ThresholdDecision> degenerate_fallback(const Histogram256& hist,
                                                     ThresholdMethod requested) {
  if (hist.nonzero_bins() >= 2) return std::nullopt;
  int bin = 0;
  while (bin < kBins - 1 && hist.counts[bin] == 0) ++bin;
  ThresholdDecision d;
  d.method = ThresholdMethod::kFixed;
  d.threshold = hist.lower_edge(bin);
  d.diagnostics.notes.push_back("degenerate histogram: single occupied bin; " +
                                to_string(requested) + " not applicable");
  return d;
}

template <typename Objective>
ThresholdDecision argmax_split(ThresholdMethod method, const Histogram256& hist,
                               Objective&& objective) {
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < kBins - 1; ++t) {
    const std::optional<double> value = objective(t);
    if (value && *value > best_value) {
      best_value = *value;
      best = t;
    }
  }
  if (best < 0) throw std::logic_error("no admissible split");
  return from_split(method, hist, best, best_value);
}

}  // namespace

std::string to_string(ThresholdMethod method) {
  switch (method) {
    case ThresholdMethod::kFixed: return "FIXED";
    case ThresholdMethod::kOtsu: return "OTSU";
    case ThresholdMethod::kMet: return "MET";
    case ThresholdMethod::kLi: return "LI";
    case ThresholdMethod::kMaxEntropy: return "MAX_ENTROPY";
    case ThresholdMethod::kGht: return "GHT";
    case ThresholdMethod::kMve: return "MVE";
    case ThresholdMethod::kGmm: return "GMM";
  }
  return "?";
}

ThresholdMethod parse_method(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MAXENTROPY" || upper == "KAPUR") upper = "MAX_ENTROPY";
  for (ThresholdMethod m : kAllMethods) {
    if (to_string(m) == upper) return m;
  }
  throw ConfigError("unknown threshold method '" + text + "'");
}

void GhtParams::validate() const {
  if (!(nu >= 0.0) || !(tau >= 0.0) || !(kappa >= 0.0)) {
    throw ConfigError("GHT nu, tau and kappa must be non-negative");
  }
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("GHT omega must lie in [0, 1]");
}

Histogram256 build_score_histogram(std::span<const double> scores) {
  if (scores.empty()) throw EmptyScores();
  return make_histogram(scores, 0.0, 1.0);
}

ThresholdDecision threshold_otsu(const Histogram256& hist) {
  check_histogram(hist);
  if (auto d = degenerate_fallback(hist, ThresholdMethod::kOtsu)) return *d;
  const PrefixMoments m(hist);
  const double total = static_cast<double>(hist.total);
  return argmax_split(ThresholdMethod::kOtsu, hist, [&](int t) -> std::optional<double> {
    const auto [lower, upper] = split_classes(m, t);
    if (lower.n == 0 || upper.n == 0) return 0.0;
    const double w0 = static_cast<double>(lower.n) / total;
    const double w1 = static_cast<double>(upper.n) / total;
    const double diff = lower.mean() - upper.mean();
    return w0 * w1 * diff * diff;
  });
}

ThresholdDecision threshold_met(const Histogram256& hist) {
  check_histogram(hist);
  const PrefixMoments m(hist);
  const double total = static_cast<double>(hist.total);
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int t = 0; t < kBins - 1; ++t) {
    const auto [lower, upper] = split_classes(m, t);
    if (lower.n == 0 || upper.n == 0) continue;
    if (lower.zero_variance() || upper.zero_variance()) continue;
    const double p0 = static_cast<double>(lower.n) / total;
    const double p1 = static_cast<double>(upper.n) / total;
    const double sigma0 = std::sqrt(lower.scatter() / static_cast<double>(lower.n));
    const double sigma1 = std::sqrt(upper.scatter() / static_cast<double>(upper.n));
    const double cost = 1.0 + 2.0 * (p0 * std::log(sigma0) + p1 * std::log(sigma1)) -
                        2.0 * (p0 * std::log(p0) + p1 * std::log(p1));
    if (cost < best_cost) {
      best_cost = cost;
      best = t;
    }
  }
  if (best < 0) throw ZeroVarianceClass();
  return from_split(ThresholdMethod::kMet, hist, best, best_cost);
}

ThresholdDecision threshold_li(const Histogram256& hist) {
  check_histogram(hist);
  if (auto d = degenerate_fallback(hist, ThresholdMethod::kLi)) return *d;

  // Bin centers in bin units (k + 0.5) keep the logarithms finite at bin 0.
  auto class_means = [&](double t) {
    double n_below = 0, s_below = 0, n_above = 0, s_above = 0;
    for (int k = 0; k < kBins; ++k) {
      const double h = static_cast<double>(hist.counts[k]);
      if (h == 0) continue;
      const double x = k + 0.5;
      if (x <= t) {
        n_below += h;
        s_below += h * x;
      } else {
        n_above += h;
        s_above += h * x;
      }
    }
    return std::pair{n_below > 0 ? s_below / n_below : 0.0, n_above > 0 ? s_above / n_above : 0.0};
  };
  auto next_of = [](double mean_below, double mean_above) {
    return (mean_below - mean_above) / (std::log(mean_below) - std::log(mean_above));
  };

  double mean = 0.0;
  for (int k = 0; k < kBins; ++k) mean += (k + 0.5) * static_cast<double>(hist.counts[k]);
  mean /= static_cast<double>(hist.total);

  constexpr int kMaxIterations = 100;
  double t = mean;
  double next = t;
  int iterations = 0;
  bool converged = false;
  while (iterations < kMaxIterations) {
    const auto [below, above] = class_means(t);
    if (below <= 0.0 || above <= 0.0) break;  // one class emptied out
    next = next_of(below, above);
    ++iterations;
    if (std::abs(next - t) < 0.5) {
      // t is the point whose image stayed within half a bin.
      next = t;
      converged = true;
      break;
    }
    t = next;
  }

  ThresholdDecision d;
  d.method = ThresholdMethod::kLi;
  const double t_bins = std::clamp(next, 0.0, static_cast<double>(kBins));
  d.threshold = hist.lo + t_bins * hist.bin_width();
  d.diagnostics.values["iterations"] = iterations;
  d.diagnostics.values["converged"] = converged ? 1.0 : 0.0;
  d.diagnostics.values["threshold_bins"] = t_bins;
  const auto [below, above] = class_means(t_bins);
  if (below > 0.0 && above > 0.0) {
    d.diagnostics.values["stationarity_residual"] = std::abs(next_of(below, above) - t_bins);
  }
  if (!converged) d.diagnostics.notes.push_back("NonConvergence: returned last iterate");
  return d;
}

ThresholdDecision threshold_max_entropy(const Histogram256& hist) {
  check_histogram(hist);
  if (auto d = degenerate_fallback(hist, ThresholdMethod::kMaxEntropy)) return *d;
  // Prefix sums of h*ln(h); class entropy = ln(N) - sum(h ln h)/N.
  std::array<double, kBins + 1> hlogh{};
  std::array<std::int64_t, kBins + 1> count{};
  for (int k = 0; k < kBins; ++k) {
    const double h = static_cast<double>(hist.counts[k]);
    hlogh[k + 1] = hlogh[k] + (h > 0 ? h * std::log(h) : 0.0);
    count[k + 1] = count[k] + hist.counts[k];
  }
  return argmax_split(ThresholdMethod::kMaxEntropy, hist, [&](int t) -> std::optional<double> {
    const double n0 = static_cast<double>(count[t + 1]);
    const double n1 = static_cast<double>(count[kBins] - count[t + 1]);
    if (n0 == 0 || n1 == 0) return std::nullopt;
    const double h0 = std::log(n0) - hlogh[t + 1] / n0;
    const double h1 = std::log(n1) - (hlogh[kBins] - hlogh[t + 1]) / n1;
    return h0 + h1;
  });
}

ThresholdDecision threshold_ght(const Histogram256& hist, const GhtParams& params) {
  check_histogram(hist);
  params.validate();
  const PrefixMoments m(hist);
  const double tiny = 1e-30;
  auto clip = [tiny](double v) { return std::max(tiny, v); };
  ThresholdDecision d =
      argmax_split(ThresholdMethod::kGht, hist, [&](int t) -> std::optional<double> {
        const auto [lower, upper] = split_classes(m, t);
        const double w0 = clip(static_cast<double>(lower.n));
        const double w1 = clip(static_cast<double>(upper.n));
        const double p0 = w0 / (w0 + w1);
        const double p1 = w1 / (w0 + w1);
        const double d0 = lower.n > 0 ? lower.scatter() : 0.0;
        const double d1 = upper.n > 0 ? upper.scatter() : 0.0;
        const double prior = params.nu * params.tau * params.tau;
        const double v0 = clip((p0 * prior + d0) / (p0 * params.nu + w0));
        const double v1 = clip((p1 * prior + d1) / (p1 * params.nu + w1));
        const double f0 = -d0 / v0 - w0 * std::log(v0) +
                          2.0 * (w0 + params.kappa * params.omega) * std::log(w0);
        const double f1 = -d1 / v1 - w1 * std::log(v1) +
                          2.0 * (w1 + params.kappa * (1.0 - params.omega)) * std::log(w1);
        return f0 + f1;
      });
  d.diagnostics.values["nu"] = params.nu;
  d.diagnostics.values["tau"] = params.tau;
  d.diagnostics.values["kappa"] = params.kappa;
  d.diagnostics.values["omega"] = params.omega;
  return d;
}

ThresholdDecision threshold_mve(const Histogram256& hist, int window) {
  check_histogram(hist);
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("MVE window must be odd");
  if (auto d = degenerate_fallback(hist, ThresholdMethod::kMve)) return *d;
  const PrefixMoments m(hist);
  const double total = static_cast<double>(hist.total);
  const int radius = window / 2;
  ThresholdDecision d =
      argmax_split(ThresholdMethod::kMve, hist, [&](int t) -> std::optional<double> {
        const int a = std::max(0, t - radius);
        const int b = std::min(kBins - 1, t + radius);
        const double smoothed = static_cast<double>(m.count[b + 1] - m.count[a]) / total /
                                static_cast<double>(b - a + 1);
        const auto [lower, upper] = split_classes(m, t);
        if (lower.n == 0 || upper.n == 0) return std::nullopt;
        const double spread = static_cast<double>(lower.n) / total * lower.mean() * lower.mean() +
                              static_cast<double>(upper.n) / total * upper.mean() * upper.mean();
        return (1.0 - smoothed) * spread;
      });
  d.diagnostics.values["window"] = window;
  return d;
}

std::set<std::string> flag_by_threshold(const std::map<std::string, double>& scores,
                                        const ThresholdDecision& decision) {
  std::set<std::string> flagged;
  for (const auto& [id, score] : scores) {
    if (score < decision.threshold) flagged.insert(id);
  }
  return flagged;
}

double default_fixed_threshold(IssueKind kind) {
  switch (kind) {
    case IssueKind::kLight: return 0.05;
    case IssueKind::kDark: return 0.32;
    case IssueKind::kBlurry: return 0.3;
    case IssueKind::kLowInformation: return 0.3;
    case IssueKind::kOddSize: return 0.5;
    case IssueKind::kOddAspectRatio: return 0.35;
    case IssueKind::kGrayscale:
    case IssueKind::kExactDuplicate:
    case IssueKind::kNearDuplicate: return 1.0;
  }
  return 1.0;
}

ThresholdDecision fixed_threshold_baseline(IssueKind kind, std::optional<double> override_value) {
  ThresholdDecision d;
  d.method = ThresholdMethod::kFixed;
  d.threshold = override_value.value_or(default_fixed_threshold(kind));
  return d;
}

ThresholdDecision select_threshold(std::span<const double> scores, IssueKind kind,
                                   const ThresholdSettings& settings) {
  if (!is_thresholded(kind) || settings.method == ThresholdMethod::kFixed) {
    std::optional<double> override_value;
    if (const auto it = settings.fixed_overrides.find(kind); it != settings.fixed_overrides.end()) {
      override_value = it->second;
    }
    return fixed_threshold_baseline(kind, override_value);
  }
  if (settings.method == ThresholdMethod::kGmm) return threshold_gmm(scores).decision;
  const Histogram256 hist = build_score_histogram(scores);
  switch (settings.method) {
    case ThresholdMethod::kOtsu: return threshold_otsu(hist);
    case ThresholdMethod::kMet: return threshold_met(hist);
    case ThresholdMethod::kLi: return threshold_li(hist);
    case ThresholdMethod::kMaxEntropy: return threshold_max_entropy(hist);
    case ThresholdMethod::kGht: return threshold_ght(hist, settings.ght);
    case ThresholdMethod::kMve: return threshold_mve(hist, settings.mve_window);
    default: break;
  }
  throw std::logic_error("unhandled threshold method");
}

}  // namespace pixelaudit
