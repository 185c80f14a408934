#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pixelaudit/histogram.hpp"
#include "pixelaudit/issues.hpp"

namespace pixelaudit {

enum class ThresholdMethod { kFixed, kOtsu, kMet, kLi, kMaxEntropy, kGht, kMve, kGmm };

inline constexpr std::array<ThresholdMethod, 8> kAllMethods = {
    ThresholdMethod::kFixed,      ThresholdMethod::kOtsu, ThresholdMethod::kMet,
    ThresholdMethod::kLi,         ThresholdMethod::kMaxEntropy, ThresholdMethod::kGht,
    ThresholdMethod::kMve,        ThresholdMethod::kGmm,
};

std::string to_string(ThresholdMethod method);
ThresholdMethod parse_method(const std::string& text);

struct ThresholdDiagnostics {
  std::map<std::string, double> values;  // objective, iterations, fitted params...
  std::vector<std::string> notes;        // warnings such as fallbacks
};

struct ThresholdDecision {
  ThresholdMethod method = ThresholdMethod::kFixed;
  double threshold = 0.0;
  // Last bin of the lower class for split-based methods, -1 otherwise.
  int split = -1;
  ThresholdDiagnostics diagnostics;
};

// Hyperparameters of generalized histogram thresholding. nu and kappa are
// pseudo-counts; tau is a prior standard deviation in bin units.
struct GhtParams {
  double nu = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  double omega = 0.5;

  void validate() const;
};

struct GammaMixtureFit {
  double weight = 0.5;  // mixing proportion of component 1
  double shape1 = 1.0, scale1 = 1.0;
  double shape2 = 1.0, scale2 = 1.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  std::vector<double> log_likelihood_trace;

  double mean1() const { return shape1 * scale1; }
  double mean2() const { return shape2 * scale2; }
};

struct GmmResult {
  ThresholdDecision decision;
  GammaMixtureFit fit;
};

// 256 bins over [0, 1]; throws EmptyScores.
Histogram256 build_score_histogram(std::span<const double> scores);

// Split-based methods return the upper edge of the chosen split bin; ties go to
// the lowest split. Histograms with a single occupied bin fall back to a FIXED
// decision at that bin's lower edge.
ThresholdDecision threshold_otsu(const Histogram256& hist);
ThresholdDecision threshold_met(const Histogram256& hist);  // throws ZeroVarianceClass
ThresholdDecision threshold_li(const Histogram256& hist);
ThresholdDecision threshold_max_entropy(const Histogram256& hist);
ThresholdDecision threshold_ght(const Histogram256& hist, const GhtParams& params);
ThresholdDecision threshold_mve(const Histogram256& hist, int window = 5);
GmmResult threshold_gmm(std::span<const double> scores);

// Two-component gamma mixture EM, exposed for diagnostics and tests.
GammaMixtureFit fit_gamma_mixture(std::span<const double> values, int max_iterations = 500,
                                  double tolerance = 1e-8);

// Ids whose score is strictly below the threshold.
std::set<std::string> flag_by_threshold(const std::map<std::string, double>& scores,
                                        const ThresholdDecision& decision);

// Hard-coded defaults per kind. Kinds flagged on "score != 1" use 1.0.
double default_fixed_threshold(IssueKind kind);
ThresholdDecision fixed_threshold_baseline(IssueKind kind,
                                           std::optional<double> override_value = std::nullopt);

struct ThresholdSettings {
  ThresholdMethod method = ThresholdMethod::kLi;
  GhtParams ght{};
  int mve_window = 5;
  std::map<IssueKind, double> fixed_overrides;
};

// Runs the configured method on a score column.
ThresholdDecision select_threshold(std::span<const double> scores, IssueKind kind,
                                   const ThresholdSettings& settings);

}  // namespace pixelaudit
