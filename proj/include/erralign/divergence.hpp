#pragma once

#include <vector>

#include "erralign/domain.hpp"
#include "erralign/kernels.hpp"

namespace erralign {

/// Dirichlet prior shape parameters, one per class; all strictly positive.
struct SmoothingPrior {
  static constexpr double kDefaultAlpha = 0.5;

  std::vector<double> alpha;

  static SmoothingPrior uniform(std::size_t classes, double value = kDefaultAlpha);
  void validate(std::size_t classes) const;
};

/// Per ground-truth class: weight and the two smoothed error distributions.
struct ClassErrorProfile {
  struct Entry {
    double weight = 0.0;
    ProbVector dist_a;
    ProbVector dist_b;
  };
  std::vector<Entry> classes;
  std::int64_t total_errors = 0;
};

double jsd(const ProbVector& p, const ProbVector& q, LogBase base = LogBase::two);

/// Confusion counts (rows: truth, cols: prediction) over the run's error set.
/// Instances missing from the run are skipped; the diagonal is zero.
CountMatrix error_confusion_matrix(const GroundTruth& truth, const SystemRun& run);

/// Posterior mean of a Dirichlet(counts + alpha): (f + alpha) / 1^T(f + alpha).
ProbVector dirichlet_row_estimate(std::span<const std::int64_t> counts, const SmoothingPrior& prior);

ClassErrorProfile class_error_profile(const CountMatrix& conf_a, const CountMatrix& conf_b,
                                      const SmoothingPrior& prior);

/// Class-level error distance: sum_c w_c JSD(pi_a_c, pi_b_c), with w_c the share
/// of all errors (both systems) whose ground truth is c.
MetricResult cled(const CountMatrix& conf_a, const CountMatrix& conf_b, const SmoothingPrior& prior,
                  LogBase base = LogBase::two);

/// Class-level error similarity 1 / (1 + CLED).
MetricResult cles(const CountMatrix& conf_a, const CountMatrix& conf_b, const SmoothingPrior& prior,
                  LogBase base = LogBase::two);

/// CLES straight from label runs. The two runs need not cover the same instances.
MetricResult cles_from_runs(const GroundTruth& truth, const SystemRun& run_a, const SystemRun& run_b,
                            const SmoothingPrior& prior, LogBase base = LogBase::two);

/// Similarity of confidence: 1 / (1 + mean per-instance JSD) over shared instances.
MetricResult soc(const ConfidenceTable& conf_a, const ConfidenceTable& conf_b,
                 LogBase base = LogBase::two);

/// SOC restricted to the view's jointly incorrect instances.
MetricResult soce(const ConfidenceTable& conf_a, const ConfidenceTable& conf_b, const JointView& view,
                  LogBase base = LogBase::two);

}  // namespace erralign
