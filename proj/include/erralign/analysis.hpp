#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erralign/divergence.hpp"
#include "erralign/domain.hpp"

namespace erralign {

enum class Metric { cka, cles, ec, ma, soc, soce };

const char* metric_name(Metric m);
Metric parse_metric(const std::string& name);
/// Comma-separated list, e.g. "ma,ec,cles". Duplicates removed, order kept.
std::vector<Metric> parse_metric_list(const std::string& list);

struct ScoreRow {
  std::string domain;
  std::string system_a;
  std::string system_b;
  std::string metric;
  std::optional<double> value;
  std::string reason;
  std::size_t support = 0;
};

/// Scores for unordered system pairs. After canonicalize(): system_a < system_b,
/// rows sorted by (domain, system_a, system_b, metric), keys unique.
struct PairwiseScoreTable {
  std::vector<ScoreRow> rows;

  void canonicalize();
  void append(const PairwiseScoreTable& other);
};

using FamilyMap = std::map<std::string, std::string>;

struct AuxInputs {
  std::map<std::string, ConfidenceTable> confidences;
  std::map<std::string, RepresentationMatrix> representations;
};

struct ScoringOptions {
  double alpha = SmoothingPrior::kDefaultAlpha;
  LogBase log_base = LogBase::two;
};

/// Computes one metric for one system pair. Instance-paired metrics that find no
/// common instances are reported as Undefined rather than thrown.
MetricResult score_pair(Metric metric, const GroundTruth& truth, const SystemRun& a, const SystemRun& b,
                        const AuxInputs& aux, const ScoringOptions& options);

/// Every unordered pair x every metric. Pairs are scored concurrently; the
/// output does not depend on the thread count or on the order of `systems`.
PairwiseScoreTable pairwise_scores(const std::string& domain, const std::vector<SystemRun>& systems,
                                   const GroundTruth& truth, const std::vector<Metric>& metrics,
                                   const AuxInputs& aux, const ScoringOptions& options = {});

/// Spearman's rank correlation with average ranks for ties.
/// nullopt when n < 3 or either rank vector has zero variance.
std::optional<double> spearman_r(const std::vector<double>& xs, const std::vector<double>& ys);

struct MetricPair {
  std::string x;
  std::string y;
};
/// "ma:cles,ec:ma" style list.
std::vector<MetricPair> parse_metric_pairs(const std::string& list);

enum class CorrelationScope { global, average, domain };
const char* scope_name(CorrelationScope s);

struct CorrelationRow {
  std::string metric_x;
  std::string metric_y;
  CorrelationScope scope = CorrelationScope::global;
  std::string domain;  // only for CorrelationScope::domain
  std::optional<double> r;
  std::string reason;
  std::size_t n = 0;        // pairs used (domains averaged, for the average row)
  std::size_t dropped = 0;  // pairs with an undefined coordinate (domains excluded, for the average row)
};

struct CorrelationOptions {
  /// Replace MA by log(MA); non-positive MA becomes undefined.
  bool log_ma = false;
  /// Rows for which this returns false are ignored (e.g. machine-machine only).
  std::function<bool(const ScoreRow&)> include;
};

/// Global r pools every (domain, pair); average r is the unweighted mean of
/// per-domain r over domains where r is defined. Per-domain rows are included
/// in the output after the global and average rows of each metric pair.
std::vector<CorrelationRow> correlation_report(const PairwiseScoreTable& table,
                                               const std::vector<MetricPair>& pairs,
                                               const CorrelationOptions& options = {});

struct ZScoreRow {
  std::string domain;
  std::string system_a;
  std::string system_b;
  std::string family_pair;
  std::string metric;
  std::optional<double> raw;
  std::optional<double> z;
  std::string reason;
};

/// Canonical family pair label, e.g. ("human", "CNN") -> "CNN-human".
std::string family_pair(const std::string& fa, const std::string& fb);

/// z = (v - mean) / std within each metric over all defined rows, population std.
std::vector<ZScoreRow> zscore_by_metric(const PairwiseScoreTable& table, const FamilyMap& families);

/// Copy of the table with an extra "log_ma" row for every "ma" row.
PairwiseScoreTable with_log_ma(const PairwiseScoreTable& table);

}  // namespace erralign
