#include "erralign/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "erralign/kappa.hpp"
#include "erralign/kernels.hpp"
#include "erralign/representational.hpp"

namespace erralign {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::cka: return "cka";
    case Metric::cles: return "cles";
    case Metric::ec: return "ec";
    case Metric::ma: return "ma";
    case Metric::soc: return "soc";
    case Metric::soce: return "soce";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  for (Metric m : {Metric::cka, Metric::cles, Metric::ec, Metric::ma, Metric::soc, Metric::soce}) {
    if (name == metric_name(m)) return m;
  }
  throw InputError("unknown metric '" + name + "' (expected ec|ma|cles|soc|soce|cka)");
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::vector<Metric> parse_metric_list(const std::string& list) {
  std::vector<Metric> out;
  for (const auto& name : split(list, ',')) {
    Metric m = parse_metric(name);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw InputError("empty metric list");
  return out;
}

void PairwiseScoreTable::canonicalize() {
  for (auto& r : rows)
    if (r.system_b < r.system_a) std::swap(r.system_a, r.system_b);
  auto key = [](const ScoreRow& r) { return std::tie(r.domain, r.system_a, r.system_b, r.metric); };
  std::stable_sort(rows.begin(), rows.end(), [&](const ScoreRow& x, const ScoreRow& y) { return key(x) < key(y); });
  auto dup = std::adjacent_find(rows.begin(), rows.end(),
                                [&](const ScoreRow& x, const ScoreRow& y) { return key(x) == key(y); });
  if (dup != rows.end()) {
    throw InputError("duplicate score for (" + dup->domain + ", " + dup->system_a + ", " + dup->system_b + ", " +
                     dup->metric + ")");
  }
}

void PairwiseScoreTable::append(const PairwiseScoreTable& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

namespace {

std::optional<JointView> try_joint_view(const GroundTruth& truth, const SystemRun& a, const SystemRun& b) {
  bool any = false;
  for (const auto& [id, _] : truth.entries) {
    if (a.entries.contains(id) && b.entries.contains(id)) {
      any = true;
      break;
    }
  }
  if (!any) return std::nullopt;
  return build_joint_view(truth, a, b);
}

const ConfidenceTable& need_confidences(const AuxInputs& aux, Metric m, const std::string& system) {
  auto it = aux.confidences.find(system);
  if (it == aux.confidences.end()) {
    throw InputError(std::string("metric ") + metric_name(m) + " requires confidences for system '" + system + "'");
  }
  return it->second;
}

const RepresentationMatrix& need_representations(const AuxInputs& aux, Metric m, const std::string& system) {
  auto it = aux.representations.find(system);
  if (it == aux.representations.end()) {
    throw InputError(std::string("metric ") + metric_name(m) + " requires representations for system '" + system +
                     "'");
  }
  return it->second;
}

void check_aux(Metric m, const AuxInputs& aux, const std::string& system) {
  if (m == Metric::soc || m == Metric::soce) need_confidences(aux, m, system);
  if (m == Metric::cka) need_representations(aux, m, system);
}

}  // namespace

MetricResult score_pair(Metric metric, const GroundTruth& truth, const SystemRun& a, const SystemRun& b,
                        const AuxInputs& aux, const ScoringOptions& options) {
  const char* name = metric_name(metric);
  MetricResult result;
  switch (metric) {
    case Metric::ec:
    case Metric::ma:
    case Metric::soce: {
      auto view = try_joint_view(truth, a, b);
      if (!view) return MetricResult::undefined(name, "no common instances");
      if (metric == Metric::ec) {
        result = error_consistency(*view);
      } else if (metric == Metric::ma) {
        result = misclassification_agreement(*view);
      } else {
        result = soce(need_confidences(aux, metric, a.system_id), need_confidences(aux, metric, b.system_id), *view,
                      options.log_base);
      }
      break;
    }
    case Metric::cles:
      result = cles_from_runs(truth, a, b, SmoothingPrior::uniform(truth.vocab->size(), options.alpha),
                              options.log_base);
      break;
    case Metric::soc:
      result = soc(need_confidences(aux, metric, a.system_id), need_confidences(aux, metric, b.system_id),
                   options.log_base);
      break;
    case Metric::cka: {
      auto [x, y] = align_representations(need_representations(aux, metric, a.system_id),
                                          need_representations(aux, metric, b.system_id));
      if (x.rows.size() < 2) return MetricResult::undefined(name, "fewer than 2 common instances", x.rows.size());
      result = linear_cka(x, y);
      break;
    }
  }
  result.metric = name;
  return result;
}

PairwiseScoreTable pairwise_scores(const std::string& domain, const std::vector<SystemRun>& systems,
                                   const GroundTruth& truth, const std::vector<Metric>& metrics,
                                   const AuxInputs& aux, const ScoringOptions& options) {
  if (systems.size() < 2) throw InputError("pairwise scoring needs at least 2 systems");
  std::vector<const SystemRun*> sorted;
  for (const auto& s : systems) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const SystemRun* x, const SystemRun* y) { return x->system_id < y->system_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->system_id == sorted[i - 1]->system_id) {
      throw InputError("duplicate system id '" + sorted[i]->system_id + "'");
    }
  }
  for (Metric m : metrics)
    for (const auto* s : sorted) check_aux(m, aux, s->system_id);

  struct Task {
    const SystemRun* a;
    const SystemRun* b;
    Metric metric;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      for (Metric m : metrics) tasks.push_back({sorted[i], sorted[j], m});

  std::vector<MetricResult> results(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::max_threads())
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    try {
      results[static_cast<std::size_t>(t)] = score_pair(task.metric, truth, *task.a, *task.b, aux, options);
    } catch (...) {
      failures[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  PairwiseScoreTable table;
  table.rows.reserve(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const MetricResult& r = results[t];
    table.rows.push_back({domain, tasks[t].a->system_id, tasks[t].b->system_id, r.metric, r.value, r.reason,
                          r.support});
  }
  table.canonicalize();
  return table;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    // positions i..j (0-based) share the mean of 1-based ranks i+1..j+1
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

struct SpearmanOutcome {
  std::optional<double> r;
  std::string reason;
};

SpearmanOutcome spearman_detail(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InputError("spearman_r: length mismatch");
  if (xs.size() < 3) return {std::nullopt, "fewer than 3 pairs"};
  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {std::nullopt, "zero rank variance"};
  const double denom = sxx == syy ? sxx : std::sqrt(sxx) * std::sqrt(syy);
  return {std::clamp(sxy / denom, -1.0, 1.0), {}};
}

}  // namespace

std::optional<double> spearman_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  return spearman_detail(xs, ys).r;
}

std::vector<MetricPair> parse_metric_pairs(const std::string& list) {
  std::vector<MetricPair> out;
  for (const auto& item : split(list, ',')) {
    auto parts = split(item, ':');
    if (parts.size() != 2) throw InputError("metric pair '" + item + "' is not of the form x:y");
    out.push_back({parts[0], parts[1]});
  }
  if (out.empty()) throw InputError("empty metric pair list");
  return out;
}

const char* scope_name(CorrelationScope s) {
  switch (s) {
    case CorrelationScope::global: return "global";
    case CorrelationScope::average: return "average";
    case CorrelationScope::domain: return "domain";
  }
  return "?";
}

std::vector<CorrelationRow> correlation_report(const PairwiseScoreTable& table, const std::vector<MetricPair>& pairs,
                                               const CorrelationOptions& options) {
  using PairKey = std::pair<std::string, std::string>;
  // domain -> pair -> metric -> value (nullopt = undefined)
  std::map<std::string, std::map<PairKey, std::map<std::string, std::optional<double>>>> grid;
  for (const auto& row : table.rows) {
    if (options.include && !options.include(row)) continue;
    std::optional<double> v = row.value;
    if (options.log_ma && row.metric == "ma" && v) v = *v > 0.0 ? std::optional<double>(std::log(*v)) : std::nullopt;
    PairKey key = row.system_a < row.system_b ? PairKey{row.system_a, row.system_b}
                                              : PairKey{row.system_b, row.system_a};
    grid[row.domain][key][row.metric] = v;
  }

  std::vector<CorrelationRow> out;
  for (const auto& mp : pairs) {
    std::vector<double> gx;
    std::vector<double> gy;
    std::size_t gdropped = 0;
    std::vector<CorrelationRow> per_domain;
    for (const auto& [domain, by_pair] : grid) {
      std::vector<double> xs;
      std::vector<double> ys;
      std::size_t dropped = 0;
      for (const auto& [key, by_metric] : by_pair) {
        auto ix = by_metric.find(mp.x);
        auto iy = by_metric.find(mp.y);
        if (ix == by_metric.end() && iy == by_metric.end()) continue;
        if (ix == by_metric.end() || iy == by_metric.end() || !ix->second || !iy->second) {
          ++dropped;
          continue;
        }
        xs.push_back(*ix->second);
        ys.push_back(*iy->second);
      }
      gx.insert(gx.end(), xs.begin(), xs.end());
      gy.insert(gy.end(), ys.begin(), ys.end());
      gdropped += dropped;
      auto s = spearman_detail(xs, ys);
      per_domain.push_back({mp.x, mp.y, CorrelationScope::domain, domain, s.r, s.reason, xs.size(), dropped});
    }

    auto g = spearman_detail(gx, gy);
    out.push_back({mp.x, mp.y, CorrelationScope::global, {}, g.r, g.reason, gx.size(), gdropped});

    CorrelationRow avg{mp.x, mp.y, CorrelationScope::average, {}, std::nullopt, {}, 0, 0};
    double sum = 0.0;
    for (const auto& d : per_domain) {
      if (d.r) {
        sum += *d.r;
        ++avg.n;
      } else {
        ++avg.dropped;
      }
    }
    if (avg.n > 0) {
      avg.r = sum / static_cast<double>(avg.n);
    } else {
      avg.reason = "no domain with a defined r";
    }
    out.push_back(avg);
    out.insert(out.end(), per_domain.begin(), per_domain.end());
  }
  return out;
}

std::string family_pair(const std::string& fa, const std::string& fb) {
  return fa <= fb ? fa + "-" + fb : fb + "-" + fa;
}

std::vector<ZScoreRow> zscore_by_metric(const PairwiseScoreTable& table, const FamilyMap& families) {
  auto family_of = [&](const std::string& system) -> const std::string& {
    auto it = families.find(system);
    if (it == families.end()) throw InputError("system '" + system + "' has no family");
    return it->second;
  };

  struct Stats {
    std::optional<double> mean;
    double std = 0.0;
    std::string reason;
  };
  std::map<std::string, std::vector<double>> values;
  for (const auto& row : table.rows)
    if (row.value) values[row.metric].push_back(*row.value);
  std::map<std::string, Stats> stats;
  for (auto& [metric, v] : values) {
    Stats s;
    if (v.size() < 2) {
      s.reason = "fewer than 2 defined values";
    } else {
      const double n = static_cast<double>(v.size());
      const double mean = kernels::pairwise_sum(v) / n;
      std::vector<double> sq(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
      const double sd = std::sqrt(kernels::pairwise_sum(sq) / n);
      if (sd == 0.0) {
        s.reason = "zero variance";
      } else {
        s.mean = mean;
        s.std = sd;
      }
    }
    stats[metric] = s;
  }

  std::vector<ZScoreRow> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ZScoreRow z{row.domain, row.system_a, row.system_b,
                family_pair(family_of(row.system_a), family_of(row.system_b)), row.metric, row.value,
                std::nullopt, {}};
    if (!row.value) {
      z.reason = row.reason.empty() ? "undefined score" : row.reason;
    } else {
      const Stats& s = stats[row.metric];
      if (s.mean) {
        z.z = (*row.value - *s.mean) / s.std;
      } else {
        z.reason = s.reason;
      }
    }
    out.push_back(std::move(z));
  }
  return out;
}

PairwiseScoreTable with_log_ma(const PairwiseScoreTable& table) {
  PairwiseScoreTable out = table;
  for (const auto& row : table.rows) {
    if (row.metric != "ma") continue;
    ScoreRow lr = row;
    lr.metric = "log_ma";
    if (row.value && *row.value > 0.0) {
      lr.value = std::log(*row.value);
    } else if (row.value) {
      lr.value.reset();
      lr.reason = "non-positive ma";
    }
    out.rows.push_back(std::move(lr));
  }
  out.canonicalize();
  return out;
}

}  // namespace erralign
