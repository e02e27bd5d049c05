#include "erralign/divergence.hpp"

#include <cmath>
#include <optional>
#include <set>

namespace erralign {

SmoothingPrior SmoothingPrior::uniform(std::size_t classes, double value) {
  SmoothingPrior prior{std::vector<double>(classes, value)};
  prior.validate(classes);
  return prior;
}

void SmoothingPrior::validate(std::size_t classes) const {
  if (alpha.size() != classes) {
    throw InputError("prior has " + std::to_string(alpha.size()) + " components, expected " +
                     std::to_string(classes));
  }
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw InputError("prior components must be positive");
}

double jsd(const ProbVector& p, const ProbVector& q, LogBase base) {
  if (p.size() != q.size()) throw InputError("jsd: dimension mismatch");
  return kernels::jsd(p.values(), q.values(), base);
}

CountMatrix error_confusion_matrix(const GroundTruth& truth, const SystemRun& run) {
  if (!(*truth.vocab == *run.vocab)) throw InputError("system '" + run.system_id + "' uses a different vocabulary");
  CountMatrix m(truth.vocab->size(), MatrixAxes::confusion);
  for (const auto& [id, predicted] : run.entries) {
    auto t = truth.entries.find(id);
    if (t == truth.entries.end() || t->second == predicted) continue;
    m.add(t->second, predicted);
  }
  return m;
}

ProbVector dirichlet_row_estimate(std::span<const std::int64_t> counts, const SmoothingPrior& prior) {
  prior.validate(counts.size());
  std::vector<double> v(counts.size());
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    v[k] = static_cast<double>(counts[k]) + prior.alpha[k];
    total += v[k];
  }
  for (double& x : v) x /= total;
  return ProbVector(std::move(v));
}

namespace {

void check_pair(const CountMatrix& a, const CountMatrix& b) {
  if (a.classes() != b.classes()) throw InputError("confusion matrices have different vocabularies");
  if (a.axes() != MatrixAxes::confusion || b.axes() != MatrixAxes::confusion) {
    throw std::invalid_argument("cled: expected error confusion matrices");
  }
  for (std::size_t i = 0; i < a.classes(); ++i) {
    if (a.at(i, i) != 0 || b.at(i, i) != 0) throw InputError("error confusion matrix has a nonzero diagonal");
  }
}

}  // namespace

ClassErrorProfile class_error_profile(const CountMatrix& conf_a, const CountMatrix& conf_b,
                                      const SmoothingPrior& prior) {
  check_pair(conf_a, conf_b);
  const std::size_t classes = conf_a.classes();
  prior.validate(classes);
  ClassErrorProfile profile;
  profile.total_errors = conf_a.total() + conf_b.total();
  profile.classes.reserve(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::int64_t n_c = conf_a.row_sum(c) + conf_b.row_sum(c);
    const double w = profile.total_errors == 0
                         ? 0.0
                         : static_cast<double>(n_c) / static_cast<double>(profile.total_errors);
    profile.classes.push_back({w, dirichlet_row_estimate(conf_a.row(c), prior),
                               dirichlet_row_estimate(conf_b.row(c), prior)});
  }
  return profile;
}

MetricResult cled(const CountMatrix& conf_a, const CountMatrix& conf_b, const SmoothingPrior& prior,
                  LogBase base) {
  const ClassErrorProfile profile = class_error_profile(conf_a, conf_b, prior);
  const auto support = static_cast<std::size_t>(profile.total_errors);
  if (profile.total_errors == 0) return MetricResult::undefined("cled", "no errors", 0);
  std::vector<double> terms;
  terms.reserve(profile.classes.size());
  for (const auto& e : profile.classes) {
    terms.push_back(e.weight == 0.0 ? 0.0 : e.weight * jsd(e.dist_a, e.dist_b, base));
  }
  return MetricResult::ok("cled", kernels::pairwise_sum(terms), support);
}

MetricResult cles(const CountMatrix& conf_a, const CountMatrix& conf_b, const SmoothingPrior& prior,
                  LogBase base) {
  MetricResult d = cled(conf_a, conf_b, prior, base);
  if (!d.defined()) return MetricResult::undefined("cles", d.reason, d.support);
  return MetricResult::ok("cles", 1.0 / (1.0 + *d.value), d.support);
}

MetricResult cles_from_runs(const GroundTruth& truth, const SystemRun& run_a, const SystemRun& run_b,
                            const SmoothingPrior& prior, LogBase base) {
  return cles(error_confusion_matrix(truth, run_a), error_confusion_matrix(truth, run_b), prior, base);
}

namespace {

MetricResult similarity_of_confidence(const char* name, const ConfidenceTable& a, const ConfidenceTable& b,
                                      const std::set<InstanceId>* restrict_to, LogBase base) {
  if (!(*a.vocab == *b.vocab)) throw InputError("confidence tables use different class vocabularies");
  const std::size_t classes = a.vocab->size();
  std::vector<double> pa;
  std::vector<double> pb;
  std::size_t n = 0;
  for (const auto& [id, row_a] : a.entries) {
    if (restrict_to && !restrict_to->contains(id)) continue;
    auto it = b.entries.find(id);
    if (it == b.entries.end()) continue;
    if (row_a.size() != classes || it->second.size() != classes) {
      throw InputError("confidence row '" + id + "' has the wrong number of classes");
    }
    pa.insert(pa.end(), row_a.values().begin(), row_a.values().end());
    pb.insert(pb.end(), it->second.values().begin(), it->second.values().end());
    ++n;
  }
  if (n == 0) return MetricResult::undefined(name, "no instances", 0);
  const std::vector<double> per_instance = kernels::omp::rowwise_jsd(pa, pb, n, classes, base);
  const double mean = kernels::pairwise_sum(per_instance) / static_cast<double>(n);
  return MetricResult::ok(name, 1.0 / (mean + 1.0), n);
}

}  // namespace

MetricResult soc(const ConfidenceTable& conf_a, const ConfidenceTable& conf_b, LogBase base) {
  return similarity_of_confidence("soc", conf_a, conf_b, nullptr, base);
}

MetricResult soce(const ConfidenceTable& conf_a, const ConfidenceTable& conf_b, const JointView& view,
                  LogBase base) {
  std::set<InstanceId> errors;
  for (const auto& r : view.rows())
    if (r.jointly_incorrect()) errors.insert(r.id);
  if (errors.empty()) return MetricResult::undefined("soce", "no joint errors", 0);
  return similarity_of_confidence("soce", conf_a, conf_b, &errors, base);
}

}  // namespace erralign
