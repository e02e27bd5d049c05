#include "erralign/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace erralign {

LabelVocabulary::LabelVocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw InputError("label vocabulary needs at least 2 classes, got " +
                     std::to_string(labels_.size()));
  }
  for (ClassIndex i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw InputError("empty class label");
    if (!index_.emplace(labels_[i], i).second) {
      throw InputError("duplicate class label '" + labels_[i] + "'");
    }
  }
}

std::optional<ClassIndex> LabelVocabulary::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ClassIndex LabelVocabulary::index(const std::string& label) const {
  if (auto i = find(label)) return *i;
  throw InputError("unknown label '" + label + "'");
}

VocabularyPtr vocabulary_from(const LabelRows& truth, const std::vector<std::string>& declared) {
  std::set<std::string> labels(declared.begin(), declared.end());
  for (const auto& [id, label] : truth) labels.insert(label);
  return std::make_shared<const LabelVocabulary>(
      std::vector<std::string>(labels.begin(), labels.end()));
}

GroundTruth GroundTruth::encode(VocabularyPtr vocab, const LabelRows& rows) {
  GroundTruth truth{std::move(vocab), {}};
  for (const auto& [id, label] : rows) truth.entries.emplace(id, truth.vocab->index(label));
  return truth;
}

SystemRun SystemRun::encode(std::string system_id, VocabularyPtr vocab, const LabelRows& rows) {
  SystemRun run{std::move(system_id), std::move(vocab), {}};
  for (const auto& [id, label] : rows) {
    auto idx = run.vocab->find(label);
    if (!idx) {
      throw InputError("unknown label '" + label + "' for instance '" + id + "' in system '" +
                       run.system_id + "'");
    }
    run.entries.emplace(id, *idx);
  }
  return run;
}

JointView::JointView(VocabularyPtr vocab, std::vector<JointRow> rows)
    : vocab_(std::move(vocab)), rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(),
            [](const JointRow& x, const JointRow& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].id == rows_[i - 1].id) throw InputError("duplicate instance id '" + rows_[i].id + "'");
  }
  const std::size_t classes = vocab_->size();
  for (const auto& r : rows_) {
    if (r.truth >= classes || r.a >= classes || r.b >= classes) {
      throw InputError("unknown label index for instance '" + r.id + "'");
    }
    if (r.jointly_correct()) {
      ++n_correct_;
    } else if (r.jointly_incorrect()) {
      ++n_error_;
    } else if (r.a_correct()) {
      ++n_only_a_;
    } else {
      ++n_only_b_;
    }
  }
}

JointView build_joint_view(const GroundTruth& truth, const SystemRun& run_a, const SystemRun& run_b) {
  if (!(*truth.vocab == *run_a.vocab) || !(*truth.vocab == *run_b.vocab)) {
    throw InputError("systems do not share the ground-truth label vocabulary");
  }
  std::vector<JointRow> rows;
  std::set<InstanceId> seen;
  for (const auto& [id, t] : truth.entries) {
    seen.insert(id);
    auto ia = run_a.entries.find(id);
    auto ib = run_b.entries.find(id);
    if (ia == run_a.entries.end() || ib == run_b.entries.end()) continue;
    rows.push_back({id, t, ia->second, ib->second});
  }
  if (rows.empty()) throw InputError("no common instances");
  for (const auto& [id, _] : run_a.entries) seen.insert(id);
  for (const auto& [id, _] : run_b.entries) seen.insert(id);
  const std::size_t kept = rows.size();
  JointView view(truth.vocab, std::move(rows));
  view.set_dropped(seen.size() - kept);
  return view;
}

double accuracy(const JointView& view, System which) {
  if (view.empty()) throw std::invalid_argument("accuracy of an empty view");
  const auto correct = std::count_if(view.rows().begin(), view.rows().end(), [&](const JointRow& r) {
    return which == System::A ? r.a_correct() : r.b_correct();
  });
  return static_cast<double>(correct) / static_cast<double>(view.size());
}

CountMatrix::CountMatrix(std::size_t classes, MatrixAxes axes)
    : classes_(classes), axes_(axes), data_(classes * classes, 0) {}

CountMatrix::CountMatrix(std::size_t classes, MatrixAxes axes, std::vector<std::int64_t> data)
    : classes_(classes), axes_(axes), data_(std::move(data)) {
  if (data_.size() != classes_ * classes_) throw InputError("count matrix is not square");
  if (std::any_of(data_.begin(), data_.end(), [](std::int64_t v) { return v < 0; })) {
    throw InputError("count matrix has a negative entry");
  }
}

void CountMatrix::add(std::size_t row, std::size_t col, std::int64_t count) {
  data_.at(row * classes_ + col) += count;
}

void CountMatrix::set(std::size_t row, std::size_t col, std::int64_t count) {
  if (count < 0) throw InputError("count matrix has a negative entry");
  data_.at(row * classes_ + col) = count;
}

std::int64_t CountMatrix::row_sum(std::size_t r) const {
  auto rw = row(r);
  return std::accumulate(rw.begin(), rw.end(), std::int64_t{0});
}

std::int64_t CountMatrix::col_sum(std::size_t c) const {
  std::int64_t s = 0;
  for (std::size_t r = 0; r < classes_; ++r) s += at(r, c);
  return s;
}

std::int64_t CountMatrix::total() const {
  return std::accumulate(data_.begin(), data_.end(), std::int64_t{0});
}

std::int64_t CountMatrix::trace() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < classes_; ++i) s += at(i, i);
  return s;
}

CountMatrix CountMatrix::transposed() const {
  CountMatrix t(classes_, axes_);
  for (std::size_t r = 0; r < classes_; ++r)
    for (std::size_t c = 0; c < classes_; ++c) t.data_[c * classes_ + r] = at(r, c);
  return t;
}

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("empty probability vector");
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("probability entry is negative or non-finite");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InputError("probability vector sums to " + std::to_string(sum) + ", not 1");
  }
}

void RepresentationMatrix::validate() const {
  if (dim == 0) throw InputError("representation dimension must be >= 1");
  if (rows.size() < 2) throw InputError("representation '" + system_id + "' needs at least 2 instances");
  for (const auto& [id, row] : rows) {
    if (row.size() != dim) {
      throw InputError("representation row '" + id + "' has dimension " + std::to_string(row.size()) +
                       ", expected " + std::to_string(dim));
    }
  }
}

}  // namespace erralign
