#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace erralign {

/// Raised for malformed or inconsistent user input. The CLI maps it to exit status 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using InstanceId = std::string;
using ClassIndex = std::size_t;

/// Ordered set of distinct class names; index(label) is a bijection onto [0, C).
class LabelVocabulary {
 public:
  explicit LabelVocabulary(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(ClassIndex i) const { return labels_.at(i); }
  std::optional<ClassIndex> find(const std::string& label) const;
  /// Throws InputError("unknown label ...") when absent.
  ClassIndex index(const std::string& label) const;

  friend bool operator==(const LabelVocabulary& a, const LabelVocabulary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, ClassIndex> index_;
};

using VocabularyPtr = std::shared_ptr<const LabelVocabulary>;

/// Raw `instance_id -> label text` rows, as read from a label file.
using LabelRows = std::map<InstanceId, std::string>;

/// Builds the vocabulary from the union of labels in `truth` plus `declared`, sorted.
VocabularyPtr vocabulary_from(const LabelRows& truth, const std::vector<std::string>& declared = {});

struct GroundTruth {
  VocabularyPtr vocab;
  std::map<InstanceId, ClassIndex> entries;

  static GroundTruth encode(VocabularyPtr vocab, const LabelRows& rows);
};

struct SystemRun {
  std::string system_id;
  VocabularyPtr vocab;
  std::map<InstanceId, ClassIndex> entries;

  static SystemRun encode(std::string system_id, VocabularyPtr vocab, const LabelRows& rows);
};

struct JointRow {
  InstanceId id;
  ClassIndex truth;
  ClassIndex a;
  ClassIndex b;

  bool a_correct() const { return a == truth; }
  bool b_correct() const { return b == truth; }
  bool jointly_correct() const { return a_correct() && b_correct(); }
  bool jointly_incorrect() const { return !a_correct() && !b_correct(); }

  friend bool operator==(const JointRow&, const JointRow&) = default;
};

/// Aligned (truth, A, B) triples over the id intersection, sorted by id.
class JointView {
 public:
  JointView(VocabularyPtr vocab, std::vector<JointRow> rows);

  const LabelVocabulary& vocab() const { return *vocab_; }
  const VocabularyPtr& vocab_ptr() const { return vocab_; }
  std::span<const JointRow> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  std::size_t jointly_correct() const { return n_correct_; }
  std::size_t jointly_incorrect() const { return n_error_; }
  std::size_t only_a_correct() const { return n_only_a_; }
  std::size_t only_b_correct() const { return n_only_b_; }

  /// Ids that were present in at least one input but not in all three.
  std::size_t dropped() const { return dropped_; }
  void set_dropped(std::size_t n) { dropped_ = n; }

 private:
  VocabularyPtr vocab_;
  std::vector<JointRow> rows_;
  std::size_t n_correct_ = 0;
  std::size_t n_error_ = 0;
  std::size_t n_only_a_ = 0;
  std::size_t n_only_b_ = 0;
  std::size_t dropped_ = 0;
};

enum class System { A, B };

JointView build_joint_view(const GroundTruth& truth, const SystemRun& run_a, const SystemRun& run_b);

double accuracy(const JointView& view, System which);

enum class MatrixAxes {
  agreement,  // rows = system A prediction, cols = system B prediction
  confusion,  // rows = ground truth, cols = prediction
};

/// Square non-negative count matrix over a label vocabulary.
class CountMatrix {
 public:
  CountMatrix(std::size_t classes, MatrixAxes axes);
  CountMatrix(std::size_t classes, MatrixAxes axes, std::vector<std::int64_t> data);

  std::size_t classes() const { return classes_; }
  MatrixAxes axes() const { return axes_; }

  std::int64_t at(std::size_t row, std::size_t col) const { return data_[row * classes_ + col]; }
  void add(std::size_t row, std::size_t col, std::int64_t count = 1);
  void set(std::size_t row, std::size_t col, std::int64_t count);

  std::span<const std::int64_t> row(std::size_t r) const {
    return {data_.data() + r * classes_, classes_};
  }
  std::int64_t row_sum(std::size_t r) const;
  std::int64_t col_sum(std::size_t c) const;
  std::int64_t total() const;
  std::int64_t trace() const;
  bool all_zero() const { return total() == 0; }
  CountMatrix transposed() const;

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t classes_;
  MatrixAxes axes_;
  std::vector<std::int64_t> data_;
};

/// Categorical distribution: non-negative entries summing to 1 within 1e-9.
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit ProbVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> values_;
};

struct ConfidenceTable {
  std::string system_id;
  VocabularyPtr vocab;
  std::map<InstanceId, ProbVector> entries;
};

struct RepresentationMatrix {
  std::string system_id;
  std::size_t dim = 0;
  std::map<InstanceId, std::vector<double>> rows;

  /// Checks uniform dimension D >= 1 and at least two rows.
  void validate() const;
};

/// A metric value, or Undefined with a reason. `support` is the number of
/// instances (or joint errors) the value was computed from.
struct MetricResult {
  std::string metric;
  std::optional<double> value;
  std::string reason;
  std::size_t support = 0;

  bool defined() const { return value.has_value(); }

  static MetricResult ok(std::string metric, double value, std::size_t support) {
    return {std::move(metric), value, {}, support};
  }
  static MetricResult undefined(std::string metric, std::string reason, std::size_t support = 0) {
    return {std::move(metric), std::nullopt, std::move(reason), support};
  }
};

}  // namespace erralign
