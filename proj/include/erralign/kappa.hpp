#pragma once

#include <optional>
#include <string>

#include "erralign/domain.hpp"

namespace erralign {

/// Observed agreement, chance agreement and the resulting multiclass Cohen's kappa.
struct KappaBreakdown {
  double p_o = 0.0;
  double p_e = 0.0;
  std::optional<double> kappa;
  std::string reason;  // set when kappa is undefined
  std::int64_t n = 0;
};

/// Multiclass Cohen's kappa of a rater-agreement matrix (rows: rater A, cols: rater B).
///
/// p_o = trace / n and p_e = sum_i (row_i / n)(col_i / n). When p_e == 1 the ratio
/// is 0/0: it is reported as 1 if p_o == 1 and Undefined("p_e=1") otherwise.
/// An empty matrix is Undefined("empty matrix").
KappaBreakdown cohens_kappa(const CountMatrix& m);

/// Rows on which both systems are wrong.
JointView joint_error_set(const JointView& view);

/// Cell (i, j) counts joint errors where A predicted i and B predicted j.
CountMatrix error_agreement_matrix(const JointView& joint_errors);

/// 2x2 agreement matrix over correctness (index 0 = correct, 1 = incorrect).
CountMatrix correctness_agreement_matrix(const JointView& view);

/// Cohen's kappa of the error agreement matrix; support is the joint error count.
MetricResult misclassification_agreement(const JointView& view);

/// Error consistency: kappa over whether the two systems are simultaneously right or wrong.
MetricResult error_consistency(const JointView& view);

}  // namespace erralign
