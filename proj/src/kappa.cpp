#include "erralign/kappa.hpp"

#include <vector>

namespace erralign {

KappaBreakdown cohens_kappa(const CountMatrix& m) {
  KappaBreakdown out;
  out.n = m.total();
  if (out.n == 0) {
    out.reason = "empty matrix";
    return out;
  }
  const std::size_t classes = m.classes();
  // Exact integer chance agreement: n^2 * p_e = sum_i row_i * col_i.
  std::int64_t chance = 0;
  for (std::size_t i = 0; i < classes; ++i) chance += m.row_sum(i) * m.col_sum(i);
  const std::int64_t agree = m.trace();
  const double n = static_cast<double>(out.n);
  out.p_o = static_cast<double>(agree) / n;
  out.p_e = static_cast<double>(chance) / (n * n);

  if (agree == out.n) {
    out.kappa = 1.0;
  } else if (chance == out.n * out.n) {
    out.reason = "p_e=1";
  } else {
    out.kappa = (out.p_o - out.p_e) / (1.0 - out.p_e);
  }
  return out;
}

JointView joint_error_set(const JointView& view) {
  std::vector<JointRow> rows;
  for (const auto& r : view.rows())
    if (r.jointly_incorrect()) rows.push_back(r);
  return JointView(view.vocab_ptr(), std::move(rows));
}

CountMatrix error_agreement_matrix(const JointView& joint_errors) {
  CountMatrix m(joint_errors.vocab().size(), MatrixAxes::agreement);
  for (const auto& r : joint_errors.rows()) {
    if (!r.jointly_incorrect()) {
      throw std::invalid_argument("error_agreement_matrix: row '" + r.id + "' is not a joint error");
    }
    m.add(r.a, r.b);
  }
  return m;
}

CountMatrix correctness_agreement_matrix(const JointView& view) {
  CountMatrix m(2, MatrixAxes::agreement);
  for (const auto& r : view.rows()) m.add(r.a_correct() ? 0 : 1, r.b_correct() ? 0 : 1);
  return m;
}

MetricResult misclassification_agreement(const JointView& view) {
  const JointView errors = joint_error_set(view);
  const std::size_t support = errors.size();
  if (support == 0) return MetricResult::undefined("ma", "no joint errors", 0);
  const KappaBreakdown k = cohens_kappa(error_agreement_matrix(errors));
  if (!k.kappa) return MetricResult::undefined("ma", k.reason, support);
  return MetricResult::ok("ma", *k.kappa, support);
}

MetricResult error_consistency(const JointView& view) {
  const std::size_t n = view.size();
  if (n == 0) return MetricResult::undefined("ec", "empty view", 0);
  const double p_a = accuracy(view, System::A);
  const double p_b = accuracy(view, System::B);
  const std::size_t agree = view.jointly_correct() + view.jointly_incorrect();
  if (agree == n) return MetricResult::ok("ec", 1.0, n);
  const double p_obs = static_cast<double>(agree) / static_cast<double>(n);
  const double p_exp = p_a * p_b + (1.0 - p_a) * (1.0 - p_b);
  if (p_exp == 1.0) return MetricResult::undefined("ec", "p_exp=1", n);
  return MetricResult::ok("ec", (p_obs - p_exp) / (1.0 - p_exp), n);
}

}  // namespace erralign
