#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "erralign/kernels.hpp"

namespace erralign::kernels {

namespace {

constexpr std::size_t kLeafSize = 8;

double kl_term(double p, double m, LogBase base) {
  if (p <= 0.0) return 0.0;
  return p * (base == LogBase::two ? std::log2(p / m) : std::log(p / m));
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= kLeafSize) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double jsd(std::span<const double> p, std::span<const double> q, LogBase base) {
  if (p.size() != q.size()) throw std::invalid_argument("jsd: dimension mismatch");
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = 0.5 * (p[k] + q[k]);
    kl_p += kl_term(p[k], m, base);
    kl_q += kl_term(q[k], m, base);
  }
  const double d = 0.5 * kl_p + 0.5 * kl_q;
  const double upper = base == LogBase::two ? 1.0 : std::numbers::ln2;
  return std::clamp(d, 0.0, upper);
}

namespace serial {

std::vector<double> gram(std::span<const double> x, std::size_t n, std::size_t d) {
  if (x.size() != n * d) throw std::invalid_argument("gram: shape mismatch");
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < d; ++f) s += x[i * d + f] * x[j * d + f];
      k[i * n + j] = s;
      k[j * n + i] = s;
    }
  }
  return k;
}

void double_center(std::span<double> k, std::size_t n) {
  if (k.size() != n * n) throw std::invalid_argument("double_center: shape mismatch");
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> row_mean(n);
  std::vector<double> col_mean(n);
  for (std::size_t i = 0; i < n; ++i) row_mean[i] = pairwise_sum(k.subspan(i * n, n)) * inv_n;
  std::vector<double> column(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = k[i * n + j];
    col_mean[j] = pairwise_sum(column) * inv_n;
  }
  const double grand = pairwise_sum(row_mean) * inv_n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k[i * n + j] = k[i * n + j] - row_mean[i] - col_mean[j] + grand;
}

double frobenius(std::span<const double> a, std::span<const double> b, std::size_t n) {
  if (a.size() != n * n || b.size() != n * n) throw std::invalid_argument("frobenius: shape mismatch");
  std::vector<double> partial(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * b[i * n + j];
    partial[i] = s;
  }
  return pairwise_sum(partial);
}

std::vector<double> rowwise_jsd(std::span<const double> p, std::span<const double> q, std::size_t n,
                                std::size_t c, LogBase base) {
  if (p.size() != n * c || q.size() != n * c) throw std::invalid_argument("rowwise_jsd: shape mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = jsd(p.subspan(i * c, c), q.subspan(i * c, c), base);
  return out;
}

}  // namespace serial
}  // namespace erralign::kernels
