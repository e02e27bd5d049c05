#include "erralign/representational.hpp"

#include <cmath>

#include "erralign/kernels.hpp"

namespace erralign {

namespace {

constexpr double kDegenerateHsic = 1e-12;

std::vector<double> centered(const GramMatrix& g) {
  std::vector<double> c = g.data;
  kernels::omp::double_center(c, g.n);
  return c;
}

double centered_hsic(const std::vector<double>& kc, const std::vector<double>& lc, std::size_t n) {
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  return kernels::omp::frobenius(kc, lc, n) / denom;
}

}  // namespace

GramMatrix linear_gram(const RepresentationMatrix& x) {
  x.validate();
  const std::size_t n = x.rows.size();
  std::vector<double> flat;
  flat.reserve(n * x.dim);
  for (const auto& [id, row] : x.rows) flat.insert(flat.end(), row.begin(), row.end());
  return {n, kernels::omp::gram(flat, n, x.dim)};
}

double hsic(const GramMatrix& k, const GramMatrix& l) {
  if (k.n != l.n) throw InputError("hsic: Gram matrices differ in size");
  if (k.n < 2) throw InputError("hsic: need at least 2 instances");
  return centered_hsic(centered(k), centered(l), k.n);
}

std::pair<RepresentationMatrix, RepresentationMatrix> align_representations(const RepresentationMatrix& x,
                                                                            const RepresentationMatrix& y) {
  RepresentationMatrix xs{x.system_id, x.dim, {}};
  RepresentationMatrix ys{y.system_id, y.dim, {}};
  for (const auto& [id, row] : x.rows) {
    auto it = y.rows.find(id);
    if (it == y.rows.end()) continue;
    xs.rows.emplace(id, row);
    ys.rows.emplace(id, it->second);
  }
  return {std::move(xs), std::move(ys)};
}

MetricResult linear_cka(const RepresentationMatrix& x, const RepresentationMatrix& y) {
  if (x.rows.size() != y.rows.size()) throw InputError("cka: representations cover different instances");
  for (auto ix = x.rows.begin(), iy = y.rows.begin(); ix != x.rows.end(); ++ix, ++iy) {
    if (ix->first != iy->first) throw InputError("cka: representations cover different instances");
  }
  const GramMatrix k = linear_gram(x);
  const GramMatrix l = linear_gram(y);
  const std::vector<double> kc = centered(k);
  const std::vector<double> lc = centered(l);
  const double kk = centered_hsic(kc, kc, k.n);
  const double ll = centered_hsic(lc, lc, k.n);
  if (kk <= kDegenerateHsic || ll <= kDegenerateHsic) {
    return MetricResult::undefined("cka", "degenerate representation", k.n);
  }
  const double kl = centered_hsic(kc, lc, k.n);
  return MetricResult::ok("cka", kl / (std::sqrt(kk) * std::sqrt(ll)), k.n);
}

}  // namespace erralign
