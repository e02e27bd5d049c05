#include <stdexcept>

#include "erralign/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace erralign::kernels {

namespace {
int g_max_threads = 0;

int team_size() {
#ifdef _OPENMP
  return g_max_threads > 0 ? g_max_threads : omp_get_max_threads();
#else
  return 1;
#endif
}
}  // namespace

void set_max_threads(int threads) { g_max_threads = threads < 0 ? 0 : threads; }
int max_threads() { return team_size(); }

namespace omp {

std::vector<double> gram(std::span<const double> x, std::size_t n, std::size_t d) {
  if (x.size() != n * d) throw std::invalid_argument("gram: shape mismatch");
  std::vector<double> k(n * n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(team_size())
  for (std::ptrdiff_t si = 0; si < rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
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
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel num_threads(team_size())
  {
    std::vector<double> column(n);
#pragma omp for
    for (std::ptrdiff_t si = 0; si < rows; ++si) {
      const auto i = static_cast<std::size_t>(si);
      row_mean[i] = pairwise_sum(k.subspan(i * n, n)) * inv_n;
      for (std::size_t r = 0; r < n; ++r) column[r] = k[r * n + i];
      col_mean[i] = pairwise_sum(column) * inv_n;
    }
  }
  const double grand = pairwise_sum(row_mean) * inv_n;
#pragma omp parallel for num_threads(team_size())
  for (std::ptrdiff_t si = 0; si < rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (std::size_t j = 0; j < n; ++j) k[i * n + j] = k[i * n + j] - row_mean[i] - col_mean[j] + grand;
  }
}

double frobenius(std::span<const double> a, std::span<const double> b, std::size_t n) {
  if (a.size() != n * n || b.size() != n * n) throw std::invalid_argument("frobenius: shape mismatch");
  std::vector<double> partial(n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(team_size())
  for (std::ptrdiff_t si = 0; si < rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
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
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(team_size())
  for (std::ptrdiff_t si = 0; si < rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
    out[i] = jsd(p.subspan(i * c, c), q.subspan(i * c, c), base);
  }
  return out;
}

}  // namespace omp
}  // namespace erralign::kernels
