// Serial reference vs OpenMP kernels on representative sizes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "erralign/kernels.hpp"

namespace {

using namespace erralign;

std::vector<double> random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(rows * cols);
  for (double& v : x) v = normal(rng);
  return x;
}

std::vector<double> random_simplex(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo;
  std::vector<double> p(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += p[i * cols + k] = expo(rng);
    for (std::size_t k = 0; k < cols; ++k) p[i * cols + k] /= s;
  }
  return p;
}

template <auto Gram, auto Center, auto Frobenius>
void BM_Hsic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 64;
  const auto x = random_matrix(n, d, 1);
  const auto y = random_matrix(n, d, 2);
  for (auto _ : state) {
    auto k = Gram(x, n, d);
    auto l = Gram(y, n, d);
    Center(k, n);
    Center(l, n);
    benchmark::DoNotOptimize(Frobenius(k, l, n));
  }
}

template <auto Rowwise>
void BM_RowwiseJsd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t c = 16;
  const auto p = random_simplex(n, c, 3);
  const auto q = random_simplex(n, c, 4);
  for (auto _ : state) {
    auto v = Rowwise(p, q, n, c, LogBase::two);
    benchmark::DoNotOptimize(kernels::pairwise_sum(v));
  }
}

}  // namespace

BENCHMARK(BM_Hsic<kernels::serial::gram, kernels::serial::double_center, kernels::serial::frobenius>)
    ->Name("hsic/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Hsic<kernels::omp::gram, kernels::omp::double_center, kernels::omp::frobenius>)
    ->Name("hsic/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_RowwiseJsd<kernels::serial::rowwise_jsd>)->Name("rowwise_jsd/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_RowwiseJsd<kernels::omp::rowwise_jsd>)->Name("rowwise_jsd/omp")->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
