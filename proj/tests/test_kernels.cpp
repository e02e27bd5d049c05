#include <doctest.h>

#include <random>

#include "erralign/kernels.hpp"
#include "oracles.hpp"

using namespace erralign;

namespace {

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

struct ThreadCap {
  explicit ThreadCap(int n) : saved(kernels::max_threads()) { kernels::set_max_threads(n); }
  ~ThreadCap() { kernels::set_max_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("pairwise_sum") {
  CHECK(kernels::pairwise_sum({}) == 0.0);
  std::vector<double> v(1000, 0.1);
  CHECK(kernels::pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-13));
  std::vector<double> ints{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  CHECK(kernels::pairwise_sum(ints) == 66.0);
}

TEST_CASE("serial and omp kernels agree bitwise") {
  std::mt19937_64 rng(77);
  for (int threads : {1, 2, 3, 4}) {
    ThreadCap cap(threads);
    for (std::size_t n : {std::size_t{2}, std::size_t{9}, std::size_t{65}}) {
      const std::size_t d = 1 + rng() % 12;
      auto x = gaussian(rng, n * d);
      auto ks = kernels::serial::gram(x, n, d), ko = kernels::omp::gram(x, n, d);
      CHECK(ks == ko);
      kernels::serial::double_center(ks, n);
      kernels::omp::double_center(ko, n);
      CHECK(ks == ko);
      CHECK(kernels::serial::frobenius(ks, ks, n) == kernels::omp::frobenius(ko, ko, n));

      const std::size_t c = 2 + rng() % 10;
      std::vector<double> p, q;
      for (std::size_t i = 0; i < n; ++i) {
        auto a = testutil::random_simplex(rng, c), b = testutil::random_simplex(rng, c);
        p.insert(p.end(), a.begin(), a.end());
        q.insert(q.end(), b.begin(), b.end());
      }
      for (auto base : {LogBase::two, LogBase::e})
        CHECK(kernels::serial::rowwise_jsd(p, q, n, c, base) == kernels::omp::rowwise_jsd(p, q, n, c, base));
    }
  }
}

TEST_CASE("double_center matches explicit centering") {
  std::mt19937_64 rng(3);
  const std::size_t n = 7, d = 3;
  auto x = gaussian(rng, n * d);
  auto k = kernels::serial::gram(x, n, d);
  oracle::Matrix km(n, std::vector<long double>(n)), h(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      km[i][j] = k[i * n + j];
      h[i][j] = (i == j ? 1.0L : 0.0L) - 1.0L / n;
    }
  auto expected = oracle::multiply(oracle::multiply(h, km), h);
  kernels::serial::double_center(k, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(k[i * n + j] - static_cast<double>(expected[i][j])) <= 1e-12);
}
