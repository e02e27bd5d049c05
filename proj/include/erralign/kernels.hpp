#pragma once

// Numeric inner loops shared by the divergence and representational metrics.
//
// Every kernel exists twice: `serial` is the reference implementation, `omp`
// the OpenMP-parallel one. Both compute each output element with the same
// sequence of floating-point operations and reduce through pairwise_sum, so
// their results are bitwise identical for any thread count.

#include <cstddef>
#include <span>
#include <vector>

namespace erralign {

enum class LogBase { two, e };

namespace kernels {

/// Pairwise (tree) summation with a fixed split, independent of thread count.
double pairwise_sum(std::span<const double> values);

/// Jensen-Shannon divergence through the mean distribution. Terms with a zero
/// numerator contribute 0. Clamped to [0, log(2)] in the requested base.
double jsd(std::span<const double> p, std::span<const double> q, LogBase base);

namespace serial {

/// Linear Gram matrix K = X X^T for row-major X (n x d). Returns row-major n x n.
std::vector<double> gram(std::span<const double> x, std::size_t n, std::size_t d);

/// In-place H K H for row-major n x n K, where H = I - 11^T / n.
void double_center(std::span<double> k, std::size_t n);

/// sum_ij a_ij b_ij.
double frobenius(std::span<const double> a, std::span<const double> b, std::size_t n);

/// JSD between row i of p and row i of q (both row-major n x c).
std::vector<double> rowwise_jsd(std::span<const double> p, std::span<const double> q,
                                std::size_t n, std::size_t c, LogBase base);

}  // namespace serial

namespace omp {

std::vector<double> gram(std::span<const double> x, std::size_t n, std::size_t d);
void double_center(std::span<double> k, std::size_t n);
double frobenius(std::span<const double> a, std::span<const double> b, std::size_t n);
std::vector<double> rowwise_jsd(std::span<const double> p, std::span<const double> q,
                                std::size_t n, std::size_t c, LogBase base);

}  // namespace omp

/// Thread cap for the omp kernels and pairwise scoring; 0 keeps the OpenMP default.
void set_max_threads(int threads);
int max_threads();

}  // namespace kernels
}  // namespace erralign
