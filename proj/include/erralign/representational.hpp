#pragma once

#include <utility>
#include <vector>

#include "erralign/domain.hpp"

namespace erralign {

/// Symmetric n x n Gram matrix, row-major.
struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// K = X X^T with rows in sorted instance-id order.
GramMatrix linear_gram(const RepresentationMatrix& x);

/// HSIC(K, L) = tr(K H L H) / (n - 1)^2, computed by double-centering both matrices.
double hsic(const GramMatrix& k, const GramMatrix& l);

/// Restricts both representations to their shared instance ids.
std::pair<RepresentationMatrix, RepresentationMatrix> align_representations(const RepresentationMatrix& x,
                                                                            const RepresentationMatrix& y);

/// Linear CKA. Both inputs must cover the same instance ids (see align_representations);
/// feature dimensions may differ. Undefined when either self-HSIC is <= 1e-12.
MetricResult linear_cka(const RepresentationMatrix& x, const RepresentationMatrix& y);

}  // namespace erralign
