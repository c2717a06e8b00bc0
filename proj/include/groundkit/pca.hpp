#pragma once

#include "groundkit/tensor.hpp"

namespace groundkit::num {

struct PcaResult {
  Tensor projections;   // n x 2
  Tensor components;    // 2 x d, orthonormal rows
  double variance1 = 0.0;
  double variance2 = 0.0;
  bool degenerate = false;  // all rows identical: zero-variance signal
};

// Top-2 principal components of mean-centered rows via power iteration
// with deflation. Requires n >= 3 rows and d >= 2 columns.
PcaResult pca_top2(const Tensor& rows);

}  // namespace groundkit::num
