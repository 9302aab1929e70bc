#pragma once

#include <vector>

#include "rpca/types.hpp"

namespace rpca {

// Result of the hard thresholding operator: the input with its largest
// entries (simultaneously top-ranked by magnitude in their row AND their
// column) zeroed out, plus the list of zeroed positions.
struct ThresholdedResidual {
  Matrix values;
  std::vector<IndexPair> zeroed;  // row-major sorted
  double gamma = 0.0;
};

// Zeroes every entry whose magnitude rank is <= ceil(gamma * cols) within
// its row and <= ceil(gamma * rows) within its column (rank 1 = largest).
// Ties: equal magnitudes are ordered by smaller column index within a row,
// smaller row index within a column.
ThresholdedResidual hard_threshold(const Matrix& a, double gamma);

// Same, but ranks are computed among observed entries only; unobserved
// entries of the output are 0 and never appear in the zeroed pattern.
ThresholdedResidual hard_threshold(const Matrix& a, double gamma,
                                   const ObservationMask& mask);

// 0.5 * squared Frobenius norm of the surviving residual of l - y.
double objective(const Matrix& l, const Matrix& y, double gamma,
                 const ObservationMask* mask = nullptr);

// Euclidean gradient of the objective at l, which is exactly the
// thresholded residual of l - y.
ThresholdedResidual euclidean_gradient(const Matrix& l, const Matrix& y,
                                       double gamma,
                                       const ObservationMask* mask = nullptr);

}  // namespace rpca
