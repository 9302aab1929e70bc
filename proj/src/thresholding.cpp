#include "rpca/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rpca {

namespace {

// ceil(gamma * n), except that a product within 1e-9 (relative) of an
// integer counts as that integer: gamma = 0.2 on n = 240 must give 48 even
// though 0.2 * 240 lands a hair above 48 in floating point.
Index top_count(double gamma, Index n) {
  double t = gamma * static_cast<double>(n);
  double nearest = std::round(t);
  double k = std::abs(t - nearest) <= 1e-9 * std::max(1.0, std::abs(nearest))
                 ? nearest
                 : std::ceil(t);
  if (k < 0.0) k = 0.0;
  if (k > static_cast<double>(n)) k = static_cast<double>(n);
  return static_cast<Index>(k);
}

struct Entry {
  double mag;
  Index idx;
};

// Strict total order: larger magnitude first, smaller index on ties.
inline bool before(const Entry& a, const Entry& b) {
  return a.mag > b.mag || (a.mag == b.mag && a.idx < b.idx);
}

// Flags the k top-ranked entries of line (per the order above) in flags,
// at stride apart positions starting from base.
void mark_top(std::vector<Entry>& line, Index k, std::vector<std::uint8_t>& flags,
              std::size_t base, std::size_t stride) {
  if (k <= 0) return;
  if (k < static_cast<Index>(line.size()))
    std::nth_element(line.begin(), line.begin() + (k - 1), line.end(), before);
  else
    k = static_cast<Index>(line.size());
  for (Index t = 0; t < k; ++t)
    flags[base + static_cast<std::size_t>(line[t].idx) * stride] = 1;
}

ThresholdedResidual threshold_impl(const Matrix& a, double gamma,
                                   const ObservationMask* mask) {
  if (!(gamma >= 0.0) || gamma > 1.0)
    throw InvalidParameter("gamma must be in [0, 1]");
  require_finite(a, "threshold input");
  if (mask && (mask->rows() != a.rows() || mask->cols() != a.cols()))
    throw InputError("mask dimensions do not match the matrix");

  const Index rows = a.rows(), cols = a.cols();
  const std::size_t total = static_cast<std::size_t>(rows * cols);
  std::vector<std::uint8_t> row_top(total, 0), col_top(total, 0);
  std::vector<Entry> line;

  line.reserve(static_cast<std::size_t>(cols));
  for (Index i = 0; i < rows; ++i) {
    line.clear();
    for (Index j = 0; j < cols; ++j)
      if (!mask || mask->observed(i, j)) line.push_back({std::abs(a(i, j)), j});
    mark_top(line, top_count(gamma, static_cast<Index>(line.size())), row_top,
             static_cast<std::size_t>(i * cols), 1);
  }

  line.reserve(static_cast<std::size_t>(rows));
  for (Index j = 0; j < cols; ++j) {
    line.clear();
    for (Index i = 0; i < rows; ++i)
      if (!mask || mask->observed(i, j)) line.push_back({std::abs(a(i, j)), i});
    mark_top(line, top_count(gamma, static_cast<Index>(line.size())), col_top,
             static_cast<std::size_t>(j), static_cast<std::size_t>(cols));
  }

  ThresholdedResidual out;
  out.gamma = gamma;
  if (mask) {
    out.values = Matrix::Zero(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        if (mask->observed(i, j)) out.values(i, j) = a(i, j);
  } else {
    out.values = a;
  }
  for (Index i = 0; i < rows; ++i) {
    const std::size_t base = static_cast<std::size_t>(i * cols);
    for (Index j = 0; j < cols; ++j) {
      const std::size_t at = base + static_cast<std::size_t>(j);
      if (row_top[at] && col_top[at]) {
        out.values(i, j) = 0.0;
        out.zeroed.emplace_back(i, j);
      }
    }
  }
  return out;
}

}  // namespace

ThresholdedResidual hard_threshold(const Matrix& a, double gamma) {
  return threshold_impl(a, gamma, nullptr);
}

ThresholdedResidual hard_threshold(const Matrix& a, double gamma,
                                   const ObservationMask& mask) {
  return threshold_impl(a, gamma, &mask);
}

double objective(const Matrix& l, const Matrix& y, double gamma,
                 const ObservationMask* mask) {
  return 0.5 * euclidean_gradient(l, y, gamma, mask).values.squaredNorm();
}

ThresholdedResidual euclidean_gradient(const Matrix& l, const Matrix& y,
                                       double gamma,
                                       const ObservationMask* mask) {
  if (l.rows() != y.rows() || l.cols() != y.cols())
    throw InputError("objective operands have mismatched dimensions");
  return threshold_impl(l - y, gamma, mask);
}

}  // namespace rpca
