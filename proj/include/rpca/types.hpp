#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

#include "rpca/errors.hpp"

namespace rpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexPair = std::pair<Index, Index>;

void require_finite(const Matrix& a, const char* what);

// Set of observed entries of a partially observed matrix, with the
// Bernoulli sampling rate it was drawn at. Entries are unique and in range.
class ObservationMask {
public:
  ObservationMask(Index rows, Index cols, const std::vector<IndexPair>& observed,
                  double rate_p);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  double rate_p() const { return rate_p_; }
  std::size_t observed_count() const { return count_; }

  bool observed(Index i, Index j) const {
    return bits_[static_cast<std::size_t>(i * cols_ + j)] != 0;
  }

  // Row-major sorted list of observed entries.
  std::vector<IndexPair> pairs() const;

private:
  Index rows_ = 0;
  Index cols_ = 0;
  double rate_p_ = 1.0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace rpca
