#include "rpca/types.hpp"

#include <algorithm>
#include <string>

namespace rpca {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite())
    throw InputError(std::string(what) + " contains non-finite entries");
}

ObservationMask::ObservationMask(Index rows, Index cols,
                                 const std::vector<IndexPair>& observed,
                                 double rate_p)
    : rows_(rows), cols_(cols), rate_p_(rate_p) {
  if (rows <= 0 || cols <= 0)
    throw InvalidParameter("mask dimensions must be positive");
  if (!(rate_p > 0.0) || rate_p > 1.0)
    throw InvalidParameter("observation rate must be in (0, 1]");
  if (observed.empty()) throw InvalidParameter("mask has no observed entries");
  bits_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
               0);
  for (const auto& [i, j] : observed) {
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw InputError("mask entry out of range");
    auto& slot = bits_[static_cast<std::size_t>(i * cols + j)];
    if (slot) throw InputError("duplicate mask entry");
    slot = 1;
  }
  count_ = observed.size();
}

std::vector<IndexPair> ObservationMask::pairs() const {
  std::vector<IndexPair> out;
  out.reserve(count_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j)
      if (observed(i, j)) out.emplace_back(i, j);
  return out;
}

}  // namespace rpca
