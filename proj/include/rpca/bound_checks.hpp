#pragma once

#include <string>
#include <vector>

#include "rpca/manifold.hpp"
#include "rpca/types.hpp"

namespace rpca {

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct BoundCheckReport {
  std::vector<BoundCheck> checks;
  bool skipped = false;    // precondition not met; checks empty
  std::string reason;
  double a = 0.0;          // distance ratio the bounds are stated in

  bool all_pass() const {
    if (skipped) return false;
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

// How well the tangent spaces at l and at l_star capture the difference
// d = l - l_star, with a = |d|_F / sigma_min(l_star):
//   |d - P_tangent(l)(d)|_F      <= a/(2(1-a)) * |d|_F
//   |d - P_tangent(l_star)(d)|_F <= a/2        * |d|_F
// Skipped (not failed) when a > 1.
BoundCheckReport check_tangent_capture(const FactoredLowRank& l,
                                       const FactoredLowRank& l_star);

// Distance between either retraction of delta and the plain sum
// base + delta:
//   |retract(base, delta) - (base + delta)|_F
//       <= |delta|_F^2 / (2 (sigma_min(base) - |delta|_2))
// Skipped when |delta|_2 >= sigma_min(base). Here a = |delta|_2 / sigma_min.
BoundCheckReport check_retraction_proximity(const FactoredLowRank& base,
                                            const TangentVector& delta);

}  // namespace rpca
