#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpca/manifold.hpp"
#include "rpca/types.hpp"

namespace rpca {

enum class Retraction { Projective, Orthographic };

struct SolverConfig {
  int rank = 1;
  double gamma = 0.0;
  double eta = 0.5;
  Retraction retraction = Retraction::Orthographic;
  int max_iters = 300;
  double rel_tol = 1e-6;
  // Under partial observation, scale the step and the initialization by
  // 1/p to compensate for the sampling rate.
  bool scale_step_by_inv_p = true;
  // Baseline only: include the factor-balance term in the gradient.
  bool bm_balance = true;

  void validate(Index rows, Index cols) const;  // throws InvalidParameter
};

enum class SolveStatus { Converged, MaxIters, Diverged };

const char* to_string(SolveStatus s);

struct TraceRecord {
  int iter = 0;
  double objective = 0.0;
  std::optional<double> ref_error;  // ||L_k - reference||_F when available
  double elapsed_ms = 0.0;
};

struct IterationTrace {
  std::vector<TraceRecord> records;
  SolveStatus status = SolveStatus::MaxIters;
  std::string note;  // diagnostic for Diverged runs
};

// Rank-r truncation of the thresholded data (scaled by 1/p under a mask
// when configured). Throws NumericalError when the truncation target is
// rank-deficient.
FactoredLowRank initialize(const Matrix& y, const SolverConfig& config,
                           const ObservationMask* mask = nullptr);

// One gradient step: threshold the residual, project onto the tangent
// space, move by -eta (or -eta/p) and retract.
FactoredLowRank step(const FactoredLowRank& l, const Matrix& y,
                     const SolverConfig& config,
                     const ObservationMask* mask = nullptr);

// Full loop. Numerical failure mid-run is not thrown: the trace is flagged
// Diverged (with the iteration in the note) and the best iterate so far is
// returned; only a failed initialization throws. Record 0 is the
// post-initialization state. Stopping: relative reference error <= rel_tol
// when a reference is given; otherwise an exactly zero objective, or five
// consecutive relative objective changes below rel_tol.
std::pair<FactoredLowRank, IterationTrace> solve(
    const Matrix& y, const SolverConfig& config,
    const ObservationMask* mask = nullptr, const Matrix* reference = nullptr);

// Sparse component estimate: y - l on the zeroed pattern of the
// thresholded residual, 0 elsewhere.
Matrix sparse_estimate(const FactoredLowRank& l, const Matrix& y, double gamma,
                       const ObservationMask* mask = nullptr);

}  // namespace rpca
