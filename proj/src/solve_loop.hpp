#pragma once

// Shared gradient-descent driver for the manifold solver and the factored
// baseline: identical trace schema, stopping rules, and divergence
// flagging. Build-internal header.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "rpca/solver.hpp"
#include "rpca/thresholding.hpp"
#include "rpca/types.hpp"

namespace rpca::detail {

inline double effective_eta(const SolverConfig& config,
                            const ObservationMask* mask) {
  return (mask && config.scale_step_by_inv_p) ? config.eta / mask->rate_p()
                                              : config.eta;
}

template <class State, class DenseFn, class StepFn>
std::pair<State, IterationTrace> run_gd_loop(State state, const Matrix& y,
                                             const SolverConfig& config,
                                             const ObservationMask* mask,
                                             const Matrix* reference,
                                             DenseFn&& dense_of,
                                             StepFn&& do_step) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  IterationTrace trace;
  const double ref_norm = reference ? reference->norm() : 0.0;
  State best = state;
  double best_metric = std::numeric_limits<double>::infinity();
  double prev_obj = 0.0;
  int flat_count = 0;

  for (int k = 0;; ++k) {
    Matrix dense = dense_of(state);
    // Guard before thresholding: hard_threshold rejects non-finite input,
    // but a blown-up iterate must surface as a Diverged trace, not a throw.
    const bool finite_iterate = dense.allFinite();
    ThresholdedResidual grad;
    double obj = std::numeric_limits<double>::quiet_NaN();
    if (finite_iterate) {
      grad = mask ? hard_threshold(dense - y, config.gamma, *mask)
                  : hard_threshold(dense - y, config.gamma);
      obj = 0.5 * grad.values.squaredNorm();
    }
    std::optional<double> ref_err;
    if (reference) ref_err = (dense - *reference).norm();
    double ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.records.push_back({k, obj, ref_err, ms});

    if (!std::isfinite(obj) || (ref_err && !std::isfinite(*ref_err))) {
      trace.status = SolveStatus::Diverged;
      trace.note =
          "iteration " + std::to_string(k) + ": iterate turned non-finite";
      break;
    }
    double metric = ref_err ? *ref_err : obj;
    if (metric < best_metric) {
      best_metric = metric;
      best = state;
    }
    if (reference) {
      if (*ref_err <= config.rel_tol * ref_norm) {
        trace.status = SolveStatus::Converged;
        break;
      }
    } else if (obj == 0.0) {
      trace.status = SolveStatus::Converged;
      break;
    } else if (k > 0) {
      // Objective plateau: five consecutive relative changes below rel_tol.
      if (std::abs(prev_obj - obj) <= config.rel_tol * prev_obj) {
        if (++flat_count >= 5) {
          trace.status = SolveStatus::Converged;
          break;
        }
      } else {
        flat_count = 0;
      }
    }
    prev_obj = obj;
    if (k >= config.max_iters) {
      trace.status = SolveStatus::MaxIters;
      break;
    }
    try {
      state = do_step(state, grad);
    } catch (const NumericalError& e) {
      trace.status = SolveStatus::Diverged;
      trace.note = "step to iteration " + std::to_string(k + 1) +
                   " failed: " + e.what();
      break;
    }
  }
  return {std::move(best), std::move(trace)};
}

}  // namespace rpca::detail
