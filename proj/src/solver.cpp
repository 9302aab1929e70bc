#include "rpca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpca/thresholding.hpp"
#include "solve_loop.hpp"

namespace rpca {

namespace {

void check_operands(const Matrix& y, const SolverConfig& config,
                    const ObservationMask* mask, const Matrix* reference) {
  config.validate(y.rows(), y.cols());
  require_finite(y, "data matrix");
  if (mask && (mask->rows() != y.rows() || mask->cols() != y.cols()))
    throw InputError("mask dimensions do not match the data matrix");
  if (reference &&
      (reference->rows() != y.rows() || reference->cols() != y.cols()))
    throw InputError("reference dimensions do not match the data matrix");
}

FactoredLowRank apply_manifold_step(const FactoredLowRank& l,
                                    const ThresholdedResidual& grad,
                                    const SolverConfig& config,
                                    const ObservationMask* mask) {
  double eta_eff = detail::effective_eta(config, mask);
  TangentVector delta = project_tangent(l, grad.values).scaled(-eta_eff);
  return config.retraction == Retraction::Projective
             ? retract_projective(l, delta)
             : retract_orthographic(l, delta);
}

}  // namespace

void SolverConfig::validate(Index rows, Index cols) const {
  if (rows <= 0 || cols <= 0)
    throw InvalidParameter("matrix dimensions must be positive");
  if (rank < 1) throw InvalidParameter("rank must be at least 1");
  if (rank > std::min(rows, cols))
    throw InvalidParameter("rank exceeds matrix dimensions");
  if (!(gamma >= 0.0) || gamma >= 1.0)
    throw InvalidParameter("gamma must be in [0, 1)");
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw InvalidParameter("eta must be positive and finite");
  if (max_iters < 0) throw InvalidParameter("max_iters must be non-negative");
  if (!(rel_tol >= 0.0)) throw InvalidParameter("rel_tol must be non-negative");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "CONVERGED";
    case SolveStatus::MaxIters: return "MAXITER";
    case SolveStatus::Diverged: return "DIVERGED";
  }
  return "UNKNOWN";
}

FactoredLowRank initialize(const Matrix& y, const SolverConfig& config,
                           const ObservationMask* mask) {
  check_operands(y, config, mask, nullptr);
  ThresholdedResidual res = mask ? hard_threshold(y, config.gamma, *mask)
                                 : hard_threshold(y, config.gamma);
  double scale =
      (mask && config.scale_step_by_inv_p) ? 1.0 / mask->rate_p() : 1.0;
  try {
    return truncated_svd(scale * res.values, config.rank);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("initialization failed: ") + e.what());
  }
}

FactoredLowRank step(const FactoredLowRank& l, const Matrix& y,
                     const SolverConfig& config, const ObservationMask* mask) {
  check_operands(y, config, mask, nullptr);
  if (l.rows() != y.rows() || l.cols() != y.cols())
    throw InputError("iterate dimensions do not match the data matrix");
  ThresholdedResidual grad =
      euclidean_gradient(l.materialize(), y, config.gamma, mask);
  return apply_manifold_step(l, grad, config, mask);
}

std::pair<FactoredLowRank, IterationTrace> solve(const Matrix& y,
                                                 const SolverConfig& config,
                                                 const ObservationMask* mask,
                                                 const Matrix* reference) {
  check_operands(y, config, mask, reference);
  FactoredLowRank init = initialize(y, config, mask);
  return detail::run_gd_loop(
      std::move(init), y, config, mask, reference,
      [](const FactoredLowRank& l) { return l.materialize(); },
      [&](const FactoredLowRank& l, const ThresholdedResidual& grad) {
        return apply_manifold_step(l, grad, config, mask);
      });
}

Matrix sparse_estimate(const FactoredLowRank& l, const Matrix& y, double gamma,
                       const ObservationMask* mask) {
  if (l.rows() != y.rows() || l.cols() != y.cols())
    throw InputError("iterate dimensions do not match the data matrix");
  Matrix dense = l.materialize();
  ThresholdedResidual res = mask ? hard_threshold(dense - y, gamma, *mask)
                                 : hard_threshold(dense - y, gamma);
  Matrix s = Matrix::Zero(y.rows(), y.cols());
  for (const auto& [i, j] : res.zeroed) s(i, j) = y(i, j) - dense(i, j);
  return s;
}

}  // namespace rpca
