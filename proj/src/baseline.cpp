#include "rpca/baseline.hpp"

#include <cmath>
#include <string>

#include "rpca/thresholding.hpp"
#include "solve_loop.hpp"

namespace rpca {

namespace {

constexpr double kBlowUpFactor = 1e12;

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

double factor_norm(const FactorPair& f) {
  return std::sqrt(f.uf.squaredNorm() + f.vf.squaredNorm());
}

FactorPair bm_apply(const FactorPair& f, const ThresholdedResidual& grad,
                    const SolverConfig& config, const ObservationMask* mask) {
  // Nominal step is eta (or eta/p) divided by sigma_1 of the initial
  // iterate, matching the scale-free step of the manifold method.
  double eta_eff = detail::effective_eta(config, mask) / f.step_scale;
  Matrix gu = grad.values * f.vf;
  Matrix gv = grad.values.transpose() * f.uf;
  if (config.bm_balance) {
    Matrix imbalance = f.uf.transpose() * f.uf - f.vf.transpose() * f.vf;
    gu += 0.5 * (f.uf * imbalance);
    gv -= 0.5 * (f.vf * imbalance);
  }
  FactorPair out{f.uf - eta_eff * gu, f.vf - eta_eff * gv, f.step_scale,
                 f.init_norm};
  double norm = factor_norm(out);
  if (!std::isfinite(norm) || norm > kBlowUpFactor * f.init_norm)
    throw NumericalError("baseline factors blew up (step too large)");
  return out;
}

}  // namespace

FactorPair bm_initialize(const Matrix& y, const SolverConfig& config,
                         const ObservationMask* mask) {
  check_operands(y, config, mask, nullptr);
  ThresholdedResidual res = mask ? hard_threshold(y, config.gamma, *mask)
                                 : hard_threshold(y, config.gamma);
  double scale =
      (mask && config.scale_step_by_inv_p) ? 1.0 / mask->rate_p() : 1.0;
  FactoredLowRank l0;
  try {
    l0 = truncated_svd(scale * res.values, config.rank);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("initialization failed: ") + e.what());
  }
  Vector root = l0.sigma.cwiseSqrt();
  FactorPair f;
  f.uf = l0.u * root.asDiagonal();
  f.vf = l0.v * root.asDiagonal();
  f.step_scale = l0.sigma_max();
  f.init_norm = factor_norm(f);
  return f;
}

FactorPair bm_step(const FactorPair& f, const Matrix& y,
                   const SolverConfig& config, const ObservationMask* mask) {
  check_operands(y, config, mask, nullptr);
  if (f.uf.rows() != y.rows() || f.vf.rows() != y.cols())
    throw InputError("factor dimensions do not match the data matrix");
  ThresholdedResidual grad =
      euclidean_gradient(f.materialize(), y, config.gamma, mask);
  return bm_apply(f, grad, config, mask);
}

std::pair<FactorPair, IterationTrace> bm_solve(const Matrix& y,
                                               const SolverConfig& config,
                                               const ObservationMask* mask,
                                               const Matrix* reference) {
  check_operands(y, config, mask, reference);
  FactorPair init = bm_initialize(y, config, mask);
  return detail::run_gd_loop(
      std::move(init), y, config, mask, reference,
      [](const FactorPair& f) { return f.materialize(); },
      [&](const FactorPair& f, const ThresholdedResidual& grad) {
        return bm_apply(f, grad, config, mask);
      });
}

}  // namespace rpca
