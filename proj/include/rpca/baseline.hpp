#pragma once

#include <utility>

#include "rpca/solver.hpp"
#include "rpca/types.hpp"

namespace rpca {

// Factored iterate L = uf * vf^T of the non-manifold baseline that runs
// gradient descent on the two factors simultaneously.
struct FactorPair {
  Matrix uf;  // rows x r
  Matrix vf;  // cols x r
  // sigma_1 of the initial iterate; the nominal step is divided by this.
  double step_scale = 1.0;
  // sqrt(|uf|^2 + |vf|^2) at initialization, for the blow-up guard.
  double init_norm = 0.0;

  Matrix materialize() const { return uf * vf.transpose(); }
};

// Balanced split of the rank-r truncation of the thresholded data:
// uf = U*sqrt(S), vf = V*sqrt(S).
FactorPair bm_initialize(const Matrix& y, const SolverConfig& config,
                         const ObservationMask* mask = nullptr);

// One simultaneous gradient step on both factors with step eta/step_scale
// (eta/p under a mask when configured), including the balance term
// 0.5*uf*(uf^T uf - vf^T vf) when enabled. Throws NumericalError when the
// factor norm exceeds 1e12 x its initial value or turns non-finite.
FactorPair bm_step(const FactorPair& f, const Matrix& y,
                   const SolverConfig& config,
                   const ObservationMask* mask = nullptr);

// Same loop contract and trace schema as solve().
std::pair<FactorPair, IterationTrace> bm_solve(
    const Matrix& y, const SolverConfig& config,
    const ObservationMask* mask = nullptr, const Matrix* reference = nullptr);

}  // namespace rpca
