#pragma once

#include "rpca/types.hpp"

namespace rpca {

struct ThresholdedResidual;

// Rank-r matrix held as U * diag(sigma) * V^T with orthonormal U, V and
// positive non-increasing sigma.
struct FactoredLowRank {
  Matrix u;      // rows x r
  Vector sigma;  // r
  Matrix v;      // cols x r

  Index rows() const { return u.rows(); }
  Index cols() const { return v.rows(); }
  Index rank() const { return sigma.size(); }
  double sigma_max() const { return sigma(0); }
  double sigma_min() const { return sigma(sigma.size() - 1); }
  double cond() const { return sigma_max() / sigma_min(); }
  double frob_norm() const { return sigma.norm(); }
  Matrix materialize() const;

  // Throws NumericalError if orthonormality or the sigma ordering is off.
  void check_invariants(double tol = 1e-10) const;
};

// Tangent vector at a base point, stored in factored form:
//   delta = U*M*V^T + Up*V^T + U*Vp^T   with U^T*Up = 0, V^T*Vp = 0.
struct TangentVector {
  Matrix m;   // r x r
  Matrix up;  // rows x r
  Matrix vp;  // cols x r

  bool is_zero() const;
  double frob_norm() const;      // sqrt(|m|^2 + |up|^2 + |vp|^2)
  double spectral_norm() const;  // largest singular value of delta
  TangentVector scaled(double s) const;
  Matrix materialize(const FactoredLowRank& base) const;
};

// Best rank-r approximation in Frobenius norm. Throws NumericalError when
// the input's r-th singular value is negligible (rank-deficient target).
// Sign convention: the largest-magnitude entry of each column of U is
// positive, so equal inputs factor identically.
FactoredLowRank truncated_svd(const Matrix& a, Index r);

// Orthogonal projection of an ambient direction onto the tangent space at
// base. Costs two thin products (d*V and d^T*U); d is never copied.
TangentVector project_tangent(const FactoredLowRank& base, const Matrix& d);
TangentVector project_tangent(const FactoredLowRank& base,
                              const ThresholdedResidual& d);

// Rank-r truncated SVD of base + delta, computed through a 2r x 2r core
// matrix (never forms the dense sum). Exact at delta = 0.
FactoredLowRank retract_projective(const FactoredLowRank& base,
                                   const TangentVector& delta);

// Maps base + delta back to the manifold along directions orthogonal to
// the tangent space: (X+d)V [U^T(X+d)V]^(-1) U^T(X+d). Exact at delta = 0.
// Throws NumericalError when the middle r x r system is near-singular.
FactoredLowRank retract_orthographic(const FactoredLowRank& base,
                                     const TangentVector& delta);

// Same map written against arbitrary full-rank bases q, rbasis spanning the
// column/row space of base: [(L-eta*d)*rbasis] [q^T(L-eta*d)*rbasis]^(-1)
// [q^T(L-eta*d)]. Needs only d*rbasis and d^T*q products. Equals
// retract_orthographic(base, -eta * project_tangent(base, d)).
FactoredLowRank retract_orthographic_span(const FactoredLowRank& base,
                                          const Matrix& d, double eta,
                                          const Matrix& q,
                                          const Matrix& rbasis);

}  // namespace rpca
