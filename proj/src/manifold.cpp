#include "rpca/manifold.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "rpca/thresholding.hpp"

namespace rpca {

namespace {

constexpr double kRankCollapseRatio = 1e-14;
constexpr double kCondLimit = 1e12;

// Orients each singular pair so the largest-magnitude entry of the left
// vector is positive (first such entry on exact ties), making the
// factorization of equal inputs identical.
void fix_signs(Matrix& u, Matrix& v) {
  for (Index c = 0; c < u.cols(); ++c) {
    Index at = 0;
    double best = std::abs(u(0, c));
    for (Index i = 1; i < u.rows(); ++i) {
      double m = std::abs(u(i, c));
      if (m > best) {
        best = m;
        at = i;
      }
    }
    if (u(at, c) < 0.0) {
      u.col(c) = -u.col(c);
      v.col(c) = -v.col(c);
    }
  }
}

struct ThinQr {
  Matrix q;  // n x r
  Matrix r;  // r x r upper triangular
};

ThinQr thin_qr(const Matrix& a) {
  const Index r = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  ThinQr out;
  out.q = qr.householderQ() * Matrix::Identity(a.rows(), r);
  out.r = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  return out;
}

// Builds the result from left/right bases and the SVD of the small core
// sitting between them, keeping the top rank singular triples.
FactoredLowRank compose(const Matrix& left, const Matrix& right,
                        const Matrix& core, Index rank, const char* context) {
  Eigen::JacobiSVD<Matrix> svd(core,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s(0) <= 0.0 || s(rank - 1) <= kRankCollapseRatio * s(0))
    throw NumericalError(std::string(context) +
                         ": iterate dropped below the working rank");
  FactoredLowRank out;
  out.u = left * svd.matrixU().leftCols(rank);
  out.v = right * svd.matrixV().leftCols(rank);
  out.sigma = s.head(rank);
  fix_signs(out.u, out.v);
  return out;
}

double condition_of(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

FactoredLowRank orthographic_span_impl(const FactoredLowRank& base,
                                       const Matrix& d, double eta,
                                       const Matrix& q, const Matrix& rbasis) {
  // a2 = (L - eta d) rbasis, b2 = (L - eta d)^T q, mid = q^T a2; the result
  // is a2 mid^{-1} b2^T. Only d * rbasis and d^T * q touch the dense d.
  const Index r = base.rank();
  Matrix a2 = base.u * (base.sigma.asDiagonal() * (base.v.transpose() * rbasis))
              - eta * (d * rbasis);
  Matrix b2 = base.v * (base.sigma.asDiagonal() * (base.u.transpose() * q))
              - eta * (d.transpose() * q);
  Matrix mid = q.transpose() * a2;

  Eigen::JacobiSVD<Matrix> mid_svd(mid,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& ms = mid_svd.singularValues();
  if (ms(0) <= 0.0 || ms(r - 1) * kCondLimit <= ms(0))
    throw NumericalError(
        "orthographic retraction: singular middle system (iterate nearly "
        "rank-deficient along the step)");

  ThinQr qa = thin_qr(a2);
  ThinQr qb = thin_qr(b2);
  Matrix core = qa.r * mid_svd.solve(qb.r.transpose());
  return compose(qa.q, qb.q, core, r, "orthographic retraction");
}

}  // namespace

Matrix FactoredLowRank::materialize() const {
  return u * (sigma.asDiagonal() * v.transpose());
}

void FactoredLowRank::check_invariants(double tol) const {
  const Index r = rank();
  if (r < 1 || u.cols() != r || v.cols() != r)
    throw NumericalError("factored form has inconsistent rank");
  double ortho_u = (u.transpose() * u - Matrix::Identity(r, r))
                       .cwiseAbs()
                       .maxCoeff();
  double ortho_v = (v.transpose() * v - Matrix::Identity(r, r))
                       .cwiseAbs()
                       .maxCoeff();
  if (ortho_u > tol || ortho_v > tol)
    throw NumericalError("factored form lost orthonormality");
  for (Index i = 0; i < r; ++i) {
    if (!(sigma(i) > 0.0))
      throw NumericalError("factored form has non-positive singular value");
    if (i > 0 && sigma(i) > sigma(i - 1))
      throw NumericalError("singular values are not non-increasing");
  }
}

bool TangentVector::is_zero() const {
  return m.squaredNorm() == 0.0 && up.squaredNorm() == 0.0 &&
         vp.squaredNorm() == 0.0;
}

double TangentVector::frob_norm() const {
  return std::sqrt(m.squaredNorm() + up.squaredNorm() + vp.squaredNorm());
}

double TangentVector::spectral_norm() const {
  // delta = [U Qu] K [V Qv]^T with orthonormal-ish stacks, so the singular
  // values of delta are those of the 2r x 2r core K.
  const Index r = m.rows();
  ThinQr qu = thin_qr(up);
  ThinQr qv = thin_qr(vp);
  Matrix k = Matrix::Zero(2 * r, 2 * r);
  k.topLeftCorner(r, r) = m;
  k.topRightCorner(r, r) = qv.r.transpose();
  k.bottomLeftCorner(r, r) = qu.r;
  Eigen::JacobiSVD<Matrix> svd(k);
  return svd.singularValues()(0);
}

TangentVector TangentVector::scaled(double s) const {
  return TangentVector{s * m, s * up, s * vp};
}

Matrix TangentVector::materialize(const FactoredLowRank& base) const {
  return base.u * (m * base.v.transpose() + vp.transpose()) +
         up * base.v.transpose();
}

FactoredLowRank truncated_svd(const Matrix& a, Index r) {
  if (r < 1) throw InvalidParameter("rank must be at least 1");
  if (r > std::min(a.rows(), a.cols()))
    throw InvalidParameter("rank exceeds matrix dimensions");
  require_finite(a, "svd input");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s(0) <= 0.0 || s(r - 1) <= kRankCollapseRatio * s(0))
    throw NumericalError("truncation target is rank-deficient at rank " +
                         std::to_string(r));
  FactoredLowRank out;
  out.u = svd.matrixU().leftCols(r);
  out.sigma = s.head(r);
  out.v = svd.matrixV().leftCols(r);
  fix_signs(out.u, out.v);
  return out;
}

TangentVector project_tangent(const FactoredLowRank& base, const Matrix& d) {
  if (d.rows() != base.rows() || d.cols() != base.cols())
    throw InputError("direction dimensions do not match the base point");
  TangentVector t;
  Matrix dv = d * base.v;                    // n1 x r
  t.m = base.u.transpose() * dv;             // r x r
  t.up = dv - base.u * t.m;
  Matrix dtu = d.transpose() * base.u;       // n2 x r
  t.vp = dtu - base.v * t.m.transpose();
  return t;
}

TangentVector project_tangent(const FactoredLowRank& base,
                              const ThresholdedResidual& d) {
  return project_tangent(base, d.values);
}

FactoredLowRank retract_projective(const FactoredLowRank& base,
                                   const TangentVector& delta) {
  if (delta.is_zero()) return base;
  const Index r = base.rank();
  // base + delta = [U Qu] K [V Qv]^T; its rank-r truncation comes from the
  // SVD of the 2r x 2r core K.
  ThinQr qu = thin_qr(delta.up);
  ThinQr qv = thin_qr(delta.vp);
  Matrix k = Matrix::Zero(2 * r, 2 * r);
  k.topLeftCorner(r, r) = delta.m;
  k.topLeftCorner(r, r) += Matrix(base.sigma.asDiagonal());
  k.topRightCorner(r, r) = qv.r.transpose();
  k.bottomLeftCorner(r, r) = qu.r;

  Matrix left(base.rows(), 2 * r), right(base.cols(), 2 * r);
  left << base.u, qu.q;
  right << base.v, qv.q;
  return compose(left, right, k, r, "projective retraction");
}

FactoredLowRank retract_orthographic(const FactoredLowRank& base,
                                     const TangentVector& delta) {
  if (delta.is_zero()) return base;
  const Index r = base.rank();
  Matrix w = delta.m;
  w += Matrix(base.sigma.asDiagonal());  // U^T (X + delta) V

  Eigen::JacobiSVD<Matrix> w_svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& ws = w_svd.singularValues();
  if (ws(0) <= 0.0 || ws(r - 1) * kCondLimit <= ws(0))
    throw NumericalError(
        "orthographic retraction: singular middle system (iterate nearly "
        "rank-deficient along the step)");

  Matrix a1 = base.u * w + delta.up;              // (X + delta) V
  Matrix b1 = base.v * w.transpose() + delta.vp;  // (X + delta)^T U
  ThinQr qa = thin_qr(a1);
  ThinQr qb = thin_qr(b1);
  Matrix core = qa.r * w_svd.solve(qb.r.transpose());
  return compose(qa.q, qb.q, core, r, "orthographic retraction");
}

FactoredLowRank retract_orthographic_span(const FactoredLowRank& base,
                                          const Matrix& d, double eta,
                                          const Matrix& q,
                                          const Matrix& rbasis) {
  const Index r = base.rank();
  if (d.rows() != base.rows() || d.cols() != base.cols())
    throw InputError("direction dimensions do not match the base point");
  if (q.rows() != base.rows() || q.cols() != r || rbasis.rows() != base.cols() ||
      rbasis.cols() != r)
    throw InputError("span bases must be rows x r and cols x r");
  require_finite(q, "column span basis");
  require_finite(rbasis, "row span basis");
  if (condition_of(q) > kCondLimit || condition_of(rbasis) > kCondLimit)
    throw InputError("span basis is rank-deficient");
  if (eta == 0.0 || d.squaredNorm() == 0.0) return base;
  return orthographic_span_impl(base, d, eta, q, rbasis);
}

}  // namespace rpca
