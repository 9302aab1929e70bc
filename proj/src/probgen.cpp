#include "rpca/probgen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpca/rng.hpp"

namespace rpca {

namespace {

// Per-operation RNG streams: one problem seed gives independent draws for
// factors, corruption, mask, and noise.
constexpr std::uint64_t kStreamFactorU = 0;
constexpr std::uint64_t kStreamFactorV = 1;
constexpr std::uint64_t kStreamCorrupt = 2;
constexpr std::uint64_t kStreamMask = 3;
constexpr std::uint64_t kStreamNoise = 4;

// Fraction-to-count helpers with the same near-integer snap as the
// thresholding ranks.
double snapped(double t) {
  double nearest = std::round(t);
  if (std::abs(t - nearest) <= 1e-9 * std::max(1.0, std::abs(nearest)))
    return nearest;
  return t;
}
Index snap_ceil(double frac, Index n) {
  double k = std::ceil(snapped(frac * static_cast<double>(n)));
  return static_cast<Index>(std::clamp(k, 0.0, static_cast<double>(n)));
}
Index snap_floor(double frac, Index n) {
  double k = std::floor(snapped(frac * static_cast<double>(n)));
  return static_cast<Index>(std::clamp(k, 0.0, static_cast<double>(n)));
}

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

// Orthonormal basis of a standard-normal block, R-diagonal signs fixed so
// the distribution is exactly rotation-invariant.
Matrix haar_basis(Index n, Index r, Rng& rng) {
  Matrix g = gaussian(n, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  Matrix rr = qr.matrixQR().topRows(r);
  for (Index c = 0; c < r; ++c)
    if (rr(c, c) < 0.0) q.col(c) = -q.col(c);
  return q;
}

struct ThinPairImpl {
  Matrix q, r;
};
ThinPairImpl thin_qr_small(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  const Index r = a.cols();
  ThinPairImpl out;
  out.q = qr.householderQ() * Matrix::Identity(a.rows(), r);
  out.r = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  return out;
}

}  // namespace

FactoredLowRank gen_low_rank(Index rows, Index cols, Index r,
                             const Vector& sigma_spec, std::uint64_t seed) {
  if (r < 1 || r > std::min(rows, cols))
    throw InvalidParameter("rank must be in [1, min(rows, cols)]");
  if (sigma_spec.size() != r)
    throw InvalidParameter("sigma_spec length must equal the rank");
  for (Index i = 0; i < r; ++i) {
    if (!(sigma_spec(i) > 0.0) || !std::isfinite(sigma_spec(i)))
      throw InvalidParameter("sigma_spec must be positive and finite");
    if (i > 0 && sigma_spec(i) > sigma_spec(i - 1))
      throw InvalidParameter("sigma_spec must be non-increasing");
  }
  Rng ru(seed, kStreamFactorU), rv(seed, kStreamFactorV);
  FactoredLowRank out;
  out.u = haar_basis(rows, r, ru);
  out.sigma = sigma_spec;
  out.v = haar_basis(cols, r, rv);
  return out;
}

std::pair<Matrix, Matrix> corrupt(const FactoredLowRank& l_star,
                                  double gamma_star,
                                  std::optional<Index> per_column,
                                  double value_std, std::uint64_t seed,
                                  bool additive) {
  const Index rows = l_star.rows(), cols = l_star.cols();
  if (!(gamma_star >= 0.0) || gamma_star > 1.0)
    throw InvalidParameter("corruption fraction must be in [0, 1]");
  if (!(value_std >= 0.0))
    throw InvalidParameter("corruption std must be non-negative");
  const Index col_cap = snap_ceil(gamma_star, rows);
  const Index row_cap = snap_ceil(gamma_star, cols);
  const Index k = per_column ? *per_column : snap_floor(gamma_star, rows);
  if (k < 0 || k > col_cap)
    throw InvalidParameter("per-column count exceeds the corruption cap");
  if (k > 0 && k * cols > rows * row_cap)
    throw InvalidParameter("infeasible corruption caps");

  Matrix y = l_star.materialize();
  Matrix s = Matrix::Zero(rows, cols);
  if (k == 0) return {std::move(s), std::move(y)};

  Rng rng(seed, kStreamCorrupt);
  std::vector<Index> capacity(static_cast<std::size_t>(rows), row_cap);
  std::vector<Index> chosen;
  std::vector<std::vector<Index>> buckets(
      static_cast<std::size_t>(row_cap) + 1);
  for (Index j = 0; j < cols; ++j) {
    for (auto& b : buckets) b.clear();
    for (Index i = 0; i < rows; ++i)
      if (capacity[static_cast<std::size_t>(i)] > 0)
        buckets[static_cast<std::size_t>(capacity[static_cast<std::size_t>(i)])]
            .push_back(i);
    // Fill from the highest remaining capacity down; sample inside the
    // boundary class. Taking all rows of a saturated-capacity class first
    // keeps every suffix of columns feasible, even with exactly tight caps.
    chosen.clear();
    for (Index cap = row_cap; cap >= 1 && static_cast<Index>(chosen.size()) < k;
         --cap) {
      auto& b = buckets[static_cast<std::size_t>(cap)];
      Index need = k - static_cast<Index>(chosen.size());
      if (static_cast<Index>(b.size()) <= need) {
        chosen.insert(chosen.end(), b.begin(), b.end());
      } else {
        for (Index t = 0; t < need; ++t) {
          std::size_t pick = static_cast<std::size_t>(t) +
                             static_cast<std::size_t>(rng.below(b.size() - t));
          std::swap(b[static_cast<std::size_t>(t)], b[pick]);
          chosen.push_back(b[static_cast<std::size_t>(t)]);
        }
      }
    }
    if (static_cast<Index>(chosen.size()) < k)
      throw NumericalError("corruption support sampling ran out of capacity");
    for (Index i : chosen) {
      double original = y(i, j);
      double val = value_std * rng.normal();
      y(i, j) = additive ? original + val : val;
      s(i, j) = y(i, j) - original;
      --capacity[static_cast<std::size_t>(i)];
    }
  }
  return {std::move(s), std::move(y)};
}

ObservationMask sample_mask(Index rows, Index cols, double p,
                            std::uint64_t seed) {
  if (rows <= 0 || cols <= 0)
    throw InvalidParameter("mask dimensions must be positive");
  if (!(p > 0.0) || p > 1.0)
    throw InvalidParameter("observation rate must be in (0, 1]");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed, kStreamMask + attempt);
    std::vector<IndexPair> pairs;
    pairs.reserve(static_cast<std::size_t>(
        p * static_cast<double>(rows) * static_cast<double>(cols) * 1.1));
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        if (rng.uniform01() < p) pairs.emplace_back(i, j);
    if (!pairs.empty()) return ObservationMask(rows, cols, pairs, p);
  }
}

Matrix add_noise(const Matrix& y, double sigma_noise, std::uint64_t seed) {
  if (!(sigma_noise >= 0.0))
    throw InvalidParameter("noise std must be non-negative");
  if (sigma_noise == 0.0) return y;
  Rng rng(seed, kStreamNoise);
  Matrix out = y;
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) += sigma_noise * rng.normal();
  return out;
}

double incoherence(const FactoredLowRank& l) {
  const double r = static_cast<double>(l.rank());
  double mu_u = l.u.rowwise().squaredNorm().maxCoeff() *
                static_cast<double>(l.rows()) / r;
  double mu_v = l.v.rowwise().squaredNorm().maxCoeff() *
                static_cast<double>(l.cols()) / r;
  return std::max(mu_u, mu_v);
}

double frob_error(const FactoredLowRank& l, const Matrix& ref) {
  if (l.rows() != ref.rows() || l.cols() != ref.cols())
    throw InputError("frob_error operands have mismatched dimensions");
  double acc = 0.0;
  Index block = std::max<Index>(1, 262144 / std::max<Index>(1, ref.cols()));
  for (Index i0 = 0; i0 < l.rows(); i0 += block) {
    Index b = std::min(block, l.rows() - i0);
    acc += ((l.u.middleRows(i0, b) * l.sigma.asDiagonal()) * l.v.transpose() -
            ref.middleRows(i0, b))
               .squaredNorm();
  }
  return std::sqrt(acc);
}

double frob_error(const FactoredLowRank& l, const FactoredLowRank& ref) {
  if (l.rows() != ref.rows() || l.cols() != ref.cols())
    throw InputError("frob_error operands have mismatched dimensions");
  const Index r1 = l.rank(), r2 = ref.rank();
  Matrix us(l.rows(), r1 + r2);
  us << l.u, ref.u;
  Matrix vs(l.cols(), r1 + r2);
  vs << l.v, ref.v;
  ThinPairImpl qu = thin_qr_small(us);
  ThinPairImpl qv = thin_qr_small(vs);
  Vector d(r1 + r2);
  d << l.sigma, -ref.sigma;
  // |A - B|_F = |Ru diag(s1, -s2) Rv^T|_F with orthonormal outer factors.
  return (qu.r * d.asDiagonal() * qv.r.transpose()).norm();
}

}  // namespace rpca
