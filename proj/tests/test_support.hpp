#pragma once

// Reference implementations and instance generators shared by the test
// suites. Everything here is deliberately written against different
// primitives than the library (full sorts instead of selection, Gram
// eigendecompositions instead of SVD, std:: distributions instead of the
// library RNG) so a bug cannot cancel out of both sides of a comparison.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rpca/manifold.hpp"
#include "rpca/types.hpp"

namespace testsup {

using rpca::Index;
using rpca::Matrix;
using rpca::Vector;

// ceil(gamma * n) with the same near-integer snap contract the library
// documents, implemented independently on long double.
inline Index oracle_cap(double gamma, Index n) {
  long double x = static_cast<long double>(gamma) * static_cast<long double>(n);
  long double nearest = std::round(x);
  long double snap = 1e-9L * std::max<long double>(1.0L, std::fabs(x));
  if (std::fabs(x - nearest) <= snap) x = nearest;
  return static_cast<Index>(std::ceil(x));
}

struct OracleThreshold {
  Matrix values;
  std::vector<rpca::IndexPair> zeroed;  // row-major sorted
};

// Full-sort reference for the thresholding operator. An entry is zeroed iff
// its magnitude rank is <= cap within both its row and its column, ranking
// only observed entries; ties break toward the smaller cross index.
inline OracleThreshold oracle_threshold(const Matrix& a, double gamma,
                                        const rpca::ObservationMask* mask) {
  const Index rows = a.rows(), cols = a.cols();
  auto observed = [&](Index i, Index j) {
    return mask == nullptr || mask->observed(i, j);
  };

  std::vector<std::vector<bool>> in_row(rows, std::vector<bool>(cols, false));
  std::vector<std::vector<bool>> in_col(rows, std::vector<bool>(cols, false));

  // Caps count observed entries only: ceil(gamma * #observed) per line.
  for (Index i = 0; i < rows; ++i) {
    std::vector<std::pair<double, Index>> entries;
    for (Index j = 0; j < cols; ++j)
      if (observed(i, j)) entries.emplace_back(std::abs(a(i, j)), j);
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    const Index take = oracle_cap(gamma, static_cast<Index>(entries.size()));
    for (Index k = 0; k < take; ++k) in_row[i][entries[k].second] = true;
  }

  for (Index j = 0; j < cols; ++j) {
    std::vector<std::pair<double, Index>> entries;
    for (Index i = 0; i < rows; ++i)
      if (observed(i, j)) entries.emplace_back(std::abs(a(i, j)), i);
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    const Index take = oracle_cap(gamma, static_cast<Index>(entries.size()));
    for (Index k = 0; k < take; ++k) in_col[entries[k].second][j] = true;
  }

  OracleThreshold out;
  out.values = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      if (!observed(i, j)) continue;
      if (in_row[i][j] && in_col[i][j])
        out.zeroed.push_back({i, j});
      else
        out.values(i, j) = a(i, j);
    }
  return out;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937& gen,
                            double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = dist(gen);
  return a;
}

// Orthonormal n x r block from the QR of a Gaussian matrix.
inline Matrix random_orthonormal(Index n, Index r, std::mt19937& gen) {
  Matrix g = random_matrix(n, r, gen);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  // Pin the sign so the columns are a deterministic function of g.
  Matrix rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Index k = 0; k < r; ++k)
    if (rfac(k, k) < 0) q.col(k) = -q.col(k);
  return q;
}

// Manifold point assembled from scratch (never routed through the library's
// SVD): Haar-ish orthonormal factors and explicit singular values.
inline rpca::FactoredLowRank random_point(Index rows, Index cols, Index r,
                                          std::mt19937& gen,
                                          double sigma_min = 1.0,
                                          double sigma_max = 3.0) {
  std::uniform_real_distribution<double> dist(sigma_min, sigma_max);
  Vector sigma(r);
  for (Index k = 0; k < r; ++k) sigma(k) = dist(gen);
  std::sort(sigma.data(), sigma.data() + r, std::greater<double>());
  return {random_orthonormal(rows, r, gen), sigma,
          random_orthonormal(cols, r, gen)};
}

// Random tangent vector at base, built by explicit projection of Gaussian
// blocks; |up|, |vp| are forced orthogonal to the base factors.
inline rpca::TangentVector random_tangent(const rpca::FactoredLowRank& base,
                                          std::mt19937& gen,
                                          double scale = 1.0) {
  const Index r = base.rank();
  rpca::TangentVector t;
  t.m = random_matrix(r, r, gen, scale);
  Matrix gu = random_matrix(base.rows(), r, gen, scale);
  t.up = gu - base.u * (base.u.transpose() * gu);
  Matrix gv = random_matrix(base.cols(), r, gen, scale);
  t.vp = gv - base.v * (base.v.transpose() * gv);
  return t;
}

// Squared Frobenius distance from a to its best rank-r approximation,
// via the spectrum of the Gram matrix (no SVD involved): the sum of the
// smallest min(rows, cols) - r eigenvalues of a^T a.
inline double oracle_truncation_error(const Matrix& a, Index r) {
  const bool tall = a.rows() >= a.cols();
  Matrix gram = tall ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);  // ascending eigenvalues
  const Index n = gram.rows();
  double sum = 0.0;
  for (Index k = 0; k < n - r; ++k) sum += std::max(0.0, eig.eigenvalues()(k));
  return std::sqrt(sum);
}

// All singular values of a, descending, from the Gram spectrum.
inline Vector oracle_singular_values(const Matrix& a) {
  const bool tall = a.rows() >= a.cols();
  Matrix gram = tall ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Index n = gram.rows();
  Vector s(n);
  for (Index k = 0; k < n; ++k)
    s(k) = std::sqrt(std::max(0.0, eig.eigenvalues()(n - 1 - k)));
  return s;
}

// True when every pair of magnitudes within each row and each column is
// separated by at least gap; rank patterns are then locally constant, which
// finite-difference checks need.
inline bool tie_free(const Matrix& a, double gap) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      const double mj = std::abs(a(i, j));
      if (mj < gap) return false;  // sign flips move mass across the ranking
      for (Index k = j + 1; k < a.cols(); ++k)
        if (std::abs(mj - std::abs(a(i, k))) < gap) return false;
      for (Index k = i + 1; k < a.rows(); ++k)
        if (std::abs(mj - std::abs(a(k, j))) < gap) return false;
    }
  return true;
}

inline rpca::ObservationMask random_mask(Index rows, Index cols, double p,
                                         std::mt19937& gen) {
  std::bernoulli_distribution keep(p);
  std::vector<rpca::IndexPair> pairs;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (keep(gen)) pairs.push_back({i, j});
  if (pairs.empty()) pairs.push_back({0, 0});
  return rpca::ObservationMask(rows, cols, pairs, p);
}

}  // namespace testsup
