#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "rpca/manifold.hpp"
#include "rpca/types.hpp"

namespace rpca {

struct ProblemMeta {
  Index rank = 0;
  double mu = 0.0;          // incoherence of the planted low-rank part
  double kappa = 1.0;       // sigma_1 / sigma_r of the planted part
  double gamma_star = 0.0;  // realized corruption fraction (row/col max)
  double sigma_noise = 0.0;
};

struct SyntheticProblem {
  FactoredLowRank l_star;
  Matrix s_star;
  Matrix y;
  std::optional<ObservationMask> mask;
  ProblemMeta meta;
};

// Planted rank-r matrix with Haar-distributed factors and the given
// singular values (non-increasing, positive).
FactoredLowRank gen_low_rank(Index rows, Index cols, Index r,
                             const Vector& sigma_spec, std::uint64_t seed);

// Plants sparse corruption with N(0, value_std^2) values, replacing the
// low-rank entries (or adding on top when additive). Each column gets
// per_column entries (default floor(gamma_star * rows)); the support also
// respects the per-row cap ceil(gamma_star * cols). Returns (s_star, y)
// with s_star = y - l_star.
std::pair<Matrix, Matrix> corrupt(const FactoredLowRank& l_star,
                                  double gamma_star,
                                  std::optional<Index> per_column,
                                  double value_std, std::uint64_t seed,
                                  bool additive = false);

// Bernoulli(p) observation pattern; resamples the rare all-empty draw.
ObservationMask sample_mask(Index rows, Index cols, double p,
                            std::uint64_t seed);

// y + N(0, sigma_noise^2) iid on every entry.
Matrix add_noise(const Matrix& y, double sigma_noise, std::uint64_t seed);

// max( rows/r * max_i |U_i.|^2 , cols/r * max_j |V_j.|^2 ).
double incoherence(const FactoredLowRank& l);

// Frobenius distances without forming rows x cols dense differences where
// avoidable.
double frob_error(const FactoredLowRank& l, const Matrix& ref);
double frob_error(const FactoredLowRank& l, const FactoredLowRank& ref);

}  // namespace rpca
