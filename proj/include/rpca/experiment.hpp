#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpca/probgen.hpp"
#include "rpca/solver.hpp"
#include "rpca/types.hpp"

namespace rpca {

enum class Scenario { Setting1, Setting2, Custom };

enum class SolverKind { ManifoldProjective, ManifoldOrthographic, BaselineBM };

const char* to_string(SolverKind k);

// Grid experiment on synthetic data: for each (solver, eta, seed) cell one
// trace CSV named <solver>_eta<eta>_seed<seed>.csv plus a summary.csv.
struct ExperimentSpec {
  Scenario scenario = Scenario::Setting1;
  Index rows = 200;
  Index cols = 240;
  int rank = 5;
  double gamma = 0.2;
  // Corruption: entries per column; 0 means no corruption. Setting2
  // defaults to 0, Setting1 to 5% of rows.
  std::optional<Index> per_column;
  double corruption_std = 1.0;
  double kappa = 1.0;  // leading singular value; the rest are 1
  std::vector<double> eta_grid = {0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.5};
  std::optional<double> p;            // observation rate; absent = full
  std::optional<double> sigma_noise;  // dense noise level; absent = none
  std::vector<std::uint64_t> seeds = {1};
  std::vector<SolverKind> solvers = {SolverKind::ManifoldProjective,
                                     SolverKind::ManifoldOrthographic,
                                     SolverKind::BaselineBM};
  int max_iters = 300;
  double rel_tol = 1e-6;
  bool scale_step_by_inv_p = true;
  std::string out_dir = "out";

  void validate() const;  // throws InvalidParameter
};

SyntheticProblem make_problem(const ExperimentSpec& spec, std::uint64_t seed);

// Runs the full grid (parallel across cells, capped by RPCA_THREADS) and
// writes the CSVs. Summary row order matches the (solver, eta, seed) nest
// regardless of scheduling.
void run_experiment(const ExperimentSpec& spec);

struct DecomposeOptions {
  std::string input;  // .rpcm or .csv matrix
  std::string mask_path;
  double mask_p = 0.0;  // 0 = estimate the rate from the mask density
  int rank = 1;
  double gamma = 0.1;
  double eta = 0.7;
  Retraction retraction = Retraction::Orthographic;
  int max_iters = 300;
  double rel_tol = 1e-6;
  bool scale_step_by_inv_p = true;
  std::string out_dir = "out";
};

// Single solve on a matrix from disk; writes L.rpcm, S.rpcm, trace.csv.
// Diverged runs surface as NumericalError (exit code 4 in the CLI).
void run_decompose(const DecomposeOptions& opt);

struct VideoOptions {
  std::string input;       // directory of .pgm frames, or a .rpcm matrix
  Index frame_rows = 0;    // required when input is a matrix
  int rank = 3;
  double gamma = 0.1;
  double eta = 0.7;
  std::optional<double> p;  // subsample observed pixels at this rate
  int max_iters = 100;
  std::uint64_t seed = 1;
  bool scale_step_by_inv_p = true;
  std::string out_dir = "out";
};

// Stacks frames into a pixels x frames matrix, runs the solver for the
// configured iteration budget, writes background_NNNN.pgm /
// foreground_NNNN.pgm (per-frame min-max scaled) and trace.csv.
void run_video(const VideoOptions& opt);

}  // namespace rpca
