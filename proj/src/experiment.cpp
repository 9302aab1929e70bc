#include "rpca/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "rpca/baseline.hpp"
#include "rpca/matrix_io.hpp"

namespace fs = std::filesystem;

namespace rpca {

namespace {

std::string format_eta(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eta);
  return buf;
}

unsigned worker_count(std::size_t cells) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("RPCA_THREADS")) {
    char* end = nullptr;
    long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed >= 1) hw = static_cast<unsigned>(parsed);
  }
  return static_cast<unsigned>(
      std::min<std::size_t>(hw, std::max<std::size_t>(1, cells)));
}

struct Cell {
  SolverKind kind;
  double eta;
  std::uint64_t seed;
  std::size_t problem_index;
};

struct CellResult {
  IterationTrace trace;
  double wall_ms = 0.0;
  double final_rel_error = std::numeric_limits<double>::quiet_NaN();
  std::optional<int> iters_to_tol;
  bool init_failed = false;
};

SolverConfig cell_config(const ExperimentSpec& spec, const Cell& cell) {
  SolverConfig config;
  config.rank = spec.rank;
  config.gamma = spec.gamma;
  config.eta = cell.eta;
  config.retraction = cell.kind == SolverKind::ManifoldProjective
                          ? Retraction::Projective
                          : Retraction::Orthographic;
  config.max_iters = spec.max_iters;
  config.rel_tol = spec.rel_tol;
  config.scale_step_by_inv_p = spec.scale_step_by_inv_p;
  return config;
}

CellResult run_cell(const ExperimentSpec& spec, const Cell& cell,
                    const SyntheticProblem& problem, const Matrix& reference) {
  CellResult result;
  const ObservationMask* mask =
      problem.mask ? &problem.mask.value() : nullptr;
  SolverConfig config = cell_config(spec, cell);
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (cell.kind == SolverKind::BaselineBM) {
      result.trace = bm_solve(problem.y, config, mask, &reference).second;
    } else {
      result.trace = solve(problem.y, config, mask, &reference).second;
    }
  } catch (const NumericalError& e) {
    result.init_failed = true;
    result.trace.status = SolveStatus::Diverged;
    result.trace.note = e.what();
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  const double ref_norm = reference.norm();
  if (!result.trace.records.empty()) {
    result.final_rel_error =
        result.trace.records.back().ref_error.value_or(
            std::numeric_limits<double>::quiet_NaN()) /
        ref_norm;
    for (const auto& rec : result.trace.records) {
      if (rec.ref_error && *rec.ref_error <= spec.rel_tol * ref_norm) {
        result.iters_to_tol = rec.iter;
        break;
      }
    }
  }
  return result;
}

}  // namespace

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::ManifoldProjective: return "manifold_projective";
    case SolverKind::ManifoldOrthographic: return "manifold_orthographic";
    case SolverKind::BaselineBM: return "bm";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (rows < 1 || cols < 1)
    throw InvalidParameter("dimensions must be positive");
  if (rank < 1 || rank > std::min(rows, cols))
    throw InvalidParameter("rank must be in [1, min(rows, cols)]");
  if (!(gamma >= 0.0) || gamma > 1.0)
    throw InvalidParameter("gamma must be in [0, 1]");
  if (eta_grid.empty()) throw InvalidParameter("eta grid is empty");
  for (double eta : eta_grid)
    if (!(eta > 0.0) || !std::isfinite(eta))
      throw InvalidParameter("eta grid values must be positive and finite");
  if (seeds.empty()) throw InvalidParameter("no seeds given");
  if (solvers.empty()) throw InvalidParameter("no solvers selected");
  if (per_column && (*per_column < 0 || *per_column > rows))
    throw InvalidParameter("per-column corruption count out of range");
  if (!(corruption_std >= 0.0))
    throw InvalidParameter("corruption std must be non-negative");
  if (!(kappa >= 1.0))
    throw InvalidParameter("condition number must be at least 1");
  if (p && (!(*p > 0.0) || *p > 1.0))
    throw InvalidParameter("observation rate must be in (0, 1]");
  if (sigma_noise && !(*sigma_noise >= 0.0))
    throw InvalidParameter("noise std must be non-negative");
  if (max_iters < 0) throw InvalidParameter("max_iters must be non-negative");
  if (!(rel_tol >= 0.0)) throw InvalidParameter("rel_tol must be non-negative");
  if (out_dir.empty()) throw InvalidParameter("output directory is empty");
}

SyntheticProblem make_problem(const ExperimentSpec& spec, std::uint64_t seed) {
  spec.validate();
  Vector sigma_spec = Vector::Ones(spec.rank);
  if (spec.scenario == Scenario::Setting2)
    sigma_spec(0) = 10.0;
  else if (spec.scenario == Scenario::Custom)
    sigma_spec(0) = spec.kappa;

  Index per_column = 0;
  if (spec.per_column) {
    per_column = *spec.per_column;
  } else if (spec.scenario == Scenario::Setting1) {
    per_column = static_cast<Index>(
        std::llround(0.05 * static_cast<double>(spec.rows)));
  }

  SyntheticProblem problem;
  problem.l_star =
      gen_low_rank(spec.rows, spec.cols, spec.rank, sigma_spec, seed);
  double gamma_star =
      static_cast<double>(per_column) / static_cast<double>(spec.rows);
  auto [s, y] = corrupt(problem.l_star, gamma_star, per_column,
                        spec.corruption_std, seed);
  problem.s_star = std::move(s);
  problem.y = std::move(y);
  if (spec.sigma_noise && *spec.sigma_noise > 0.0)
    problem.y = add_noise(problem.y, *spec.sigma_noise, seed);
  if (spec.p && *spec.p < 1.0)
    problem.mask = sample_mask(spec.rows, spec.cols, *spec.p, seed);

  problem.meta.rank = spec.rank;
  problem.meta.mu = incoherence(problem.l_star);
  problem.meta.kappa = sigma_spec(0) / sigma_spec(spec.rank - 1);
  problem.meta.gamma_star = gamma_star;
  problem.meta.sigma_noise = spec.sigma_noise.value_or(0.0);
  return problem;
}

void run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  fs::create_directories(spec.out_dir);

  // One problem per seed, shared across all (solver, eta) cells.
  std::vector<SyntheticProblem> problems;
  std::vector<Matrix> references;
  problems.reserve(spec.seeds.size());
  for (std::uint64_t seed : spec.seeds) {
    problems.push_back(make_problem(spec, seed));
    references.push_back(problems.back().l_star.materialize());
  }

  std::vector<Cell> cells;
  for (SolverKind kind : spec.solvers)
    for (double eta : spec.eta_grid)
      for (std::size_t si = 0; si < spec.seeds.size(); ++si)
        cells.push_back(Cell{kind, eta, spec.seeds[si], si});

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t at = next.fetch_add(1);
      if (at >= cells.size()) return;
      const Cell& cell = cells[at];
      results[at] = run_cell(spec, cell, problems[cell.problem_index],
                             references[cell.problem_index]);
    }
  };
  unsigned n_workers = worker_count(cells.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Per-cell traces plus one summary, written in cell order so the output
  // is independent of scheduling.
  std::ofstream summary(fs::path(spec.out_dir) / "summary.csv");
  if (!summary) throw IoError("cannot open summary.csv for writing");
  summary << "solver,eta,seed,final_rel_error,iters_to_tol,wall_ms\n";
  summary << std::setprecision(17);
  for (std::size_t at = 0; at < cells.size(); ++at) {
    const Cell& cell = cells[at];
    const CellResult& result = results[at];
    std::string name = std::string(to_string(cell.kind)) + "_eta" +
                       format_eta(cell.eta) + "_seed" +
                       std::to_string(cell.seed) + ".csv";
    write_trace_csv((fs::path(spec.out_dir) / name).string(), result.trace);
    summary << to_string(cell.kind) << ',' << format_eta(cell.eta) << ','
            << cell.seed << ',';
    if (std::isfinite(result.final_rel_error))
      summary << result.final_rel_error;
    summary << ',';
    if (result.trace.status == SolveStatus::Converged && result.iters_to_tol)
      summary << *result.iters_to_tol;
    else
      summary << to_string(result.trace.status);
    summary << ',' << result.wall_ms << '\n';
  }
  if (!summary) throw IoError("write failed: summary.csv");
}

void run_decompose(const DecomposeOptions& opt) {
  fs::path input(opt.input);
  Matrix y = input.extension() == ".csv" ? read_csv_matrix(opt.input)
                                         : read_matrix(opt.input);

  std::optional<ObservationMask> mask;
  if (!opt.mask_path.empty()) {
    // Rate defaults to the observed density when the caller gives none.
    ObservationMask probe = read_mask(opt.mask_path, 1.0);
    double rate = opt.mask_p > 0.0 && opt.mask_p <= 1.0
                      ? opt.mask_p
                      : static_cast<double>(probe.observed_count()) /
                            (static_cast<double>(probe.rows()) *
                             static_cast<double>(probe.cols()));
    mask = read_mask(opt.mask_path, rate);
  }

  SolverConfig config;
  config.rank = opt.rank;
  config.gamma = opt.gamma;
  config.eta = opt.eta;
  config.retraction = opt.retraction;
  config.max_iters = opt.max_iters;
  config.rel_tol = opt.rel_tol;
  config.scale_step_by_inv_p = opt.scale_step_by_inv_p;

  auto [l, trace] = solve(y, config, mask ? &mask.value() : nullptr);
  if (trace.status == SolveStatus::Diverged)
    throw NumericalError("solve diverged: " + trace.note);

  fs::create_directories(opt.out_dir);
  write_matrix((fs::path(opt.out_dir) / "L.rpcm").string(), l.materialize());
  write_matrix((fs::path(opt.out_dir) / "S.rpcm").string(),
               sparse_estimate(l, y, opt.gamma, mask ? &mask.value() : nullptr));
  write_trace_csv((fs::path(opt.out_dir) / "trace.csv").string(), trace);
  std::printf("status=%s iters=%d final_objective=%.6e out=%s\n",
              to_string(trace.status),
              static_cast<int>(trace.records.size()) - 1,
              trace.records.back().objective, opt.out_dir.c_str());
}

void run_video(const VideoOptions& opt) {
  Matrix y;
  Index frame_rows = 0, frame_cols = 0;
  fs::path input(opt.input);

  if (fs::is_directory(input)) {
    std::vector<fs::path> frame_paths;
    for (const auto& entry : fs::directory_iterator(input))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm")
        frame_paths.push_back(entry.path());
    std::sort(frame_paths.begin(), frame_paths.end());
    if (frame_paths.empty())
      throw InputError("no .pgm frames in " + opt.input);
    for (std::size_t f = 0; f < frame_paths.size(); ++f) {
      PgmImage img = read_pgm(frame_paths[f].string());
      if (f == 0) {
        frame_rows = img.rows;
        frame_cols = img.cols;
        y.resize(frame_rows * frame_cols,
                 static_cast<Index>(frame_paths.size()));
      } else if (img.rows != frame_rows || img.cols != frame_cols) {
        throw InputError("inconsistent frame sizes in " + opt.input);
      }
      for (Index px = 0; px < frame_rows * frame_cols; ++px)
        y(px, static_cast<Index>(f)) =
            static_cast<double>(img.pixels[static_cast<std::size_t>(px)]);
    }
  } else {
    y = read_matrix(opt.input);
    if (opt.frame_rows <= 0)
      throw InputError(
          "matrix input needs --frame-rows to reshape columns into frames");
    if (y.rows() % opt.frame_rows != 0)
      throw InputError("pixel count is not divisible by --frame-rows");
    frame_rows = opt.frame_rows;
    frame_cols = y.rows() / opt.frame_rows;
  }

  std::optional<ObservationMask> mask;
  if (opt.p && *opt.p < 1.0)
    mask = sample_mask(y.rows(), y.cols(), *opt.p, opt.seed);

  SolverConfig config;
  config.rank = opt.rank;
  config.gamma = opt.gamma;
  config.eta = opt.eta;
  config.retraction = Retraction::Orthographic;
  config.max_iters = opt.max_iters;
  config.rel_tol = 0.0;  // run out the full iteration budget
  config.scale_step_by_inv_p = opt.scale_step_by_inv_p;

  auto [l, trace] = solve(y, config, mask ? &mask.value() : nullptr);
  if (trace.status == SolveStatus::Diverged)
    throw NumericalError("solve diverged: " + trace.note);

  fs::create_directories(opt.out_dir);
  Matrix background = l.materialize();
  Matrix foreground =
      sparse_estimate(l, y, opt.gamma, mask ? &mask.value() : nullptr);
  char name[64];
  for (Index f = 0; f < y.cols(); ++f) {
    Matrix frame(frame_rows, frame_cols);
    for (Index i = 0; i < frame_rows; ++i)
      for (Index j = 0; j < frame_cols; ++j)
        frame(i, j) = background(i * frame_cols + j, f);
    std::snprintf(name, sizeof(name), "background_%04lld.pgm",
                  static_cast<long long>(f));
    write_pgm((fs::path(opt.out_dir) / name).string(), frame_to_pgm(frame));
    for (Index i = 0; i < frame_rows; ++i)
      for (Index j = 0; j < frame_cols; ++j)
        frame(i, j) = foreground(i * frame_cols + j, f);
    std::snprintf(name, sizeof(name), "foreground_%04lld.pgm",
                  static_cast<long long>(f));
    write_pgm((fs::path(opt.out_dir) / name).string(), frame_to_pgm(frame));
  }
  write_trace_csv((fs::path(opt.out_dir) / "trace.csv").string(), trace);
  std::printf("frames=%lld pixels=%lld status=%s final_objective=%.6e out=%s\n",
              static_cast<long long>(y.cols()),
              static_cast<long long>(y.rows()), to_string(trace.status),
              trace.records.back().objective, opt.out_dir.c_str());
}

}  // namespace rpca
