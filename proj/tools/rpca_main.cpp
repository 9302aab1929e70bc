#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rpca/experiment.hpp"

namespace {

// Exit codes: 0 ok, 2 invalid parameters/input, 3 file errors, 4 numerical
// failure.
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

rpca::Retraction parse_retraction(const std::string& name) {
  if (name == "projective") return rpca::Retraction::Projective;
  if (name == "orthographic") return rpca::Retraction::Orthographic;
  throw rpca::InvalidParameter("unknown retraction: " + name);
}

struct CommonFlags {
  int rank = 5;
  double gamma = 0.2;
  double eta = 0.7;
  int max_iters = 300;
  double tol = 1e-6;
  std::string scale_by_inv_p = "on";
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--rank", flags.rank, "target rank r");
  cmd->add_option("--gamma", flags.gamma, "thresholded fraction in [0, 1]");
  cmd->add_option("--eta", flags.eta, "step size");
  cmd->add_option("--max-iters", flags.max_iters, "iteration budget");
  cmd->add_option("--tol", flags.tol, "relative stopping tolerance");
  cmd->add_option("--scale-step-by-inv-p", flags.scale_by_inv_p,
                  "scale step and init by 1/p under a mask")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--out", flags.out_dir, "output directory");
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Low-rank + sparse decomposition by gradient descent on the "
               "fixed-rank manifold"};
  app.require_subcommand(1);

  // --- experiment ---------------------------------------------------
  auto* exp_cmd = app.add_subcommand(
      "experiment", "step-size grid on synthetic problems, CSV traces");
  CommonFlags exp_flags;
  std::string scenario = "setting1";
  rpca::ExperimentSpec spec;
  std::vector<double> eta_grid;
  std::vector<std::uint64_t> seeds;
  std::string exp_solver, exp_retraction;
  double exp_p = 0.0, exp_noise = 0.0, exp_kappa = 10.0;
  long long exp_per_column = -1;
  add_common(exp_cmd, exp_flags);
  exp_cmd->add_option("--scenario", scenario, "setting1 | setting2 | custom")
      ->check(CLI::IsMember({"setting1", "setting2", "custom"}));
  exp_cmd->add_option("--n1", spec.rows, "problem rows");
  exp_cmd->add_option("--n2", spec.cols, "problem cols");
  exp_cmd->add_option("--eta-grid", eta_grid, "step sizes to sweep")
      ->delimiter(',');
  exp_cmd->add_option("--seed", seeds, "problem seeds (repeatable)")
      ->delimiter(',');
  exp_cmd->add_option("--solver", exp_solver, "manifold | bm (default: all)")
      ->check(CLI::IsMember({"manifold", "bm"}));
  exp_cmd->add_option("--retraction", exp_retraction,
                      "projective | orthographic (with --solver manifold)")
      ->check(CLI::IsMember({"projective", "orthographic"}));
  exp_cmd->add_option("--p", exp_p, "observation rate in (0, 1]");
  exp_cmd->add_option("--noise-std", exp_noise, "dense Gaussian noise std");
  exp_cmd->add_option("--per-column", exp_per_column,
                      "corrupted entries per column");
  exp_cmd->add_option("--kappa", exp_kappa,
                      "leading singular value (custom scenario)");

  // --- decompose -----------------------------------------------------
  auto* dec_cmd = app.add_subcommand(
      "decompose", "split one matrix file into low-rank and sparse parts");
  CommonFlags dec_flags;
  rpca::DecomposeOptions dec;
  std::string dec_retraction = "orthographic";
  dec_cmd->add_option("input", dec.input, "matrix file (.rpcm or .csv)")
      ->required();
  add_common(dec_cmd, dec_flags);
  dec_cmd->add_option("--retraction", dec_retraction,
                      "projective | orthographic")
      ->check(CLI::IsMember({"projective", "orthographic"}));
  dec_cmd->add_option("--mask", dec.mask_path, "observation mask file");
  dec_cmd->add_option("--p", dec.mask_p,
                      "mask sampling rate (default: observed density)");

  // --- video ----------------------------------------------------------
  auto* vid_cmd = app.add_subcommand(
      "video", "background/foreground separation of a frame sequence");
  CommonFlags vid_flags;
  vid_flags.rank = 3;
  vid_flags.gamma = 0.1;
  vid_flags.max_iters = 100;
  rpca::VideoOptions vid;
  double vid_p = 0.0;
  long long vid_frame_rows = 0;
  std::uint64_t vid_seed = 1;
  vid_cmd->add_option("input", vid.input, "directory of .pgm frames or .rpcm")
      ->required();
  add_common(vid_cmd, vid_flags);
  vid_cmd->add_option("--p", vid_p, "observe each pixel with this rate");
  vid_cmd->add_option("--seed", vid_seed, "mask sampling seed");
  vid_cmd->add_option("--frame-rows", vid_frame_rows,
                      "frame height when the input is a matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kExitUsage;
  }

  if (exp_cmd->parsed()) {
    switch (scenario[0]) {
      case 's':
        spec.scenario = scenario == "setting1" ? rpca::Scenario::Setting1
                                               : rpca::Scenario::Setting2;
        break;
      default:
        spec.scenario = rpca::Scenario::Custom;
    }
    spec.rank = exp_flags.rank;
    spec.gamma = exp_flags.gamma;
    spec.max_iters = exp_flags.max_iters;
    spec.rel_tol = exp_flags.tol;
    spec.scale_step_by_inv_p = exp_flags.scale_by_inv_p == "on";
    spec.out_dir = exp_flags.out_dir;
    spec.kappa = exp_kappa;
    if (!eta_grid.empty())
      spec.eta_grid = eta_grid;
    else if (exp_cmd->count("--eta"))
      spec.eta_grid = {exp_flags.eta};
    if (!seeds.empty()) spec.seeds = seeds;
    if (exp_per_column >= 0) spec.per_column = exp_per_column;
    if (exp_p > 0.0) spec.p = exp_p;
    if (exp_noise > 0.0) spec.sigma_noise = exp_noise;
    if (exp_solver == "bm") {
      spec.solvers = {rpca::SolverKind::BaselineBM};
    } else if (exp_solver == "manifold") {
      if (exp_retraction.empty())
        spec.solvers = {rpca::SolverKind::ManifoldProjective,
                        rpca::SolverKind::ManifoldOrthographic};
      else if (exp_retraction == "projective")
        spec.solvers = {rpca::SolverKind::ManifoldProjective};
      else
        spec.solvers = {rpca::SolverKind::ManifoldOrthographic};
    }
    rpca::run_experiment(spec);
    return 0;
  }

  if (dec_cmd->parsed()) {
    dec.rank = dec_flags.rank;
    dec.gamma = dec_flags.gamma;
    dec.eta = dec_flags.eta;
    dec.retraction = parse_retraction(dec_retraction);
    dec.max_iters = dec_flags.max_iters;
    dec.rel_tol = dec_flags.tol;
    dec.scale_step_by_inv_p = dec_flags.scale_by_inv_p == "on";
    dec.out_dir = dec_flags.out_dir;
    rpca::run_decompose(dec);
    return 0;
  }

  vid.rank = vid_flags.rank;
  vid.gamma = vid_flags.gamma;
  vid.eta = vid_flags.eta;
  vid.max_iters = vid_flags.max_iters;
  vid.scale_step_by_inv_p = vid_flags.scale_by_inv_p == "on";
  vid.out_dir = vid_flags.out_dir;
  vid.seed = vid_seed;
  vid.frame_rows = vid_frame_rows;
  if (vid_p > 0.0) vid.p = vid_p;
  rpca::run_video(vid);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const rpca::InvalidParameter& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const rpca::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const rpca::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const rpca::NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kExitNumerical;
  }
}
