#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rpca/baseline.hpp"
#include "rpca/bound_checks.hpp"
#include "rpca/experiment.hpp"
#include "rpca/probgen.hpp"
#include "rpca/solver.hpp"
#include "rpca/thresholding.hpp"

namespace py = pybind11;
using namespace rpca;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust PCA by gradient descent on the fixed-rank manifold";

  py::register_exception<InvalidParameter>(m, "InvalidParameterError",
                                           PyExc_ValueError);
  py::register_exception<InputError>(m, "InputDataError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  py::class_<ObservationMask>(m, "ObservationMask")
      .def(py::init<Index, Index, const std::vector<IndexPair>&, double>(),
           py::arg("rows"), py::arg("cols"), py::arg("observed"),
           py::arg("rate_p"))
      .def_property_readonly("rows", &ObservationMask::rows)
      .def_property_readonly("cols", &ObservationMask::cols)
      .def_property_readonly("rate_p", &ObservationMask::rate_p)
      .def_property_readonly("observed_count",
                             &ObservationMask::observed_count)
      .def("observed", &ObservationMask::observed)
      .def("pairs", &ObservationMask::pairs);

  py::class_<ThresholdedResidual>(m, "ThresholdedResidual")
      .def_readonly("values", &ThresholdedResidual::values)
      .def_readonly("zeroed", &ThresholdedResidual::zeroed)
      .def_readonly("gamma", &ThresholdedResidual::gamma);

  m.def(
      "hard_threshold",
      [](const Matrix& a, double gamma, const ObservationMask* mask) {
        return mask ? hard_threshold(a, gamma, *mask)
                    : hard_threshold(a, gamma);
      },
      py::arg("a"), py::arg("gamma"),
      py::arg("mask") = static_cast<const ObservationMask*>(nullptr));
  m.def("objective", &objective, py::arg("l"), py::arg("y"), py::arg("gamma"),
        py::arg("mask") = static_cast<const ObservationMask*>(nullptr));
  m.def("euclidean_gradient", &euclidean_gradient, py::arg("l"), py::arg("y"),
        py::arg("gamma"),
        py::arg("mask") = static_cast<const ObservationMask*>(nullptr));

  py::class_<FactoredLowRank>(m, "FactoredLowRank")
      .def(py::init([](Matrix u, Vector sigma, Matrix v) {
             FactoredLowRank out{std::move(u), std::move(sigma), std::move(v)};
             out.check_invariants();
             return out;
           }),
           py::arg("u"), py::arg("sigma"), py::arg("v"))
      .def_readonly("u", &FactoredLowRank::u)
      .def_readonly("sigma", &FactoredLowRank::sigma)
      .def_readonly("v", &FactoredLowRank::v)
      .def_property_readonly("rank", &FactoredLowRank::rank)
      .def("sigma_max", &FactoredLowRank::sigma_max)
      .def("sigma_min", &FactoredLowRank::sigma_min)
      .def("cond", &FactoredLowRank::cond)
      .def("frob_norm", &FactoredLowRank::frob_norm)
      .def("materialize", &FactoredLowRank::materialize);

  py::class_<TangentVector>(m, "TangentVector")
      .def_readonly("m", &TangentVector::m)
      .def_readonly("up", &TangentVector::up)
      .def_readonly("vp", &TangentVector::vp)
      .def("frob_norm", &TangentVector::frob_norm)
      .def("spectral_norm", &TangentVector::spectral_norm)
      .def("scaled", &TangentVector::scaled)
      .def("materialize", &TangentVector::materialize);

  m.def("truncated_svd", &truncated_svd, py::arg("a"), py::arg("r"));
  m.def("project_tangent",
        py::overload_cast<const FactoredLowRank&, const Matrix&>(
            &project_tangent),
        py::arg("base"), py::arg("d"));
  m.def("retract_projective", &retract_projective, py::arg("base"),
        py::arg("delta"));
  m.def("retract_orthographic", &retract_orthographic, py::arg("base"),
        py::arg("delta"));
  m.def("retract_orthographic_span", &retract_orthographic_span,
        py::arg("base"), py::arg("d"), py::arg("eta"), py::arg("q"),
        py::arg("rbasis"));

  py::enum_<Retraction>(m, "Retraction")
      .value("PROJECTIVE", Retraction::Projective)
      .value("ORTHOGRAPHIC", Retraction::Orthographic);
  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("CONVERGED", SolveStatus::Converged)
      .value("MAXITER", SolveStatus::MaxIters)
      .value("DIVERGED", SolveStatus::Diverged);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rank", &SolverConfig::rank)
      .def_readwrite("gamma", &SolverConfig::gamma)
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("retraction", &SolverConfig::retraction)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("rel_tol", &SolverConfig::rel_tol)
      .def_readwrite("scale_step_by_inv_p", &SolverConfig::scale_step_by_inv_p)
      .def_readwrite("bm_balance", &SolverConfig::bm_balance);

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("iter", &TraceRecord::iter)
      .def_readonly("objective", &TraceRecord::objective)
      .def_readonly("ref_error", &TraceRecord::ref_error)
      .def_readonly("elapsed_ms", &TraceRecord::elapsed_ms);
  py::class_<IterationTrace>(m, "IterationTrace")
      .def_readonly("records", &IterationTrace::records)
      .def_readonly("status", &IterationTrace::status)
      .def_readonly("note", &IterationTrace::note);

  m.def(
      "initialize",
      [](const Matrix& y, const SolverConfig& c, const ObservationMask* mask) {
        return initialize(y, c, mask);
      },
      py::arg("y"), py::arg("config"),
      py::arg("mask") = static_cast<const ObservationMask*>(nullptr));
  m.def(
      "step",
      [](const FactoredLowRank& l, const Matrix& y, const SolverConfig& c,
         const ObservationMask* mask) { return step(l, y, c, mask); },
      py::arg("l"), py::arg("y"), py::arg("config"),
      py::arg("mask") = static_cast<const ObservationMask*>(nullptr));
  m.def(
      "solve",
      [](const Matrix& y, const SolverConfig& c, const ObservationMask* mask,
         const std::optional<Matrix>& reference) {
        return solve(y, c, mask, reference ? &*reference : nullptr);
      },
      py::arg("y"), py::arg("config"),
      py::arg("mask") = static_cast<const ObservationMask*>(nullptr),
      py::arg("reference") = py::none());
  m.def(
      "sparse_estimate",
      [](const FactoredLowRank& l, const Matrix& y, double gamma,
         const ObservationMask* mask) {
        return sparse_estimate(l, y, gamma, mask);
      },
      py::arg("l"), py::arg("y"), py::arg("gamma"),
      py::arg("mask") = static_cast<const ObservationMask*>(nullptr));

  py::class_<FactorPair>(m, "FactorPair")
      .def_readonly("uf", &FactorPair::uf)
      .def_readonly("vf", &FactorPair::vf)
      .def_readonly("step_scale", &FactorPair::step_scale)
      .def("materialize", &FactorPair::materialize);
  m.def(
      "bm_solve",
      [](const Matrix& y, const SolverConfig& c, const ObservationMask* mask,
         const std::optional<Matrix>& reference) {
        return bm_solve(y, c, mask, reference ? &*reference : nullptr);
      },
      py::arg("y"), py::arg("config"),
      py::arg("mask") = static_cast<const ObservationMask*>(nullptr),
      py::arg("reference") = py::none());

  m.def("gen_low_rank", &gen_low_rank, py::arg("rows"), py::arg("cols"),
        py::arg("r"), py::arg("sigma_spec"), py::arg("seed"));
  m.def("corrupt", &corrupt, py::arg("l_star"), py::arg("gamma_star"),
        py::arg("per_column") = py::none(), py::arg("value_std") = 1.0,
        py::arg("seed") = 1, py::arg("additive") = false);
  m.def("sample_mask", &sample_mask, py::arg("rows"), py::arg("cols"),
        py::arg("p"), py::arg("seed"));
  m.def("add_noise", &add_noise, py::arg("y"), py::arg("sigma_noise"),
        py::arg("seed"));
  m.def("incoherence", &incoherence, py::arg("l"));
  m.def("frob_error",
        py::overload_cast<const FactoredLowRank&, const Matrix&>(&frob_error),
        py::arg("l"), py::arg("ref"));
  m.def("frob_error",
        py::overload_cast<const FactoredLowRank&, const FactoredLowRank&>(
            &frob_error),
        py::arg("l"), py::arg("ref"));
}
