#include "rpca/bound_checks.hpp"

#include <cmath>
#include <limits>

namespace rpca {

namespace {

BoundCheck make_check(std::string name, double lhs, double rhs) {
  return BoundCheck{std::move(name), lhs, rhs, lhs <= rhs};
}

}  // namespace

BoundCheckReport check_tangent_capture(const FactoredLowRank& l,
                                       const FactoredLowRank& l_star) {
  if (l.rows() != l_star.rows() || l.cols() != l_star.cols() ||
      l.rank() != l_star.rank())
    throw InputError("points live on different manifolds");
  BoundCheckReport report;
  Matrix diff = l.materialize() - l_star.materialize();
  const double dn = diff.norm();
  report.a = dn / l_star.sigma_min();
  if (report.a > 1.0) {
    report.skipped = true;
    report.reason = "distance exceeds sigma_min of the reference";
    return report;
  }
  double lhs_at_l =
      (diff - project_tangent(l, diff).materialize(l)).norm();
  double lhs_at_star =
      (diff - project_tangent(l_star, diff).materialize(l_star)).norm();
  double rhs_at_l = report.a < 1.0
                        ? report.a / (2.0 * (1.0 - report.a)) * dn
                        : std::numeric_limits<double>::infinity();
  report.checks.push_back(
      make_check("tangent capture at the iterate", lhs_at_l, rhs_at_l));
  report.checks.push_back(make_check("tangent capture at the reference",
                                     lhs_at_star, report.a / 2.0 * dn));
  return report;
}

BoundCheckReport check_retraction_proximity(const FactoredLowRank& base,
                                            const TangentVector& delta) {
  if (delta.m.rows() != base.rank() || delta.up.rows() != base.rows() ||
      delta.vp.rows() != base.cols())
    throw InputError("tangent vector does not match the base point");
  BoundCheckReport report;
  const double spec = delta.spectral_norm();
  const double smin = base.sigma_min();
  report.a = spec / smin;
  if (spec >= smin) {
    report.skipped = true;
    report.reason = "step spectral norm reaches sigma_min of the base";
    return report;
  }
  const double fro = delta.frob_norm();
  const double rhs = fro * fro / (2.0 * (smin - spec));
  Matrix sum = base.materialize() + delta.materialize(base);
  auto defect = [&](const FactoredLowRank& r) {
    return (r.materialize() - sum).norm();
  };
  try {
    report.checks.push_back(make_check(
        "projective landing distance", defect(retract_projective(base, delta)),
        rhs));
  } catch (const NumericalError&) {
    report.checks.push_back(
        BoundCheck{"projective landing distance",
                   std::numeric_limits<double>::infinity(), rhs, false});
  }
  try {
    report.checks.push_back(
        make_check("orthographic landing distance",
                   defect(retract_orthographic(base, delta)), rhs));
  } catch (const NumericalError&) {
    report.checks.push_back(
        BoundCheck{"orthographic landing distance",
                   std::numeric_limits<double>::infinity(), rhs, false});
  }
  return report;
}

}  // namespace rpca
