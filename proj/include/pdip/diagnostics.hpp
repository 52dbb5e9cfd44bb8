#pragma once

#include <optional>

#include "pdip/problems.hpp"
#include "pdip/stepgen.hpp"

// Measurements of iterates and steps against a known solution. Everything
// here runs in native double regardless of the precision used by the solve.
namespace pdip::diagnostics {

struct DistanceReport {
  double delta_exact = 0.0;
  double delta_estimate = 0.0;
  double ratio = 0.0;  // estimate / exact; infinity when exact is 0
};

// || ( L_z(z, lambda), min(lambda, -g(z)) ) ||_2.
double delta_estimate(const NlpProblem& problem, const Iterate& it);

// Distance from lambda_B to { x >= 0 : a^T x = b } by exhaustive search over
// the faces of the orthant. Returns infinity when the set is empty.
double distance_to_segment(std::span<const double> lambda_b, const MultiplierSegment& seg);

// Euclidean distance from (z, lambda) to {z*} x S_lambda.
double delta_exact(const KnownSolution& known, const Iterate& it);

DistanceReport distance_report(const NlpProblem& problem, const KnownSolution& known, const Iterate& it);

struct ProjectionReport {
  double u_component = 0.0;  // ||U^T dlambda_B||
  double v_component = 0.0;  // ||V^T dlambda_B||
  double dz_norm = 0.0;
  double ds_norm = 0.0;
  double dlambda_n_norm = 0.0;
  double dlambda_b_norm = 0.0;
};

ProjectionReport project_multiplier_step(const stepgen::Step& step, const KnownSolution& known);

// log10(x) rounded to one decimal, as tabulated.
double log10_rounded(double x);

struct ConditionEstimate {
  double value = 0.0;
  double largest = 0.0;
  double smallest = 0.0;
  bool lower_bound_only = false;
};

// sigma_max / sigma_min of a symmetric positive definite matrix from 50
// power and 50 inverse-power iterations.
ConditionEstimate condition_probe(const Matrix& a);
// Throws std::invalid_argument unless `sys` is a condensed system.
ConditionEstimate condition_probe(const stepgen::AssembledSystem& sys);

}  // namespace pdip::diagnostics
