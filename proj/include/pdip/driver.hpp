#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdip/diagnostics.hpp"
#include "pdip/precision.hpp"
#include "pdip/problems.hpp"
#include "pdip/stepgen.hpp"

namespace pdip::driver {

// ||r_f|| <= C mu,  ||r_g|| <= C mu,  lambda_i s_i >= gamma mu.
// The relaxed check uses C (1 + tau) and gamma (1 - tau).
struct CentralityParams {
  double c = 10.0;
  double gamma = 0.1;
  double tau = 0.25;
};

void validate(const CentralityParams& p);

struct CentralityStatus {
  double rf_ratio = 0.0;           // ||r_f|| / mu
  double rg_ratio = 0.0;           // ||r_g|| / mu
  double min_product_ratio = 0.0;  // min_i lambda_i s_i / mu
  bool rf_ok = false;
  bool rg_ok = false;
  bool product_ok = false;
  bool relaxed = false;

  bool satisfied() const { return rf_ok && rg_ok && product_ok; }
};

// Largest alpha in (0, 1] keeping lambda + alpha dlambda and s + alpha ds
// nonnegative.
Real max_step(const Iterate& it, const stepgen::Step& step);

CentralityStatus check_centrality(const Residuals& res, const Iterate& it, const CentralityParams& p, bool relaxed);

struct StopCriteria {
  double mu_min = 0.0;
  int max_iters = 12;
  double step_fraction = 0.99;

  // max(1e4 u, 1e-17) for a given significand width.
  static double default_mu_min(int mantissa_bits);
};

enum class Termination { kMuBelowStop, kMaxIters, kPrecisionFloor, kNonFinite };
std::string_view to_string(Termination t);

struct PivotSummary {
  int one_by_one_small = 0;
  int one_by_one_large = 0;
  int two_by_two = 0;
  int two_by_two_with_large_diagonal = 0;
};

PivotSummary summarize(const std::vector<linalg::PivotRecord>& log);

struct IterationRecord {
  int index = 0;
  Iterate iterate;
  Residuals residuals;
  CentralityStatus centrality;
  CentralityStatus relaxed_centrality;
  // Absent on the terminal record.
  std::optional<stepgen::Step> step;
  double alpha_max = 0.0;
  double alpha_taken = 0.0;
  std::optional<diagnostics::ProjectionReport> projection;
  std::vector<linalg::PivotRecord> pivot_log;
  PivotSummary pivots;
};

struct IterationTrace {
  std::string problem;
  stepgen::StepConfig step_config;
  precision::PrecisionConfig precision;
  StopCriteria stop;
  CentralityParams centrality;
  std::vector<IterationRecord> records;
  Termination termination = Termination::kMaxIters;
  std::string message;

  bool failed() const {
    return termination == Termination::kPrecisionFloor || termination == Termination::kNonFinite;
  }
};

// z0 = (1/30, 1/9), lambda0 = (1, 1/5), s0 = (1/10, 1/2), evaluated at the
// active precision.
Iterate circle_start();
// (eps, eps, eps) for the scalar quadratic.
Iterate scalar_start(double eps);
// Default start for a built-in problem key.
Iterate default_start(std::string_view problem_key);

// Local-phase iteration: x_{k+1} = x_k + step_fraction * alpha_max * step_k.
// Stops when mu <= mu_min, after max_iters steps, or when the step cannot be
// computed; the final iterate is always recorded (without a step).
IterationTrace run(const NlpProblem& problem, const KnownSolution* known, const Iterate& start,
                   const stepgen::StepConfig& cfg, const CentralityParams& centrality,
                   const precision::PrecisionConfig& pcfg, const StopCriteria& stop);

}  // namespace pdip::driver
