#include "pdip/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdip::driver {

void validate(const CentralityParams& p) {
  if (!(p.c > 0.0)) throw std::invalid_argument("centrality C must be positive");
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) throw std::invalid_argument("centrality gamma must lie in (0, 1)");
  if (!(p.tau >= 0.0 && p.tau <= 0.5)) throw std::invalid_argument("centrality tau must lie in [0, 1/2]");
}

Real max_step(const Iterate& it, const stepgen::Step& step) {
  Real alpha = Real::exact(1.0);
  for (std::size_t i = 0; i < it.lambda.size(); ++i) {
    if (step.dlambda[i] < 0.0) alpha = std::min(alpha, -(it.lambda[i] / step.dlambda[i]));
    if (step.ds[i] < 0.0) alpha = std::min(alpha, -(it.s[i] / step.ds[i]));
  }
  return alpha;
}

CentralityStatus check_centrality(const Residuals& res, const Iterate& it, const CentralityParams& p, bool relaxed) {
  CentralityStatus st;
  st.relaxed = relaxed;
  const double mu = res.mu.value();
  const double c = relaxed ? p.c * (1.0 + p.tau) : p.c;
  const double gamma = relaxed ? p.gamma * (1.0 - p.tau) : p.gamma;
  st.rf_ratio = norm2(res.r_f) / mu;
  st.rg_ratio = norm2(res.r_g) / mu;
  double min_product = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < it.lambda.size(); ++i)
    min_product = std::min(min_product, it.lambda[i].value() * it.s[i].value());
  st.min_product_ratio = min_product / mu;
  st.rf_ok = st.rf_ratio <= c;
  st.rg_ok = st.rg_ratio <= c;
  st.product_ok = strictly_interior(it) && st.min_product_ratio >= gamma;
  return st;
}

double StopCriteria::default_mu_min(int mantissa_bits) {
  return std::max(1e4 * std::ldexp(1.0, -mantissa_bits), 1e-17);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kMuBelowStop: return "mu-below-stop";
    case Termination::kMaxIters: return "max-iters";
    case Termination::kPrecisionFloor: return "precision-floor-reached";
    case Termination::kNonFinite: return "non-finite";
  }
  return "?";
}

PivotSummary summarize(const std::vector<linalg::PivotRecord>& log) {
  PivotSummary s;
  for (const auto& rec : log) {
    switch (rec.kind) {
      case linalg::PivotKind::kOneByOneSmall: ++s.one_by_one_small; break;
      case linalg::PivotKind::kOneByOneLarge: ++s.one_by_one_large; break;
      case linalg::PivotKind::kTwoByTwo:
        ++s.two_by_two;
        if (rec.magnitude == linalg::MagnitudeClass::kInverseMu) ++s.two_by_two_with_large_diagonal;
        break;
    }
  }
  return s;
}

Iterate circle_start() {
  Iterate it;
  it.z = {Real(1.0) / 30.0, Real(1.0) / 9.0};
  it.lambda = {Real(1.0), Real(1.0) / 5.0};
  it.s = {Real(1.0) / 10.0, Real(1.0) / 2.0};
  return it;
}

Iterate scalar_start(double eps) { return Iterate{{Real(eps)}, {Real(eps)}, {Real(eps)}}; }

Iterate default_start(std::string_view problem_key) {
  if (problem_key == "scalar-quadratic") return scalar_start(1e-2);
  return circle_start();
}

namespace {

Iterate round_iterate(const Iterate& it) {
  auto fit = [](const Vector& v) {
    Vector out;
    out.reserve(v.size());
    for (Real x : v) out.emplace_back(x.value());
    return out;
  };
  return Iterate{fit(it.z), fit(it.lambda), fit(it.s)};
}

bool all_finite(const Iterate& it) {
  auto finite = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](Real x) { return isfinite(x); }); };
  return finite(it.z) && finite(it.lambda) && finite(it.s);
}

}  // namespace

IterationTrace run(const NlpProblem& problem, const KnownSolution* known, const Iterate& start,
                   const stepgen::StepConfig& cfg, const CentralityParams& centrality,
                   const precision::PrecisionConfig& pcfg, const StopCriteria& stop) {
  stepgen::validate(cfg);
  validate(centrality);
  if (!(stop.step_fraction >= 0.0 && stop.step_fraction < 1.0)) {
    throw std::invalid_argument("step fraction must lie in [0, 1)");
  }
  if (stop.max_iters < 0) throw std::invalid_argument("max iterations must be nonnegative");
  if (!strictly_interior(start)) throw std::invalid_argument("start is not strictly interior");

  precision::Scope scope(pcfg);
  IterationTrace trace;
  trace.problem = problem.key();
  trace.step_config = cfg;
  trace.precision = pcfg;
  trace.stop = stop;
  trace.centrality = centrality;

  Iterate it = round_iterate(start);
  const Real fraction(stop.step_fraction);
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.index = k;
    rec.iterate = it;
    rec.residuals = eval_residuals(problem, it);
    rec.centrality = check_centrality(rec.residuals, it, centrality, false);
    rec.relaxed_centrality = check_centrality(rec.residuals, it, centrality, true);

    if (rec.residuals.mu.value() <= stop.mu_min) {
      trace.termination = Termination::kMuBelowStop;
      trace.records.push_back(std::move(rec));
      break;
    }
    if (k >= stop.max_iters) {
      trace.termination = Termination::kMaxIters;
      trace.records.push_back(std::move(rec));
      break;
    }

    stepgen::StepResult result;
    try {
      result = stepgen::compute_step(problem, it, cfg, pcfg, known);
    } catch (const stepgen::StepFailure& e) {
      trace.termination = e.kind() == stepgen::StepFailure::Kind::kNonFinite ? Termination::kNonFinite
                                                                              : Termination::kPrecisionFloor;
      trace.message = "iteration " + std::to_string(k) + ": " + e.what();
      trace.records.push_back(std::move(rec));
      break;
    }

    const Real alpha_max = max_step(it, result.step);
    const Real alpha = fraction * alpha_max;
    rec.alpha_max = alpha_max.value();
    rec.alpha_taken = alpha.value();
    if (known != nullptr) rec.projection = diagnostics::project_multiplier_step(result.step, *known);
    rec.pivots = summarize(result.pivots);
    rec.pivot_log = std::move(result.pivots);

    Iterate next = it;
    for (std::size_t i = 0; i < next.z.size(); ++i) next.z[i] = it.z[i] + alpha * result.step.dz[i];
    for (std::size_t i = 0; i < next.lambda.size(); ++i) {
      next.lambda[i] = it.lambda[i] + alpha * result.step.dlambda[i];
      next.s[i] = it.s[i] + alpha * result.step.ds[i];
    }
    rec.step = std::move(result.step);
    trace.records.push_back(std::move(rec));

    if (!all_finite(next) || !strictly_interior(next)) {
      trace.termination = Termination::kNonFinite;
      trace.message = "iteration " + std::to_string(k) + ": update left the strict interior";
      break;
    }
    it = std::move(next);
  }
  return trace;
}

}  // namespace pdip::driver
