#include "pdip/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pdip/linalg.hpp"

namespace pdip::diagnostics {
namespace {

using precision::PrecisionConfig;
using precision::Scope;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> active_part(std::span<const Real> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i].value());
  return out;
}

double project_norm(const Matrix& basis, const std::vector<double>& x) {
  // || basis^T x ||
  std::vector<double> y(basis.cols(), 0.0);
  for (std::size_t c = 0; c < basis.cols(); ++c)
    for (std::size_t r = 0; r < basis.rows(); ++r) y[c] += basis(r, c).value() * x[r];
  return norm(y);
}

std::vector<double> power_iterate(const Matrix& a, int iters, const auto& apply) {
  const std::size_t n = a.rows();
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int k = 0; k < iters; ++k) {
    std::vector<double> y = apply(x);
    const double ny = norm(y);
    if (ny == 0.0 || !std::isfinite(ny)) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
  }
  return x;
}

double rayleigh(const Matrix& a, const std::vector<double>& x) {
  double num = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) num += x[i] * a(i, j).value() * x[j];
  return num / (norm(x) * norm(x));
}

}  // namespace

double delta_estimate(const NlpProblem& problem, const Iterate& it) {
  Scope native(PrecisionConfig::native());
  const Vector rf = lagrangian_gradient(problem, it.z, it.lambda, problem.jac_g(it.z));
  const Vector g = problem.g(it.z);
  std::vector<double> stacked;
  for (Real v : rf) stacked.push_back(v.value());
  for (std::size_t i = 0; i < g.size(); ++i) stacked.push_back(std::min(it.lambda[i].value(), -g[i].value()));
  return norm(stacked);
}

double distance_to_segment(std::span<const double> lambda_b, const MultiplierSegment& seg) {
  const std::size_t k = lambda_b.size();
  if (seg.a.size() != k) throw std::invalid_argument("segment dimension does not match lambda_B");
  if (k > 16) throw std::invalid_argument("face enumeration limited to |B| <= 16");
  double best = std::numeric_limits<double>::infinity();
  // Each mask fixes the flagged coordinates at zero; project onto the
  // remaining affine set and keep feasible candidates.
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<double> x(lambda_b.begin(), lambda_b.end());
    double aa = 0.0;
    double ax = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) {
        x[i] = 0.0;
      } else {
        aa += seg.a[i] * seg.a[i];
        ax += seg.a[i] * x[i];
      }
    }
    if (aa == 0.0) {
      if (seg.b != 0.0) continue;
    } else {
      const double shift = (ax - seg.b) / aa;
      for (std::size_t i = 0; i < k; ++i)
        if (!(mask & (std::size_t{1} << i))) x[i] -= shift * seg.a[i];
    }
    if (std::any_of(x.begin(), x.end(), [](double v) { return v < 0.0; })) continue;
    double d2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) d2 += (x[i] - lambda_b[i]) * (x[i] - lambda_b[i]);
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

double delta_exact(const KnownSolution& known, const Iterate& it) {
  if (known.z_star.size() != it.z.size()) throw std::invalid_argument("known solution does not match the iterate");
  double sq = 0.0;
  for (std::size_t i = 0; i < it.z.size(); ++i) {
    const double d = it.z[i].value() - known.z_star[i];
    sq += d * d;
  }
  const double seg = distance_to_segment(active_part(it.lambda, known.active), known.multipliers);
  sq += seg * seg;
  for (std::size_t i : known.inactive) sq += it.lambda[i].value() * it.lambda[i].value();
  return std::sqrt(sq);
}

DistanceReport distance_report(const NlpProblem& problem, const KnownSolution& known, const Iterate& it) {
  DistanceReport r;
  r.delta_exact = delta_exact(known, it);
  r.delta_estimate = delta_estimate(problem, it);
  r.ratio = r.delta_exact > 0.0 ? r.delta_estimate / r.delta_exact : std::numeric_limits<double>::infinity();
  return r;
}

ProjectionReport project_multiplier_step(const stepgen::Step& step, const KnownSolution& known) {
  ProjectionReport r;
  const std::vector<double> dlb = active_part(step.dlambda, known.active);
  r.u_component = project_norm(known.svd.u, dlb);
  r.v_component = project_norm(known.svd.v, dlb);
  r.dlambda_b_norm = norm(dlb);
  r.dlambda_n_norm = norm(active_part(step.dlambda, known.inactive));
  r.dz_norm = norm2(step.dz);
  r.ds_norm = norm2(step.ds);
  return r;
}

double log10_rounded(double x) { return std::round(std::log10(x) * 10.0) / 10.0; }

ConditionEstimate condition_probe(const Matrix& a) {
  Scope native(PrecisionConfig::native());
  ConditionEstimate est;
  constexpr int kIters = 50;
  const auto forward = [&](const std::vector<double>& x) {
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j).value() * x[j];
    return y;
  };
  est.largest = std::fabs(rayleigh(a, power_iterate(a, kIters, forward)));

  auto chol = linalg::cholesky(a);
  if (const auto* f = std::get_if<linalg::CholeskyFactorization>(&chol)) {
    const auto inverse = [&](const std::vector<double>& x) {
      return to_doubles(linalg::solve_cholesky(*f, from_doubles(x)));
    };
    est.smallest = std::fabs(rayleigh(a, power_iterate(a, kIters, inverse)));
  }
  if (!(est.smallest > 0.0)) {
    // lambda_min <= min_i a_ii gives a lower bound on the condition number.
    double min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.rows(); ++i) min_diag = std::min(min_diag, std::fabs(a(i, i).value()));
    est.smallest = min_diag;
    est.lower_bound_only = true;
  }
  est.value = est.largest / est.smallest;
  return est;
}

ConditionEstimate condition_probe(const stepgen::AssembledSystem& sys) {
  if (sys.formulation != stepgen::Formulation::kCondensed) {
    throw std::invalid_argument("condition_probe expects a condensed system");
  }
  return condition_probe(sys.matrix);
}

}  // namespace pdip::diagnostics
