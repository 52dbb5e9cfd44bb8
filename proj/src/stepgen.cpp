#include "pdip/stepgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pdip::stepgen {
namespace {

struct Solved {
  Vector x;
  std::vector<linalg::PivotRecord> pivots;
};

std::string format_mu(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", mu);
  return buf;
}

Solved solve_with(Solver solver, const Matrix& a, const Vector& b, Real mu) {
  const linalg::PivotContext ctx{mu.value()};
  try {
    switch (solver) {
      case Solver::kCholesky: {
        auto outcome = linalg::cholesky(a);
        if (const auto* fail = std::get_if<linalg::CompletionFailure>(&outcome)) {
          throw StepFailure(StepFailure::Kind::kCompletionFailure,
                            "Cholesky pivot " + std::to_string(fail->pivot) + " not positive (mu = " +
                                format_mu(mu.value()) + ")");
        }
        return {linalg::solve_cholesky(std::get<linalg::CholeskyFactorization>(outcome), b), {}};
      }
      case Solver::kBunchKaufman: {
        auto f = linalg::bunch_kaufman(a, ctx);
        Vector x = linalg::solve_ldlt(f, b);
        return {std::move(x), std::move(f.pivot_log)};
      }
      case Solver::kBunchParlett: {
        auto f = linalg::bunch_parlett(a, ctx);
        Vector x = linalg::solve_ldlt(f, b);
        return {std::move(x), std::move(f.pivot_log)};
      }
      case Solver::kGepp:
        return {linalg::gepp_solve(a, b).x, {}};
    }
  } catch (const linalg::SingularPivot& e) {
    throw StepFailure(StepFailure::Kind::kSingularPivot, e.what());
  } catch (const linalg::SingularMatrix& e) {
    throw StepFailure(StepFailure::Kind::kSingularMatrix, e.what());
  }
  return {};
}

void require_finite(const Step& step) {
  auto finite = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](Real x) { return isfinite(x); }); };
  if (!finite(step.dz) || !finite(step.dlambda) || !finite(step.ds)) {
    throw StepFailure(StepFailure::Kind::kNonFinite, "computed step has non-finite entries");
  }
}

// ds = -(g + s) - grad g^T dz
Vector recover_ds(const AssembledSystem& sys, const Iterate& it, const Vector& dz) {
  const Vector jdz = multiply_transposed(sys.jac, dz);
  Vector ds(it.s.size());
  for (std::size_t i = 0; i < ds.size(); ++i) ds[i] = -(sys.g[i] + it.s[i]) - jdz[i];
  return ds;
}

}  // namespace

TRule TRule::centering(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::invalid_argument("centering sigma must lie in [0, 1]");
  return TRule{Kind::kCentering, sigma};
}

Solver default_solver(Formulation f) {
  switch (f) {
    case Formulation::kCondensed: return Solver::kCholesky;
    case Formulation::kAugmented: return Solver::kBunchKaufman;
    case Formulation::kFull: return Solver::kGepp;
  }
  return Solver::kGepp;
}

Solver StepConfig::effective_solver() const { return solver.value_or(default_solver(formulation)); }

void validate(const StepConfig& cfg) {
  const Solver s = cfg.effective_solver();
  if (cfg.formulation == Formulation::kAugmented && s == Solver::kCholesky) {
    throw std::invalid_argument("the augmented matrix is indefinite; cholesky cannot factor it");
  }
  if (cfg.formulation == Formulation::kFull && s != Solver::kGepp) {
    throw std::invalid_argument("the full step matrix is unsymmetric; only gepp applies");
  }
  if (cfg.t_rule.kind == TRule::Kind::kCentering && !(cfg.t_rule.sigma >= 0.0 && cfg.t_rule.sigma <= 1.0)) {
    throw std::invalid_argument("centering sigma must lie in [0, 1]");
  }
}

std::string_view to_string(Formulation f) {
  switch (f) {
    case Formulation::kFull: return "full";
    case Formulation::kAugmented: return "augmented";
    case Formulation::kCondensed: return "condensed";
  }
  return "?";
}

std::string_view to_string(Solver s) {
  switch (s) {
    case Solver::kCholesky: return "cholesky";
    case Solver::kBunchKaufman: return "bunch-kaufman";
    case Solver::kBunchParlett: return "bunch-parlett";
    case Solver::kGepp: return "gepp";
  }
  return "?";
}

Formulation parse_formulation(std::string_view s) {
  for (Formulation f : {Formulation::kFull, Formulation::kAugmented, Formulation::kCondensed})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown formulation '" + std::string(s) + "'");
}

Solver parse_solver(std::string_view s) {
  for (Solver v : {Solver::kCholesky, Solver::kBunchKaufman, Solver::kBunchParlett, Solver::kGepp})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

AssembledSystem assemble(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                         const precision::PrecisionConfig& pcfg, const KnownSolution* known) {
  precision::Scope scope(pcfg);
  validate(cfg);
  if (!strictly_interior(it)) throw std::invalid_argument("iterate is not strictly interior (lambda, s > 0)");

  const std::size_t n = problem.n();
  const std::size_t m = problem.m();
  AssembledSystem sys;
  sys.formulation = cfg.formulation;
  if (known != nullptr) {
    sys.active = known->active;
    sys.inactive = known->inactive;
  }

  sys.jac = problem.jac_g(it.z);
  sys.g = problem.g(it.z);
  sys.r_f = lagrangian_gradient(problem, it.z, it.lambda, sys.jac);
  sys.mu = duality_measure(it.lambda, it.s);

  sys.t.resize(m);
  const Real ti = cfg.t_rule.kind == TRule::Kind::kMuSquared ? sys.mu * sys.mu : Real(cfg.t_rule.sigma) * sys.mu;
  std::fill(sys.t.begin(), sys.t.end(), ti);

  sys.d.resize(m);
  sys.d_inv.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    sys.d[i] = it.s[i] / it.lambda[i];
    sys.d_inv[i] = it.lambda[i] / it.s[i];
  }

  const Matrix hess = lagrangian_hessian(problem, it.z, it.lambda);

  switch (cfg.formulation) {
    case Formulation::kCondensed: {
      Matrix h = hess;
      for (std::size_t i = 0; i < m; ++i) {
        const Real di = sys.d_inv[i];
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c <= r; ++c) h(r, c) += sys.jac(r, i) * di * sys.jac(c, i);
      }
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) h(r, c) = h(c, r);
      Vector v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = sys.d_inv[i] * (sys.g[i] - sys.t[i] / it.lambda[i]);
      const Vector jv = multiply(sys.jac, v);
      sys.rhs.resize(n);
      for (std::size_t j = 0; j < n; ++j) sys.rhs[j] = -sys.r_f[j] - jv[j];
      sys.matrix = std::move(h);
      break;
    }
    case Formulation::kAugmented: {
      Matrix a(n + m, n + m);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a(r, c) = hess(r, c);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
          a(r, n + i) = sys.jac(r, i);
          a(n + i, r) = sys.jac(r, i);
        }
        a(n + i, n + i) = -sys.d[i];
      }
      sys.rhs.resize(n + m);
      for (std::size_t j = 0; j < n; ++j) sys.rhs[j] = -sys.r_f[j];
      for (std::size_t i = 0; i < m; ++i) sys.rhs[n + i] = -sys.g[i] + sys.t[i] / it.lambda[i];
      sys.matrix = std::move(a);
      break;
    }
    case Formulation::kFull: {
      Matrix a(n + 2 * m, n + 2 * m);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a(r, c) = hess(r, c);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
          a(r, n + i) = sys.jac(r, i);
          a(n + i, r) = sys.jac(r, i);
        }
        a(n + i, n + m + i) = Real::exact(1.0);
        a(n + m + i, n + i) = it.s[i];
        a(n + m + i, n + m + i) = it.lambda[i];
      }
      sys.rhs.resize(n + 2 * m);
      for (std::size_t j = 0; j < n; ++j) sys.rhs[j] = -sys.r_f[j];
      for (std::size_t i = 0; i < m; ++i) {
        sys.rhs[n + i] = -(sys.g[i] + it.s[i]);
        sys.rhs[n + m + i] = -(it.s[i] * it.lambda[i] + sys.t[i]);
      }
      sys.matrix = std::move(a);
      break;
    }
  }
  return sys;
}

StepResult procedure_condensed(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg_in,
                               const precision::PrecisionConfig& pcfg, const KnownSolution* known) {
  StepConfig cfg = cfg_in;
  cfg.formulation = Formulation::kCondensed;
  precision::Scope scope(pcfg);
  StepResult out;
  out.system = assemble(problem, it, cfg, pcfg, known);
  const AssembledSystem& sys = out.system;
  Solved solved = solve_with(cfg.effective_solver(), sys.matrix, sys.rhs, sys.mu);
  out.pivots = std::move(solved.pivots);

  Step& step = out.step;
  step.dz = std::move(solved.x);
  const Vector jdz = multiply_transposed(sys.jac, step.dz);
  step.dlambda.resize(problem.m());
  for (std::size_t i = 0; i < problem.m(); ++i) {
    step.dlambda[i] = sys.d_inv[i] * (sys.g[i] - sys.t[i] / it.lambda[i] + jdz[i]);
  }
  step.ds = recover_ds(sys, it, step.dz);
  require_finite(step);
  return out;
}

StepResult procedure_augmented(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg_in,
                               const precision::PrecisionConfig& pcfg, const KnownSolution* known) {
  StepConfig cfg = cfg_in;
  cfg.formulation = Formulation::kAugmented;
  precision::Scope scope(pcfg);
  StepResult out;
  out.system = assemble(problem, it, cfg, pcfg, known);
  const AssembledSystem& sys = out.system;
  Solved solved = solve_with(cfg.effective_solver(), sys.matrix, sys.rhs, sys.mu);
  out.pivots = std::move(solved.pivots);

  const std::size_t n = problem.n();
  Step& step = out.step;
  step.dz.assign(solved.x.begin(), solved.x.begin() + static_cast<std::ptrdiff_t>(n));
  step.dlambda.assign(solved.x.begin() + static_cast<std::ptrdiff_t>(n), solved.x.end());
  step.ds = recover_ds(sys, it, step.dz);
  require_finite(step);
  return out;
}

StepResult procedure_full(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg_in,
                          const precision::PrecisionConfig& pcfg, const KnownSolution* known) {
  StepConfig cfg = cfg_in;
  cfg.formulation = Formulation::kFull;
  precision::Scope scope(pcfg);
  StepResult out;
  out.system = assemble(problem, it, cfg, pcfg, known);
  const AssembledSystem& sys = out.system;
  Solved solved = solve_with(cfg.effective_solver(), sys.matrix, sys.rhs, sys.mu);

  const auto n = static_cast<std::ptrdiff_t>(problem.n());
  const auto m = static_cast<std::ptrdiff_t>(problem.m());
  Step& step = out.step;
  step.dz.assign(solved.x.begin(), solved.x.begin() + n);
  step.dlambda.assign(solved.x.begin() + n, solved.x.begin() + n + m);
  step.ds.assign(solved.x.begin() + n + m, solved.x.end());
  require_finite(step);
  return out;
}

StepResult compute_step(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                        const precision::PrecisionConfig& pcfg, const KnownSolution* known) {
  switch (cfg.formulation) {
    case Formulation::kCondensed: return procedure_condensed(problem, it, cfg, pcfg, known);
    case Formulation::kAugmented: return procedure_augmented(problem, it, cfg, pcfg, known);
    case Formulation::kFull: return procedure_full(problem, it, cfg, pcfg, known);
  }
  throw std::invalid_argument("unknown formulation");
}

double full_system_residual(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg, const Step& step) {
  const auto native = precision::PrecisionConfig::native();
  precision::Scope scope(native);
  StepConfig full = cfg;
  full.formulation = Formulation::kFull;
  full.solver = Solver::kGepp;
  const AssembledSystem sys = assemble(problem, it, full, native);
  Vector x;
  x.insert(x.end(), step.dz.begin(), step.dz.end());
  x.insert(x.end(), step.dlambda.begin(), step.dlambda.end());
  x.insert(x.end(), step.ds.begin(), step.ds.end());
  const Vector ax = multiply(sys.matrix, x);
  Vector r(ax.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ax[i] - sys.rhs[i];
  const double scale = norm_inf(sys.matrix) * norm_inf(x) + norm_inf(sys.rhs);
  return scale == 0.0 ? 0.0 : norm_inf(r) / scale;
}

}  // namespace pdip::stepgen
