#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdip/dense.hpp"
#include "pdip/linalg.hpp"
#include "pdip/precision.hpp"
#include "pdip/problems.hpp"

namespace pdip::stepgen {

enum class Formulation { kFull, kAugmented, kCondensed };
enum class Solver { kCholesky, kBunchKaufman, kBunchParlett, kGepp };

// Deviation t from the pure Newton step: mu^2 e, or sigma mu e.
struct TRule {
  enum class Kind { kMuSquared, kCentering };
  Kind kind = Kind::kMuSquared;
  double sigma = 0.0;

  static TRule mu_squared() { return {}; }
  static TRule centering(double sigma);  // sigma in [0, 1]
};

struct StepConfig {
  TRule t_rule;
  Formulation formulation = Formulation::kCondensed;
  std::optional<Solver> solver;  // unset: per-formulation default

  Solver effective_solver() const;
};

Solver default_solver(Formulation f);
// Throws std::invalid_argument for combinations the matrix structure forbids
// (Cholesky on the indefinite augmented matrix, symmetric solvers on the
// unsymmetric full matrix).
void validate(const StepConfig& cfg);

std::string_view to_string(Formulation f);
std::string_view to_string(Solver s);
Formulation parse_formulation(std::string_view s);
Solver parse_solver(std::string_view s);

struct AssembledSystem {
  Formulation formulation = Formulation::kCondensed;
  Matrix matrix;
  Vector rhs;
  Vector d;      // Lambda^{-1} S, elementwise s_i / lambda_i
  Vector d_inv;  // S^{-1} Lambda, elementwise lambda_i / s_i
  Vector t;
  // Quantities the recovery steps reuse.
  Vector g;
  Matrix jac;
  Vector r_f;
  Real mu;
  // Active/inactive split, only when a KnownSolution was supplied.
  std::vector<std::size_t> active;
  std::vector<std::size_t> inactive;
};

struct Step {
  Vector dz;
  Vector dlambda;
  Vector ds;
};

struct StepResult {
  Step step;
  AssembledSystem system;
  std::vector<linalg::PivotRecord> pivots;
};

class StepFailure : public std::runtime_error {
 public:
  enum class Kind { kCompletionFailure, kSingularPivot, kSingularMatrix, kNonFinite };
  StepFailure(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

AssembledSystem assemble(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                         const precision::PrecisionConfig& pcfg, const KnownSolution* known = nullptr);

// Solve the condensed system for dz, then recover dlambda and ds.
StepResult procedure_condensed(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                               const precision::PrecisionConfig& pcfg, const KnownSolution* known = nullptr);
// Solve the augmented system for (dz, dlambda), then recover ds.
StepResult procedure_augmented(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                               const precision::PrecisionConfig& pcfg, const KnownSolution* known = nullptr);
// Solve the full (n + 2m) system in one shot.
StepResult procedure_full(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                          const precision::PrecisionConfig& pcfg, const KnownSolution* known = nullptr);

// Dispatches on cfg.formulation.
StepResult compute_step(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg,
                        const precision::PrecisionConfig& pcfg, const KnownSolution* known = nullptr);

// Residual of `step` in the full Newton system, relative to
// ||matrix|| ||step|| + ||rhs||, evaluated in native arithmetic.
double full_system_residual(const NlpProblem& problem, const Iterate& it, const StepConfig& cfg, const Step& step);

}  // namespace pdip::stepgen
