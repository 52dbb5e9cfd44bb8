#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pdip/dense.hpp"

namespace pdip {

// Inequality-constrained NLP  min phi(z)  s.t.  g(z) <= 0.
//
// Evaluators route every operation through `Real`, so they honour the
// active precision, and are written in the same operation order as the
// closed-form expressions they implement.
class NlpProblem {
 public:
  virtual ~NlpProblem() = default;

  virtual std::string key() const = 0;
  virtual std::size_t n() const = 0;
  virtual std::size_t m() const = 0;

  virtual Real phi(std::span<const Real> z) const = 0;
  virtual Vector grad_phi(std::span<const Real> z) const = 0;
  virtual Matrix hess_phi(std::span<const Real> z) const = 0;
  virtual Vector g(std::span<const Real> z) const = 0;
  // n x m, column i is grad g_i(z).
  virtual Matrix jac_g(std::span<const Real> z) const = 0;
  virtual Matrix hess_g(std::span<const Real> z, std::size_t i) const = 0;
};

// Optimal multipliers restricted to the active set:
// { lambda_B >= 0 : a^T lambda_B = b }.
struct MultiplierSegment {
  std::vector<double> a;
  double b = 0.0;
};

// Partitioned SVD of grad g_B(z*) = [U_hat V_hat] [Sigma 0; 0 0] [U V]^T.
// U, V live in multiplier space (|B| rows); U_hat, V_hat in primal space.
struct SvdBasis {
  Matrix u_hat;
  Matrix v_hat;
  Matrix u;
  Matrix v;
  std::vector<double> sigma;
};

struct KnownSolution {
  std::vector<double> z_star;
  std::vector<std::size_t> active;    // B, zero-based
  std::vector<std::size_t> inactive;  // N
  MultiplierSegment multipliers;
  SvdBasis svd;
  // Whether every active constraint has a positive multiplier somewhere in
  // the optimal set. Theta(mu) diagnostics refuse problems without it.
  bool strictly_complementary = true;
};

struct ProblemInstance {
  std::shared_ptr<const NlpProblem> problem;
  KnownSolution known;
};

// Jacobian of the active constraints at z*, partitioned by SVD.
SvdBasis make_svd_basis(const NlpProblem& problem, std::span<const double> z_star,
                        std::span<const std::size_t> active);

// min z_1  s.t. (z_1-1/3)^2 + z_2^2 <= 1/9,  (z_1-2/3)^2 + z_2^2 <= 4/9.
ProblemInstance make_two_circles();
// As above with the second constraint replaced by
// 2/(3 sqrt 5) (z_1 - sqrt 5)^2 + z_2^2 - 2 sqrt(5)/3 <= 0.
ProblemInstance make_two_circles_modified();
// min z^2/2  s.t. -z <= 0. Violates strict complementarity.
ProblemInstance make_scalar_quadratic();

// "two-circles", "two-circles-mod", "scalar-quadratic".
ProblemInstance make_problem(std::string_view key);
std::vector<std::string> problem_keys();

struct Iterate {
  Vector z;
  Vector lambda;
  Vector s;
};

struct Residuals {
  Vector r_f;  // grad phi(z) + grad g(z) lambda
  Vector r_g;  // g(z) + s
  Real mu;     // lambda^T s / m
};

bool strictly_interior(const Iterate& it);

// Duality measure lambda^T s / m, summed in ascending index order.
Real duality_measure(std::span<const Real> lambda, std::span<const Real> s);

// grad phi(z) + (grad g(z) lambda), the product accumulated in ascending i.
Vector lagrangian_gradient(const NlpProblem& problem, std::span<const Real> z, std::span<const Real> lambda,
                           const Matrix& jac);
// hess phi(z) + sum_i lambda_i hess g_i(z), accumulated in ascending i.
Matrix lagrangian_hessian(const NlpProblem& problem, std::span<const Real> z, std::span<const Real> lambda);

// Throws std::invalid_argument unless lambda > 0 and s > 0 componentwise.
Residuals eval_residuals(const NlpProblem& problem, const Iterate& it);

}  // namespace pdip
