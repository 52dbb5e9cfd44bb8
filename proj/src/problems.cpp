#include "pdip/problems.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "pdip/linalg.hpp"

namespace pdip {
namespace {

using precision::sqrt;

class TwoCircles : public NlpProblem {
 public:
  explicit TwoCircles(bool modified) : modified_(modified) {}

  std::string key() const override { return modified_ ? "two-circles-mod" : "two-circles"; }
  std::size_t n() const override { return 2; }
  std::size_t m() const override { return 2; }

  Real phi(std::span<const Real> z) const override { return z[0]; }

  Vector grad_phi(std::span<const Real>) const override { return make_vector({1.0, 0.0}); }

  Matrix hess_phi(std::span<const Real>) const override { return Matrix(2, 2); }

  Vector g(std::span<const Real> z) const override {
    const Real d1 = z[0] - Real(1.0) / 3.0;
    const Real g1 = d1 * d1 + z[1] * z[1] - Real(1.0) / 9.0;
    if (!modified_) {
      const Real d2 = z[0] - Real(2.0) / 3.0;
      const Real g2 = d2 * d2 + z[1] * z[1] - Real(4.0) / 9.0;
      return {g1, g2};
    }
    const Real root5 = sqrt(Real(5.0));
    const Real d2 = z[0] - root5;
    const Real g2 = Real(2.0) / (Real(3.0) * root5) * (d2 * d2) + z[1] * z[1] - Real(2.0) * root5 / 3.0;
    return {g1, g2};
  }

  Matrix jac_g(std::span<const Real> z) const override {
    Matrix j(2, 2);
    j(0, 0) = Real(2.0) * (z[0] - Real(1.0) / 3.0);
    j(1, 0) = Real(2.0) * z[1];
    if (!modified_) {
      j(0, 1) = Real(2.0) * (z[0] - Real(2.0) / 3.0);
    } else {
      const Real root5 = sqrt(Real(5.0));
      j(0, 1) = Real(2.0) * (Real(2.0) / (Real(3.0) * root5)) * (z[0] - root5);
    }
    j(1, 1) = Real(2.0) * z[1];
    return j;
  }

  Matrix hess_g(std::span<const Real>, std::size_t i) const override {
    assert(i < 2);
    Matrix h(2, 2);
    h(0, 0) = Real(2.0);
    h(1, 1) = Real(2.0);
    if (modified_ && i == 1) {
      const Real root5 = sqrt(Real(5.0));
      h(0, 0) = Real(2.0) * (Real(2.0) / (Real(3.0) * root5));
    }
    return h;
  }

 private:
  bool modified_;
};

class ScalarQuadratic : public NlpProblem {
 public:
  std::string key() const override { return "scalar-quadratic"; }
  std::size_t n() const override { return 1; }
  std::size_t m() const override { return 1; }

  Real phi(std::span<const Real> z) const override { return Real(0.5) * z[0] * z[0]; }
  Vector grad_phi(std::span<const Real> z) const override { return {z[0]}; }
  Matrix hess_phi(std::span<const Real>) const override { return Matrix{{1.0}}; }
  Vector g(std::span<const Real> z) const override { return {-z[0]}; }
  Matrix jac_g(std::span<const Real>) const override { return Matrix{{-1.0}}; }
  Matrix hess_g(std::span<const Real>, std::size_t) const override { return Matrix{{0.0}}; }
};

ProblemInstance circle_instance(bool modified) {
  precision::Scope native(precision::PrecisionConfig::native());
  ProblemInstance inst;
  inst.problem = std::make_shared<TwoCircles>(modified);
  KnownSolution& k = inst.known;
  k.z_star = {0.0, 0.0};
  k.active = {0, 1};
  k.multipliers = MultiplierSegment{{2.0, 4.0}, 3.0};
  k.svd = make_svd_basis(*inst.problem, k.z_star, k.active);
  k.strictly_complementary = true;
  return inst;
}

}  // namespace

SvdBasis make_svd_basis(const NlpProblem& problem, std::span<const double> z_star,
                        std::span<const std::size_t> active) {
  precision::Scope native(precision::PrecisionConfig::native());
  const Vector z = from_doubles(z_star);
  const Matrix jac = problem.jac_g(z);
  Matrix jb(problem.n(), active.size());
  for (std::size_t c = 0; c < active.size(); ++c)
    for (std::size_t r = 0; r < problem.n(); ++r) jb(r, c) = jac(r, active[c]);

  const linalg::SvdResult svd = linalg::svd_small(jb);
  const std::size_t rank = svd.rank;
  auto take_cols = [](const Matrix& m, std::size_t from, std::size_t to) {
    Matrix out(m.rows(), to - from);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = from; c < to; ++c) out(r, c - from) = m(r, c);
    return out;
  };
  SvdBasis basis;
  basis.u_hat = take_cols(svd.left, 0, rank);
  basis.v_hat = take_cols(svd.left, rank, svd.left.cols());
  basis.u = take_cols(svd.right, 0, rank);
  basis.v = take_cols(svd.right, rank, svd.right.cols());
  for (std::size_t i = 0; i < rank; ++i) basis.sigma.push_back(svd.sigma[i].value());
  return basis;
}

ProblemInstance make_two_circles() { return circle_instance(false); }

ProblemInstance make_two_circles_modified() { return circle_instance(true); }

ProblemInstance make_scalar_quadratic() {
  ProblemInstance inst;
  inst.problem = std::make_shared<ScalarQuadratic>();
  KnownSolution& k = inst.known;
  k.z_star = {0.0};
  k.active = {0};
  k.multipliers = MultiplierSegment{{1.0}, 0.0};
  k.svd = make_svd_basis(*inst.problem, k.z_star, k.active);
  k.strictly_complementary = false;
  return inst;
}

std::vector<std::string> problem_keys() { return {"two-circles", "two-circles-mod", "scalar-quadratic"}; }

ProblemInstance make_problem(std::string_view key) {
  if (key == "two-circles") return make_two_circles();
  if (key == "two-circles-mod") return make_two_circles_modified();
  if (key == "scalar-quadratic") return make_scalar_quadratic();
  throw std::invalid_argument("unknown problem '" + std::string(key) + "'");
}

bool strictly_interior(const Iterate& it) {
  auto positive = [](Real v) { return v > 0.0; };
  return std::all_of(it.lambda.begin(), it.lambda.end(), positive) && std::all_of(it.s.begin(), it.s.end(), positive);
}

Real duality_measure(std::span<const Real> lambda, std::span<const Real> s) {
  return dot(lambda, s) / Real(static_cast<double>(lambda.size()));
}

Vector lagrangian_gradient(const NlpProblem& problem, std::span<const Real> z, std::span<const Real> lambda,
                           const Matrix& jac) {
  Vector r = problem.grad_phi(z);
  const Vector jl = multiply(jac, lambda);
  for (std::size_t j = 0; j < problem.n(); ++j) r[j] += jl[j];
  return r;
}

Matrix lagrangian_hessian(const NlpProblem& problem, std::span<const Real> z, std::span<const Real> lambda) {
  Matrix h = problem.hess_phi(z);
  for (std::size_t i = 0; i < problem.m(); ++i) {
    const Matrix hi = problem.hess_g(z, i);
    for (std::size_t r = 0; r < problem.n(); ++r)
      for (std::size_t c = 0; c < problem.n(); ++c) h(r, c) += lambda[i] * hi(r, c);
  }
  return h;
}

Residuals eval_residuals(const NlpProblem& problem, const Iterate& it) {
  if (it.z.size() != problem.n() || it.lambda.size() != problem.m() || it.s.size() != problem.m()) {
    throw std::invalid_argument("iterate dimensions do not match the problem");
  }
  if (!strictly_interior(it)) throw std::invalid_argument("iterate is not strictly interior (lambda, s > 0)");
  Residuals res;
  res.r_f = lagrangian_gradient(problem, it.z, it.lambda, problem.jac_g(it.z));
  const Vector g = problem.g(it.z);
  res.r_g.resize(problem.m());
  for (std::size_t i = 0; i < problem.m(); ++i) res.r_g[i] = g[i] + it.s[i];
  res.mu = duality_measure(it.lambda, it.s);
  return res;
}

}  // namespace pdip
