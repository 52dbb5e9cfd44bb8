#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "pdip/driver.hpp"
#include "pdip/problems.hpp"
#include "pdip/stepgen.hpp"

namespace pdip::testing {

// two_circles with a third constraint z_1 - 1 <= 0, inactive at z* = 0, so
// the augmented matrix carries a D_N block.
class CirclesWithInactive : public NlpProblem {
 public:
  CirclesWithInactive() : base_(make_two_circles().problem) {}

  std::string key() const override { return "two-circles-inactive"; }
  std::size_t n() const override { return 2; }
  std::size_t m() const override { return 3; }
  Real phi(std::span<const Real> z) const override { return base_->phi(z); }
  Vector grad_phi(std::span<const Real> z) const override { return base_->grad_phi(z); }
  Matrix hess_phi(std::span<const Real> z) const override { return base_->hess_phi(z); }
  Vector g(std::span<const Real> z) const override {
    Vector out = base_->g(z);
    out.push_back(z[0] - Real(1.0));
    return out;
  }
  Matrix jac_g(std::span<const Real> z) const override {
    const Matrix j2 = base_->jac_g(z);
    Matrix j(2, 3);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) j(r, c) = j2(r, c);
    j(0, 2) = Real(1.0);
    return j;
  }
  Matrix hess_g(std::span<const Real> z, std::size_t i) const override {
    return i < 2 ? base_->hess_g(z, i) : Matrix(2, 2);
  }

 private:
  std::shared_ptr<const NlpProblem> base_;
};

inline ProblemInstance make_circles_with_inactive() {
  ProblemInstance inst;
  inst.problem = std::make_shared<CirclesWithInactive>();
  inst.known = make_two_circles().known;
  inst.known.inactive = {2};
  return inst;
}

// A point with lambda_i s_i = mu for every i, so the duality measure is
// exactly mu up to rounding: z = z* + offset, lambda_B = lambda_b (one of
// the optimal multipliers), s_N = -g_N(z*), and the complementary entries
// scaled by mu.
inline Iterate synthetic_iterate(const ProblemInstance& inst, double mu, std::vector<double> lambda_b = {1.0, 0.25},
                                 std::vector<double> offset = {0.0, 0.0}) {
  const NlpProblem& p = *inst.problem;
  const KnownSolution& k = inst.known;
  Iterate it;
  for (std::size_t j = 0; j < p.n(); ++j) it.z.emplace_back(k.z_star[j] + offset[j]);
  it.lambda.resize(p.m());
  it.s.resize(p.m());
  const Vector g_star = p.g(from_doubles(k.z_star));
  for (std::size_t c = 0; c < k.active.size(); ++c) {
    const std::size_t i = k.active[c];
    it.lambda[i] = lambda_b[c];
    it.s[i] = mu / lambda_b[c];
  }
  for (std::size_t i : k.inactive) {
    it.s[i] = -g_star[i].value();
    it.lambda[i] = mu / it.s[i].value();
  }
  return it;
}

// Paper table rows: log mu, log ||dz||, log ||U^T dl_B||, log ||V^T dl_B||,
// alpha_max, lambda.
struct PaperRow {
  int iter;
  double log_mu, log_dz, log_u, log_v, alpha;
  std::array<double, 2> lambda;
};

inline const std::vector<PaperRow>& table1() {
  static const std::vector<PaperRow> rows = {
      {0, -1.0, -0.9, -1.9, -1.9, .9227, {1.00, .20}},  {1, -2.7, -1.5, -1.3, -1.2, .9193, {0.99, .19}},
      {5, -9.4, -6.7, -6.3, -4.6, 1.0, {1.04, .23}},    {6, -11.4, -8.7, -8.3, -5.9, 1.0, {1.04, .23}},
      {7, -13.4, -10.7, -10.3, -3.8, .9999, {1.04, .23}}, {8, -15.4, -12.7, -12.3, -1.2, .9439, {1.04, .23}},
      {9, -17.1, -13.9, -13.4, -0.6, .9723, {1.10, .20}},
  };
  return rows;
}

inline const std::vector<PaperRow>& table2() {
  static const std::vector<PaperRow> rows = {
      {0, -1.0, -0.9, -1.9, -1.9, .9227, {1.00, .20}},  {1, -2.7, -1.5, -1.3, -1.2, .9193, {0.99, .19}},
      {5, -9.4, -6.7, -6.3, -4.6, 1.0, {1.04, .23}},    {6, -11.4, -8.7, -8.3, -5.7, 1.0, {1.04, .23}},
      {7, -13.4, -10.7, -10.3, -8.3, 1.0, {1.04, .23}}, {8, -15.4, -12.7, -12.4, -10.3, 1.0, {1.04, .23}},
      {9, -17.4, -14.7, -13.3, -12.3, 1.0, {1.04, .23}},
  };
  return rows;
}

// The tabulated runs: rows 0-9 each carry a step, so the stop is driven by
// the iteration cap alone.
inline driver::IterationTrace table_run(const ProblemInstance& inst, stepgen::Formulation f,
                                        std::optional<stepgen::Solver> solver, int bits = 53) {
  stepgen::StepConfig cfg;
  cfg.formulation = f;
  cfg.solver = solver;
  driver::StopCriteria stop;
  stop.mu_min = 0.0;
  stop.max_iters = 10;
  const auto pcfg = precision::PrecisionConfig::with_bits(bits);
  precision::Scope scope(pcfg);
  return driver::run(*inst.problem, &inst.known, driver::circle_start(), cfg, driver::CentralityParams{}, pcfg, stop);
}

// Determinant by cofactor expansion along the first row.
inline double cofactor_det(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<double>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<double> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(a[r][k]);
      minor.push_back(row);
    }
    det += (c % 2 == 0 ? 1.0 : -1.0) * a[0][c] * cofactor_det(minor);
  }
  return det;
}

// inv(A) = adj(A) / det(A).
inline std::vector<std::vector<double>> cofactor_inverse(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  const double det = cofactor_det(a);
  std::vector<std::vector<double>> inv(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::vector<double>> minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        std::vector<double> row;
        for (std::size_t k = 0; k < n; ++k)
          if (k != j) row.push_back(a[r][k]);
        minor.push_back(row);
      }
      inv[j][i] = ((i + j) % 2 == 0 ? 1.0 : -1.0) * cofactor_det(minor) / det;
    }
  }
  return inv;
}

inline std::vector<std::vector<double>> hilbert(std::size_t n) {
  std::vector<std::vector<double>> h(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i][j] = 1.0 / static_cast<double>(i + j + 1);
  return h;
}

inline Matrix to_matrix(const std::vector<std::vector<double>>& a) {
  Matrix m(a.size(), a.front().size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j];
  return m;
}

inline double relative_error(std::span<const Real> x, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (x[i].value() - ref[i]) * (x[i].value() - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

}  // namespace pdip::testing
