#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pdip/diagnostics.hpp"
#include "pdip/driver.hpp"
#include "pdip/problems.hpp"

namespace {

using namespace pdip;

constexpr double kFdStep = 1e-6;

bool fd_close(double analytic, double fd) { return std::abs(analytic - fd) <= 1e-6 * std::max(std::abs(analytic), 1.0); }

std::vector<ProblemInstance> all_problems() {
  std::vector<ProblemInstance> out;
  for (const auto& key : problem_keys()) out.push_back(make_problem(key));
  return out;
}

Vector shifted(const Vector& z, std::size_t j, double h) {
  Vector out = z;
  out[j] = Real(z[j].value() + h);
  return out;
}

TEST(TwoCircles, ConstraintsActiveAtSolution) {
  const auto inst = make_two_circles();
  EXPECT_EQ(inst.problem->n(), 2u);
  EXPECT_EQ(inst.problem->m(), 2u);
  EXPECT_EQ(to_doubles(inst.problem->g(make_vector({0, 0}))), (std::vector<double>{0, 0}));
}

TEST(TwoCircles, JacobianAtSolution) {
  const Matrix j = make_two_circles().problem->jac_g(make_vector({0, 0}));
  EXPECT_DOUBLE_EQ(j(0, 0).value(), -2.0 / 3.0);
  EXPECT_DOUBLE_EQ(j(1, 0).value(), 0.0);
  EXPECT_DOUBLE_EQ(j(0, 1).value(), -4.0 / 3.0);
  EXPECT_DOUBLE_EQ(j(1, 1).value(), 0.0);
}

TEST(TwoCircles, ObjectiveIsFirstCoordinate) {
  EXPECT_DOUBLE_EQ(make_two_circles().problem->phi(make_vector({1.0 / 30.0, 1.0 / 9.0})).value(), 1.0 / 30.0);
}

TEST(TwoCircles, KnownSolution) {
  const auto k = make_two_circles().known;
  EXPECT_EQ(k.z_star, (std::vector<double>{0, 0}));
  EXPECT_EQ(k.active, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(k.inactive.empty());
  EXPECT_EQ(k.multipliers.a, (std::vector<double>{2, 4}));
  EXPECT_EQ(k.multipliers.b, 3.0);
  EXPECT_TRUE(k.strictly_complementary);
}

TEST(TwoCirclesModified, SecondConstraintActiveAtSolution) {
  EXPECT_NEAR(make_two_circles_modified().problem->g(make_vector({0, 0}))[1].value(), 0.0, 1e-15);
}

TEST(TwoCirclesModified, SecondJacobianColumn) {
  const auto p = make_two_circles_modified().problem;
  const Matrix j = p->jac_g(make_vector({0, 0}));
  EXPECT_NEAR(j(0, 1).value(), -4.0 / 3.0, 1e-15);
  EXPECT_EQ(j(1, 1).value(), 0.0);
  // Central differences of the closed form.
  auto g2 = [&](double z1) { return p->g(make_vector({z1, 0.0}))[1].value(); };
  EXPECT_NEAR((g2(kFdStep) - g2(-kFdStep)) / (2 * kFdStep), -4.0 / 3.0, 1e-8);
}

TEST(TwoCirclesModified, FirstConstraintUnchanged) {
  const Vector z0 = make_vector({1.0 / 30.0, 1.0 / 9.0});
  EXPECT_EQ(make_two_circles_modified().problem->g(z0)[0], make_two_circles().problem->g(z0)[0]);
}

TEST(TwoCirclesModified, SameSolutionAsTwoCircles) {
  const auto a = make_two_circles().known;
  const auto b = make_two_circles_modified().known;
  EXPECT_EQ(a.z_star, b.z_star);
  EXPECT_EQ(a.active, b.active);
  EXPECT_EQ(a.multipliers.a, b.multipliers.a);
  EXPECT_EQ(a.multipliers.b, b.multipliers.b);
}

TEST(ScalarQuadratic, SymmetricPointHasMuEpsSquared) {
  const auto inst = make_scalar_quadratic();
  const Iterate it = driver::scalar_start(1e-3);
  const Residuals r = eval_residuals(*inst.problem, it);
  EXPECT_NEAR(r.mu.value(), 1e-6, 1e-20);
  EXPECT_EQ(r.r_f[0].value(), 0.0);
  EXPECT_EQ(r.r_g[0].value(), 0.0);
}

TEST(ScalarQuadratic, DistanceIsRootTwoEps) {
  const auto inst = make_scalar_quadratic();
  EXPECT_NEAR(diagnostics::delta_exact(inst.known, driver::scalar_start(1e-3)), std::sqrt(2.0) * 1e-3, 1e-18);
}

TEST(ScalarQuadratic, FlaggedNotStrictlyComplementary) {
  const auto k = make_scalar_quadratic().known;
  EXPECT_FALSE(k.strictly_complementary);
  EXPECT_EQ(k.active, (std::vector<std::size_t>{0}));
}

TEST(Residuals, MuAtStartPoint) {
  const auto inst = make_two_circles();
  EXPECT_DOUBLE_EQ(eval_residuals(*inst.problem, driver::circle_start()).mu.value(), 0.1);
}

TEST(Residuals, LogMuAtStartRoundsToMinusOne) {
  const auto inst = make_two_circles();
  EXPECT_EQ(diagnostics::log10_rounded(eval_residuals(*inst.problem, driver::circle_start()).mu.value()), -1.0);
}

TEST(Residuals, HandValuesAtStartPoint) {
  const auto inst = make_two_circles();
  const Residuals r = eval_residuals(*inst.problem, driver::circle_start());
  // r_f = (1, 0) + lambda_1 (2(z1 - 1/3), 2 z2) + lambda_2 (2(z1 - 2/3), 2 z2).
  const double z1 = 1.0 / 30.0, z2 = 1.0 / 9.0;
  EXPECT_NEAR(r.r_f[0].value(), 1.0 + 2 * (z1 - 1.0 / 3.0) + 0.2 * 2 * (z1 - 2.0 / 3.0), 1e-15);
  EXPECT_NEAR(r.r_f[1].value(), 2 * z2 + 0.2 * 2 * z2, 1e-15);
  const double g1 = (z1 - 1.0 / 3.0) * (z1 - 1.0 / 3.0) + z2 * z2 - 1.0 / 9.0;
  const double g2 = (z1 - 2.0 / 3.0) * (z1 - 2.0 / 3.0) + z2 * z2 - 4.0 / 9.0;
  EXPECT_NEAR(r.r_g[0].value(), g1 + 0.1, 1e-15);
  EXPECT_NEAR(r.r_g[1].value(), g2 + 0.5, 1e-15);
}

TEST(Residuals, RejectsNonInteriorPoints) {
  const auto inst = make_two_circles();
  Iterate it = driver::circle_start();
  it.s[0] = Real(0.0);
  it.lambda[1] = Real(0.0);
  EXPECT_THROW(eval_residuals(*inst.problem, it), std::invalid_argument);
  it = driver::circle_start();
  it.lambda[0] = Real(-1.0);
  EXPECT_THROW(eval_residuals(*inst.problem, it), std::invalid_argument);
}

TEST(Residuals, MuMatchesAscendingSum) {
  const Vector lambda = make_vector({0.3, 0.7, 1.1});
  const Vector s = make_vector({0.2, 0.9, 0.05});
  EXPECT_EQ(duality_measure(lambda, s).value(), ((0.3 * 0.2 + 0.7 * 0.9) + 1.1 * 0.05) / 3.0);
}

TEST(Problems, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const auto& inst : all_problems()) {
    const NlpProblem& p = *inst.problem;
    for (int trial = 0; trial < 100; ++trial) {
      Vector z;
      for (std::size_t j = 0; j < p.n(); ++j) z.emplace_back(uni(rng));
      const Vector gphi = p.grad_phi(z);
      const Matrix jac = p.jac_g(z);
      const Matrix hphi = p.hess_phi(z);
      for (std::size_t j = 0; j < p.n(); ++j) {
        const Vector zp = shifted(z, j, kFdStep), zm = shifted(z, j, -kFdStep);
        const double fd_phi = (p.phi(zp).value() - p.phi(zm).value()) / (2 * kFdStep);
        EXPECT_TRUE(fd_close(gphi[j].value(), fd_phi)) << p.key() << " dphi/dz" << j;
        const Vector gp = p.g(zp), gm = p.g(zm);
        for (std::size_t i = 0; i < p.m(); ++i) {
          const double fd = (gp[i].value() - gm[i].value()) / (2 * kFdStep);
          EXPECT_TRUE(fd_close(jac(j, i).value(), fd)) << p.key() << " dg" << i << "/dz" << j;
        }
        const Vector dp = p.grad_phi(zp), dm = p.grad_phi(zm);
        const Matrix jp = p.jac_g(zp), jm = p.jac_g(zm);
        for (std::size_t r = 0; r < p.n(); ++r) {
          const double fd = (dp[r].value() - dm[r].value()) / (2 * kFdStep);
          EXPECT_TRUE(fd_close(hphi(r, j).value(), fd)) << p.key() << " hess phi";
          for (std::size_t i = 0; i < p.m(); ++i) {
            const double fdg = (jp(r, i).value() - jm(r, i).value()) / (2 * kFdStep);
            EXPECT_TRUE(fd_close(p.hess_g(z, i)(r, j).value(), fdg)) << p.key() << " hess g" << i;
          }
        }
      }
    }
  }
}

TEST(Problems, HessiansSymmetric) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const auto& inst : all_problems()) {
    const NlpProblem& p = *inst.problem;
    for (int trial = 0; trial < 20; ++trial) {
      Vector z;
      for (std::size_t j = 0; j < p.n(); ++j) z.emplace_back(uni(rng));
      EXPECT_TRUE(is_symmetric(p.hess_phi(z), 1e-14));
      for (std::size_t i = 0; i < p.m(); ++i) EXPECT_TRUE(is_symmetric(p.hess_g(z, i), 1e-14));
    }
  }
}

TEST(Problems, EvaluatorsAreDeterministic) {
  const Vector z = make_vector({0.123, 0.456});
  for (const auto& inst : all_problems()) {
    const NlpProblem& p = *inst.problem;
    const Vector zz(z.begin(), z.begin() + p.n());
    EXPECT_EQ(p.g(zz), p.g(zz));
    EXPECT_EQ(p.jac_g(zz), p.jac_g(zz));
    EXPECT_EQ(p.phi(zz), p.phi(zz));
  }
}

TEST(Problems, KeysRoundTrip) {
  for (const auto& key : problem_keys()) EXPECT_EQ(make_problem(key).problem->key(), key);
  EXPECT_THROW(make_problem("three-circles"), std::invalid_argument);
}

TEST(KnownSolution, ActiveAndInactiveSigns) {
  for (const auto& inst : all_problems()) {
    const Vector g = inst.problem->g(from_doubles(inst.known.z_star));
    for (std::size_t i : inst.known.active) EXPECT_NEAR(g[i].value(), 0.0, 1e-12);
    for (std::size_t i : inst.known.inactive) EXPECT_LT(g[i].value(), -1e-12);
  }
}

TEST(KnownSolution, SegmentPointsAreStationary) {
  for (const auto& inst : all_problems()) {
    const auto& k = inst.known;
    const NlpProblem& p = *inst.problem;
    // Vertices of the segment plus its midpoint.
    std::vector<std::vector<double>> points;
    for (std::size_t c = 0; c < k.active.size(); ++c) {
      std::vector<double> v(k.active.size(), 0.0);
      if (k.multipliers.a[c] != 0.0) v[c] = k.multipliers.b / k.multipliers.a[c];
      points.push_back(v);
    }
    if (points.size() == 2) points.push_back({(points[0][0] + points[1][0]) / 2, (points[0][1] + points[1][1]) / 2});
    for (const auto& lb : points) {
      Vector lambda(p.m());
      for (std::size_t c = 0; c < k.active.size(); ++c) lambda[k.active[c]] = lb[c];
      const Vector z = from_doubles(k.z_star);
      const Vector rf = lagrangian_gradient(p, z, lambda, p.jac_g(z));
      EXPECT_LE(norm2(rf), 1e-10) << p.key();
    }
  }
}

TEST(SvdBasis, Invariants) {
  for (const auto& inst : all_problems()) {
    const auto& k = inst.known;
    const NlpProblem& p = *inst.problem;
    const Matrix jac = p.jac_g(from_doubles(k.z_star));
    const std::size_t nb = k.active.size();
    const auto& svd = k.svd;
    const std::size_t r = svd.sigma.size();
    ASSERT_EQ(svd.u_hat.cols(), r);
    ASSERT_EQ(svd.u.cols(), r);
    ASSERT_EQ(svd.v.cols(), nb - r);
    ASSERT_EQ(svd.v_hat.cols(), p.n() - r);
    for (std::size_t c = 1; c < r; ++c) EXPECT_GE(svd.sigma[c - 1], svd.sigma[c]);
    for (double s : svd.sigma) EXPECT_GT(s, 0.0);
    // U_hat Sigma U^T reconstructs grad g_B.
    for (std::size_t row = 0; row < p.n(); ++row) {
      for (std::size_t c = 0; c < nb; ++c) {
        double acc = 0.0;
        for (std::size_t q = 0; q < r; ++q) acc += svd.u_hat(row, q).value() * svd.sigma[q] * svd.u(c, q).value();
        EXPECT_NEAR(acc, jac(row, k.active[c]).value(), 1e-12);
      }
    }
    // grad g_B V = 0.
    for (std::size_t row = 0; row < p.n(); ++row) {
      for (std::size_t q = 0; q < svd.v.cols(); ++q) {
        double acc = 0.0;
        for (std::size_t c = 0; c < nb; ++c) acc += jac(row, k.active[c]).value() * svd.v(c, q).value();
        EXPECT_NEAR(acc, 0.0, 1e-12);
      }
    }
    // [U V] and [U_hat V_hat] orthogonal.
    auto check_orthogonal = [](const Matrix& a, const Matrix& b) {
      const std::size_t rows = a.rows();
      auto col = [&](std::size_t j, std::size_t i) { return j < a.cols() ? a(i, j).value() : b(i, j - a.cols()).value(); };
      const std::size_t cols = a.cols() + b.cols();
      ASSERT_EQ(cols, rows);
      for (std::size_t x = 0; x < cols; ++x) {
        for (std::size_t y = 0; y < cols; ++y) {
          double acc = 0.0;
          for (std::size_t i = 0; i < rows; ++i) acc += col(x, i) * col(y, i);
          EXPECT_NEAR(acc, x == y ? 1.0 : 0.0, 1e-12);
        }
      }
    };
    check_orthogonal(svd.u, svd.v);
    check_orthogonal(svd.u_hat, svd.v_hat);
  }
}

}  // namespace
