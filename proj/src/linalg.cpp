#include "pdip/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <utility>

namespace pdip::linalg {
namespace {

using precision::abs;
using precision::sqrt;

void swap_symmetric(Matrix& a, std::size_t p, std::size_t q) {
  if (p == q) return;
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(q, j));
  for (std::size_t i = 0; i < n; ++i) std::swap(a(i, p), a(i, q));
}

void swap_rows_before(Matrix& l, std::size_t p, std::size_t q, std::size_t ncols) {
  if (p == q) return;
  for (std::size_t j = 0; j < ncols; ++j) std::swap(l(p, j), l(q, j));
}

double reduced_max_abs(const Matrix& a, std::size_t k) {
  double m = 0.0;
  for (std::size_t i = k; i < a.rows(); ++i)
    for (std::size_t j = k; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j).value()));
  return m;
}

// Shared elimination engine for the diagonal pivoting variants. The selector
// sees the working matrix and the current step, and returns the one or two
// positions (>= k) of the chosen pivot.
template <typename Selector>
LdltFactorization diagonal_pivoting(const Matrix& t, const PivotContext& ctx, Selector select) {
  assert(t.rows() == t.cols());
  const std::size_t n = t.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = t(i, j);

  LdltFactorization f;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  f.lower = Matrix::identity(n);
  f.block_diagonal = Matrix(n, n);

  std::size_t k = 0;
  while (k < n) {
    f.reduced_max.push_back(reduced_max_abs(a, k));
    const std::vector<std::size_t> chosen = select(a, k);

    PivotRecord rec;
    if (chosen.size() == 1) {
      const std::size_t p = chosen[0];
      swap_symmetric(a, k, p);
      swap_rows_before(f.lower, k, p, k);
      std::swap(f.perm[k], f.perm[p]);

      const Real d = a(k, k);
      rec.indices = {f.perm[k]};
      rec.diagonals = {d.value()};
      const bool large = ctx.is_large(d.value());
      rec.kind = large ? PivotKind::kOneByOneLarge : PivotKind::kOneByOneSmall;
      rec.magnitude = large ? MagnitudeClass::kInverseMu : MagnitudeClass::kOrderOne;
      if (d == 0.0) throw SingularPivot(k, "exactly singular 1x1 pivot at step " + std::to_string(k));

      Vector l(n);
      for (std::size_t i = k + 1; i < n; ++i) l[i] = a(i, k) / d;
      for (std::size_t i = k + 1; i < n; ++i) {
        for (std::size_t j = k + 1; j <= i; ++j) {
          a(i, j) = a(i, j) - l[i] * a(j, k);
          a(j, i) = a(i, j);
        }
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        f.lower(i, k) = l[i];
        a(i, k) = a(k, i) = Real::exact(0.0);
      }
      f.block_diagonal(k, k) = d;
      f.blocks.push_back(1);
      k += 1;
    } else {
      const std::size_t p = chosen[0];
      const std::size_t q = chosen[1];
      swap_symmetric(a, k, p);
      swap_rows_before(f.lower, k, p, k);
      std::swap(f.perm[k], f.perm[p]);
      // `q` may have been the row displaced by the first swap.
      const std::size_t q_now = (q == k) ? p : q;
      swap_symmetric(a, k + 1, q_now);
      swap_rows_before(f.lower, k + 1, q_now, k);
      std::swap(f.perm[k + 1], f.perm[q_now]);

      const Real r11 = a(k, k);
      const Real r12 = a(k + 1, k);
      const Real r22 = a(k + 1, k + 1);
      rec.kind = PivotKind::kTwoByTwo;
      rec.indices = {f.perm[k], f.perm[k + 1]};
      rec.diagonals = {r11.value(), r22.value()};
      rec.magnitude = (ctx.is_large(r11.value()) || ctx.is_large(r22.value())) ? MagnitudeClass::kInverseMu
                                                                                : MagnitudeClass::kOrderOne;

      Vector l1(n);
      Vector l2(n);
      for (std::size_t i = k + 2; i < n; ++i) {
        // Row i of C R^{-1}; R is symmetric so this solves R x = C_i^T.
        std::tie(l1[i], l2[i]) = solve_2x2(r11, r12, r12, r22, a(i, k), a(i, k + 1), k);
      }
      if (k + 2 == n) {
        // No rows below; still reject an exactly singular block.
        (void)solve_2x2(r11, r12, r12, r22, Real::exact(1.0), Real::exact(1.0), k);
      }
      for (std::size_t i = k + 2; i < n; ++i) {
        for (std::size_t j = k + 2; j <= i; ++j) {
          a(i, j) = a(i, j) - (l1[i] * a(j, k) + l2[i] * a(j, k + 1));
          a(j, i) = a(i, j);
        }
      }
      for (std::size_t i = k + 2; i < n; ++i) {
        f.lower(i, k) = l1[i];
        f.lower(i, k + 1) = l2[i];
        a(i, k) = a(k, i) = Real::exact(0.0);
        a(i, k + 1) = a(k + 1, i) = Real::exact(0.0);
      }
      f.block_diagonal(k, k) = r11;
      f.block_diagonal(k + 1, k) = r12;
      f.block_diagonal(k, k + 1) = r12;
      f.block_diagonal(k + 1, k + 1) = r22;
      f.blocks.push_back(2);
      k += 2;
    }
    f.pivot_log.push_back(std::move(rec));
  }
  return f;
}

}  // namespace

double pivot_growth_constant() { return (1.0 + std::sqrt(17.0)) / 8.0; }

bool PivotContext::is_large(double diagonal) const {
  return mu.has_value() && std::fabs(diagonal) >= 1.0 / (10.0 * *mu);
}

Matrix LdltFactorization::permutation() const {
  const std::size_t n = size();
  Matrix p(n, n);
  for (std::size_t k = 0; k < n; ++k) p(k, perm[k]) = Real::exact(1.0);
  return p;
}

// ---------------------------------------------------------------------------

CholeskyOutcome cholesky(const Matrix& a) {
  assert(a.rows() == a.cols());
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Real d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return CompletionFailure{j + 1, d.value()};
    const Real ljj = sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Real v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return CholeskyFactorization{std::move(l)};
}

Vector solve_cholesky(const CholeskyFactorization& f, std::span<const Real> b) {
  const Matrix& l = f.lower;
  const std::size_t n = l.rows();
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    Real v = y[i];
    for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
    y[i] = v / l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    Real v = y[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= l(k, i) * y[k];
    y[i] = v / l(i, i);
  }
  return y;
}

// ---------------------------------------------------------------------------

std::pair<Real, Real> solve_2x2(Real a11, Real a12, Real a21, Real a22, Real b1, Real b2, std::size_t index) {
  if (abs(a21) > abs(a11)) {
    std::swap(a11, a21);
    std::swap(a12, a22);
    std::swap(b1, b2);
  }
  if (a11 == 0.0) throw SingularPivot(index, "singular 2x2 pivot block at step " + std::to_string(index));
  const Real m = a21 / a11;
  const Real u22 = a22 - m * a12;
  const Real c2 = b2 - m * b1;
  if (u22 == 0.0) throw SingularPivot(index, "singular 2x2 pivot block at step " + std::to_string(index));
  const Real x2 = c2 / u22;
  const Real x1 = (b1 - a12 * x2) / a11;
  return {x1, x2};
}

LdltFactorization bunch_kaufman(const Matrix& t, const PivotContext& ctx) {
  const double nu = pivot_growth_constant();
  return diagonal_pivoting(t, ctx, [nu](const Matrix& a, std::size_t k) -> std::vector<std::size_t> {
    const std::size_t n = a.rows();
    if (k + 1 == n) return {k};
    // chi_1 and the (smallest) row index attaining it.
    double chi1 = 0.0;
    std::size_t r = k + 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(i, k).value());
      if (v > chi1) {
        chi1 = v;
        r = i;
      }
    }
    const double t11 = std::fabs(a(k, k).value());
    if (t11 >= nu * chi1) return {k};
    double chir = 0.0;
    for (std::size_t j = k; j < n; ++j) {
      if (j != r) chir = std::max(chir, std::fabs(a(r, j).value()));
    }
    if (chir * t11 >= nu * chi1 * chi1) return {k};
    if (std::fabs(a(r, r).value()) >= nu * chir) return {r};
    return {k, r};
  });
}

LdltFactorization bunch_parlett(const Matrix& t, const PivotContext& ctx) {
  const double nu = pivot_growth_constant();
  return diagonal_pivoting(t, ctx, [nu](const Matrix& a, std::size_t k) -> std::vector<std::size_t> {
    const std::size_t n = a.rows();
    double chi_off = 0.0;
    std::size_t r = k;
    std::size_t s = k;
    // Column-major scan of the strict lower triangle; first maximum wins.
    for (std::size_t j = k; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) {
        const double v = std::fabs(a(i, j).value());
        if (v > chi_off) {
          chi_off = v;
          r = i;
          s = j;
        }
      }
    double chi_diag = -1.0;
    std::size_t p = k;
    for (std::size_t i = k; i < n; ++i) {
      const double v = std::fabs(a(i, i).value());
      if (v > chi_diag) {
        chi_diag = v;
        p = i;
      }
    }
    if (chi_diag >= nu * chi_off) return {p};
    return {s, r};
  });
}

Vector solve_ldlt(const LdltFactorization& f, std::span<const Real> b) {
  const std::size_t n = f.size();
  assert(b.size() == n);
  Vector y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = b[f.perm[k]];
  for (std::size_t i = 0; i < n; ++i) {
    Real v = y[i];
    for (std::size_t k = 0; k < i; ++k) v -= f.lower(i, k) * y[k];
    y[i] = v;
  }
  std::size_t k = 0;
  for (std::size_t size : f.blocks) {
    if (size == 1) {
      const Real d = f.block_diagonal(k, k);
      if (d == 0.0) throw SingularPivot(k, "singular 1x1 block in solve");
      y[k] = y[k] / d;
    } else {
      const auto [x1, x2] = solve_2x2(f.block_diagonal(k, k), f.block_diagonal(k, k + 1), f.block_diagonal(k + 1, k),
                                      f.block_diagonal(k + 1, k + 1), y[k], y[k + 1], k);
      y[k] = x1;
      y[k + 1] = x2;
    }
    k += size;
  }
  for (std::size_t i = n; i-- > 0;) {
    Real v = y[i];
    for (std::size_t j = i + 1; j < n; ++j) v -= f.lower(j, i) * y[j];
    y[i] = v;
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[f.perm[i]] = y[i];
  return x;
}

namespace {

Matrix unpermute(const LdltFactorization& f, const Matrix& m) {
  const std::size_t n = f.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(f.perm[i], f.perm[j]) = m(i, j);
  return out;
}

Matrix native_product3(const Matrix& a, const Matrix& b, const Matrix& c) {
  precision::Scope native(precision::PrecisionConfig::native());
  return multiply(multiply(a, b), c);
}

}  // namespace

Matrix abs_reconstruction(const LdltFactorization& f) {
  const Matrix l = abs(f.lower);
  return unpermute(f, native_product3(l, abs(f.block_diagonal), l.transpose()));
}

Matrix reconstruct(const LdltFactorization& f) {
  return unpermute(f, native_product3(f.lower, f.block_diagonal, f.lower.transpose()));
}

// ---------------------------------------------------------------------------

GeppSolution gepp_solve(const Matrix& a_in, std::span<const Real> b_in) {
  assert(a_in.rows() == a_in.cols() && b_in.size() == a_in.rows());
  const std::size_t n = a_in.rows();
  Matrix a = a_in;
  Vector b(b_in.begin(), b_in.end());
  GeppSolution out;
  out.row_pivots.resize(n);
  if (n == 0) return out;

  // Column-oriented elimination: multipliers are formed by scaling with the
  // negated reciprocal pivot and stay in place (rows of earlier columns are
  // not swapped); every update is an axpy down a column.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(a(k, k).value());
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(i, k).value());
      if (v > best) {
        best = v;
        p = i;
      }
    }
    out.row_pivots[k] = p;
    if (best == 0.0) throw SingularMatrix(k, "zero pivot column " + std::to_string(k) + " in Gaussian elimination");
    std::swap(a(p, k), a(k, k));
    const Real t = -(Real::exact(1.0) / a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) = t * a(i, k);
    for (std::size_t j = k + 1; j < n; ++j) {
      const Real pivot_row = a(p, j);
      if (p != k) {
        a(p, j) = a(k, j);
        a(k, j) = pivot_row;
      }
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) = a(i, j) + pivot_row * a(i, k);
    }
  }
  out.row_pivots[n - 1] = n - 1;
  if (a(n - 1, n - 1) == 0.0) {
    throw SingularMatrix(n - 1, "zero pivot column " + std::to_string(n - 1) + " in Gaussian elimination");
  }

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t p = out.row_pivots[k];
    const Real t = b[p];
    if (p != k) {
      b[p] = b[k];
      b[k] = t;
    }
    for (std::size_t i = k + 1; i < n; ++i) b[i] = b[i] + t * a(i, k);
  }
  for (std::size_t k = n; k-- > 0;) {
    b[k] = b[k] / a(k, k);
    const Real t = -b[k];
    for (std::size_t i = 0; i < k; ++i) b[i] = b[i] + t * a(i, k);
  }
  out.x = std::move(b);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Appends unit vectors orthogonal to the existing columns until `m` is square.
void complete_orthonormal(std::vector<std::vector<double>>& cols, std::size_t dim) {
  for (std::size_t e = 0; e < dim && cols.size() < dim; ++e) {
    std::vector<double> v(dim, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& c : cols) {
        double proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += c[i] * v[i];
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * c[i];
      }
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > 1e-8) {
      for (double& x : v) x /= nrm;
      cols.push_back(std::move(v));
    }
  }
}

SvdResult jacobi_tall(const Matrix& a) {
  const std::size_t p = a.rows();
  const std::size_t q = a.cols();
  std::vector<std::vector<double>> w(q, std::vector<double>(p));
  std::vector<std::vector<double>> v(q, std::vector<double>(q, 0.0));
  double frob = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    v[j][j] = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
      w[j][i] = a(i, j).value();
      frob += w[j][i] * w[j][i];
    }
  }
  frob = std::sqrt(frob);
  const double off_tol = 1e-14 * frob;

  constexpr int kMaxSweeps = 100;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t i = 0; i + 1 < q; ++i) {
      for (std::size_t j = i + 1; j < q; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < p; ++r) {
          alpha += w[i][r] * w[i][r];
          beta += w[j][r] * w[j][r];
          gamma += w[i][r] * w[j][r];
        }
        if (gamma == 0.0 || std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta) ||
            std::fabs(gamma) <= off_tol * off_tol) {
          continue;
        }
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < p; ++r) {
          const double wi = w[i][r], wj = w[j][r];
          w[i][r] = c * wi - s * wj;
          w[j][r] = s * wi + c * wj;
        }
        for (std::size_t r = 0; r < q; ++r) {
          const double vi = v[i][r], vj = v[j][r];
          v[i][r] = c * vi - s * vj;
          v[j][r] = s * vi + c * vj;
        }
      }
    }
  }
  if (!converged) throw ConvergenceFailure("one-sided Jacobi SVD did not converge in 100 sweeps");

  std::vector<double> sig(q);
  for (std::size_t j = 0; j < q; ++j) {
    double s = 0.0;
    for (double x : w[j]) s += x * x;
    sig[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  SvdResult out;
  const double smax = q == 0 ? 0.0 : sig[order[0]];
  std::vector<std::vector<double>> left_cols;
  out.sigma.resize(q);
  out.right = Matrix(q, q);
  for (std::size_t k = 0; k < q; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = Real::exact(sig[j]);
    for (std::size_t r = 0; r < q; ++r) out.right(r, k) = Real::exact(v[j][r]);
    if (smax > 0.0 && sig[j] >= kRankCut * smax) {
      ++out.rank;
      std::vector<double> u(p);
      for (std::size_t r = 0; r < p; ++r) u[r] = w[j][r] / sig[j];
      left_cols.push_back(std::move(u));
    }
  }
  complete_orthonormal(left_cols, p);
  out.left = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t r = 0; r < p; ++r) out.left(r, k) = Real::exact(left_cols[k][r]);
  return out;
}

}  // namespace

SvdResult svd_small(const Matrix& a) {
  precision::Scope native(precision::PrecisionConfig::native());
  if (a.rows() >= a.cols()) return jacobi_tall(a);
  SvdResult t = jacobi_tall(a.transpose());
  std::swap(t.left, t.right);
  return t;
}

}  // namespace pdip::linalg
