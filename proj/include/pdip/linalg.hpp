#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pdip/dense.hpp"

namespace pdip::linalg {

// Pivot threshold for diagonal pivoting: nu = (1 + sqrt(17)) / 8.
double pivot_growth_constant();

class SingularPivot : public std::runtime_error {
 public:
  SingularPivot(std::size_t index, const std::string& what) : std::runtime_error(what), index_(index) {}
  // Zero-based position in the pivot sequence.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class SingularMatrix : public std::runtime_error {
 public:
  SingularMatrix(std::size_t column, const std::string& what) : std::runtime_error(what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Cholesky

struct CholeskyFactorization {
  Matrix lower;
};

// The factorization hit a nonpositive pivot. `pivot` is one-based.
struct CompletionFailure {
  std::size_t pivot = 0;
  double value = 0.0;
};

using CholeskyOutcome = std::variant<CholeskyFactorization, CompletionFailure>;

// Column-oriented Cholesky reading only the lower triangle of `a`.
CholeskyOutcome cholesky(const Matrix& a);
Vector solve_cholesky(const CholeskyFactorization& f, std::span<const Real> b);

// ---------------------------------------------------------------------------
// Symmetric indefinite LDL^T with 1x1 and 2x2 pivots

enum class PivotKind { kOneByOneSmall, kTwoByTwo, kOneByOneLarge };
enum class MagnitudeClass { kOrderOne, kInverseMu };

struct PivotRecord {
  PivotKind kind = PivotKind::kOneByOneSmall;
  std::vector<std::size_t> indices;  // original (zero-based) row indices
  MagnitudeClass magnitude = MagnitudeClass::kOrderOne;
  // Diagonal values of the reduced matrix at the moment of selection.
  std::vector<double> diagonals;
};

// Without a mu context every pivot is classified O(1). With one, a diagonal
// of the reduced matrix is Theta(1/mu) when |T_ii| >= 1 / (10 mu).
struct PivotContext {
  std::optional<double> mu;
  bool is_large(double diagonal) const;
};

struct LdltFactorization {
  // Row k of P T P^T is row perm[k] of T.
  std::vector<std::size_t> perm;
  Matrix lower;                     // unit lower triangular
  Matrix block_diagonal;            // Y
  std::vector<std::size_t> blocks;  // block sizes in pivot order (1 or 2)
  std::vector<PivotRecord> pivot_log;
  // Largest |entry| of the reduced matrix before each elimination step,
  // preceded by the initial max; used for growth audits.
  std::vector<double> reduced_max;

  std::size_t size() const { return perm.size(); }
  Matrix permutation() const;  // P with (P T P^T) = P * T * P^T
};

LdltFactorization bunch_kaufman(const Matrix& t, const PivotContext& ctx = {});
LdltFactorization bunch_parlett(const Matrix& t, const PivotContext& ctx = {});

// Solves T x = b from P T P^T = L Y L^T; 2x2 blocks are solved by Gaussian
// elimination with partial pivoting.
Vector solve_ldlt(const LdltFactorization& f, std::span<const Real> b);

// P^T |L| |Y| |L^T| P, evaluated in native arithmetic.
Matrix abs_reconstruction(const LdltFactorization& f);
// P^T L Y L^T P, evaluated in native arithmetic.
Matrix reconstruct(const LdltFactorization& f);

// Solves a 2x2 system by partial pivoting. Throws SingularPivot(index).
std::pair<Real, Real> solve_2x2(Real a11, Real a12, Real a21, Real a22, Real b1, Real b2,
                                std::size_t index);

// ---------------------------------------------------------------------------
// Gaussian elimination with partial pivoting

struct GeppSolution {
  Vector x;
  std::vector<std::size_t> row_pivots;  // row swapped into position k at step k
};

GeppSolution gepp_solve(const Matrix& a, std::span<const Real> b);

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD for small matrices

inline constexpr double kRankCut = 1e-8;

// A = left * diag(sigma) * right^T with square orthogonal factors; sigma has
// min(rows, cols) entries, descending. `rank` counts sigma_i >= kRankCut *
// sigma_max.
struct SvdResult {
  Matrix left;
  Vector sigma;
  Matrix right;
  std::size_t rank = 0;
};

SvdResult svd_small(const Matrix& a);

}  // namespace pdip::linalg
