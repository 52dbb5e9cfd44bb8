#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdip/driver.hpp"
#include "pdip/problems.hpp"

// Trace-level audits and table rendering.
namespace pdip::diagnostics {

// Window of duality measures over which asymptotic statements are audited.
inline constexpr double kWindowMuLow = 1e-12;
inline constexpr double kWindowMuHigh = 1e-2;

bool in_window(double mu);

struct FamilyRange {
  std::string name;  // "s_B/mu", "lambda_B", "s_N", "lambda_N/mu"
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
  bool pass = false;

  double spread() const;  // max / min
};

struct ThetaAudit {
  std::vector<FamilyRange> families;
  std::size_t window_iterations = 0;
  double max_spread = 1e3;
  bool pass = false;
};

// Checks that s_B and lambda_N scale like mu while lambda_B and s_N stay
// bounded away from zero over the window records of `trace`. Families with
// no members (e.g. N empty) are omitted. Throws std::invalid_argument when
// the problem is not strictly complementary.
ThetaAudit theta_mu_audit(const driver::IterationTrace& trace, const KnownSolution& known);

// One rendered table row. Cells are stored already rounded to display
// precision; cells missing on the terminal record are empty.
struct TableRow {
  int iter = 0;
  double log_mu = 0.0;
  std::optional<double> log_dz;
  std::optional<double> log_u;
  std::optional<double> log_v;
  std::optional<double> alpha_max;
  std::vector<double> lambda;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

std::vector<TableRow> table_rows(const driver::IterationTrace& trace, const KnownSolution* known);

enum class TableFormat { kMarkdown, kCsv, kJson };
std::string_view to_string(TableFormat f);
std::string_view extension(TableFormat f);
TableFormat parse_table_format(std::string_view s);

std::string emit_table(const std::vector<TableRow>& rows, TableFormat format);
std::string emit_table(const driver::IterationTrace& trace, const KnownSolution* known, TableFormat format);

// Inverse of emit_table(..., kJson). Throws std::invalid_argument on
// malformed input.
std::vector<TableRow> parse_table_json(std::string_view text);

// Full trace as JSON: configuration, every record and the termination.
std::string trace_json(const driver::IterationTrace& trace);

}  // namespace pdip::diagnostics
