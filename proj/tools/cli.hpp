#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdip/driver.hpp"
#include "pdip/report.hpp"
#include "pdip/stepgen.hpp"

namespace pdip::cli {

enum ExitStatus : int { kOk = 0, kUsage = 2, kSolverFailure = 3, kIoFailure = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string problem = "two-circles";
  stepgen::Formulation formulation = stepgen::Formulation::kCondensed;
  std::optional<stepgen::Solver> solver;
  stepgen::TRule t_rule;
  int mantissa_bits = 53;
  double step_fraction = 0.99;
  int max_iters = 12;
  std::optional<double> mu_stop;  // unset: StopCriteria::default_mu_min(bits)
  driver::CentralityParams centrality;
  diagnostics::TableFormat output = diagnostics::TableFormat::kMarkdown;
  std::optional<std::string> emit_table_dir;
  std::optional<std::string> trace_dir;
  std::vector<stepgen::Solver> sweep_solver;
  std::vector<int> sweep_bits;
};

// One element of the (solver x bits) sweep.
struct RunElement {
  stepgen::StepConfig step;
  int mantissa_bits = 53;
  double mu_stop = 0.0;
};

struct ParseResult {
  RunSpec spec;
  bool help = false;
  std::string help_text;
};

// Accepts an optional leading "run". Throws UsageError naming the offending
// token for unknown flags and out-of-range values.
ParseResult parse_args(const std::vector<std::string>& args);

// Cartesian expansion of the sweeps, each element validated. Throws
// UsageError on the first invalid combination.
std::vector<RunElement> expand(const RunSpec& spec);

// <problem>_<formulation>_<solver>_p<bits>
std::string output_stem(const std::string& problem, const RunElement& element);

// Runs every element. Without --emit-table/--trace the tables go to `out`.
int execute(const RunSpec& spec, std::ostream& out, std::ostream& err);

// parse_args + execute with exit-status mapping.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdip::cli
