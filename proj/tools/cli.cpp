#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

namespace pdip::cli {
namespace {

namespace fs = std::filesystem;

template <class F>
auto convert(const std::string& flag, const std::string& token, F&& f) {
  try {
    return f(token);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": invalid value '" + token + "': " + e.what());
  }
}

driver::CentralityParams parse_centrality(const std::string& token) {
  std::vector<double> values;
  std::stringstream ss(token);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double v = std::stod(part, &used);
    if (used != part.size()) throw std::invalid_argument("not a number: " + part);
    values.push_back(v);
  }
  if (values.size() != 3) throw std::invalid_argument("expected C,gamma,tau");
  driver::CentralityParams p{values[0], values[1], values[2]};
  driver::validate(p);
  return p;
}

void check_bits(const std::string& flag, int bits) {
  if (bits < precision::kMinMantissaBits || bits > precision::kMaxMantissaBits) {
    throw UsageError(flag + ": invalid value '" + std::to_string(bits) + "': mantissa bits must lie in [" +
                     std::to_string(precision::kMinMantissaBits) + ", " +
                     std::to_string(precision::kMaxMantissaBits) + "]");
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw std::ios_base::failure("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw std::ios_base::failure("write to " + path.string() + " failed");
}

}  // namespace

ParseResult parse_args(const std::vector<std::string>& args) {
  ParseResult result;
  RunSpec& spec = result.spec;

  CLI::App app{"Local-phase primal-dual interior-point runs with finite-precision diagnostics", "pdip"};
  app.set_help_flag("-h,--help", "Print this help and exit");

  std::string formulation = "condensed", solver, t_rule = "mu-squared", output = "md", centrality = "10,0.1,0.25";
  double sigma = 0.0, mu_stop_value = 0.0;
  std::string emit_dir, trace_dir;
  std::vector<std::string> sweep_solver;

  app.add_option("--problem", spec.problem, "Problem key: two-circles, two-circles-mod, scalar-quadratic")
      ->capture_default_str();
  app.add_option("--formulation", formulation, "Step system: full, augmented, condensed")->capture_default_str();
  app.add_option("--solver", solver,
                 "Linear solver: cholesky, bunch-kaufman, bunch-parlett, gepp "
                 "[default: cholesky for condensed, bunch-kaufman for augmented, gepp for full]");
  app.add_option("--t-rule", t_rule, "Deviation t: mu-squared (t = mu^2 e) or centering (t = sigma mu e)")
      ->capture_default_str();
  app.add_option("--sigma", sigma, "Centering parameter for --t-rule centering, in [0, 1]")->capture_default_str();
  app.add_option("--mantissa-bits", spec.mantissa_bits, "Significand bits p in [11, 53]; 53 is native double")
      ->capture_default_str();
  app.add_option("--step-fraction", spec.step_fraction, "Fraction of the maximum step taken, in [0, 1)")
      ->capture_default_str();
  app.add_option("--max-iters", spec.max_iters, "Iteration cap")->capture_default_str();
  auto* mu_stop = app.add_option("--mu-stop", mu_stop_value, "Stop once mu <= this [default: max(1e4 * 2^-p, 1e-17)]");
  app.add_option("--centrality", centrality, "Centrality bounds C,gamma,tau")->capture_default_str();
  app.add_option("--output", output, "Table format: md, csv, json")->capture_default_str();
  auto* emit = app.add_option("--emit-table", emit_dir, "Directory for table files (default: print to stdout)");
  auto* trace = app.add_option("--trace", trace_dir, "Directory for JSON trace files");
  app.add_option("--sweep-solver", sweep_solver, "Comma-separated solvers to sweep")->delimiter(',');
  app.add_option("--sweep-bits", spec.sweep_bits, "Comma-separated mantissa widths to sweep")->delimiter(',');

  std::vector<std::string> rest = args;
  if (!rest.empty() && rest.front() == "run") rest.erase(rest.begin());
  std::vector<std::string> reversed(rest.rbegin(), rest.rend());

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.help = true;
    result.help_text = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  spec.formulation = convert("--formulation", formulation, stepgen::parse_formulation);
  if (!solver.empty()) spec.solver = convert("--solver", solver, stepgen::parse_solver);
  if (t_rule == "mu-squared") {
    if (sigma != 0.0) throw UsageError("--sigma: only meaningful with --t-rule centering");
    spec.t_rule = stepgen::TRule::mu_squared();
  } else if (t_rule == "centering") {
    spec.t_rule = convert("--sigma", std::to_string(sigma), [&](const std::string&) {
      return stepgen::TRule::centering(sigma);
    });
  } else {
    throw UsageError("--t-rule: invalid value '" + t_rule + "' (expected mu-squared or centering)");
  }
  check_bits("--mantissa-bits", spec.mantissa_bits);
  for (int b : spec.sweep_bits) check_bits("--sweep-bits", b);
  if (!(spec.step_fraction >= 0.0 && spec.step_fraction < 1.0)) {
    throw UsageError("--step-fraction: invalid value '" + std::to_string(spec.step_fraction) + "': must lie in [0, 1)");
  }
  if (spec.max_iters < 0) throw UsageError("--max-iters: invalid value '" + std::to_string(spec.max_iters) + "'");
  if (mu_stop->count() > 0) {
    if (!(mu_stop_value >= 0.0)) throw UsageError("--mu-stop: invalid value '" + std::to_string(mu_stop_value) + "'");
    spec.mu_stop = mu_stop_value;
  }
  spec.centrality = convert("--centrality", centrality, parse_centrality);
  spec.output = convert("--output", output, diagnostics::parse_table_format);
  if (emit->count() > 0) spec.emit_table_dir = emit_dir;
  if (trace->count() > 0) spec.trace_dir = trace_dir;
  for (const auto& s : sweep_solver) spec.sweep_solver.push_back(convert("--sweep-solver", s, stepgen::parse_solver));
  convert("--problem", spec.problem, [](const std::string& key) { return make_problem(key); });

  expand(spec);
  return result;
}

std::vector<RunElement> expand(const RunSpec& spec) {
  std::vector<std::optional<stepgen::Solver>> solvers;
  if (spec.sweep_solver.empty()) {
    solvers.push_back(spec.solver);
  } else {
    solvers.assign(spec.sweep_solver.begin(), spec.sweep_solver.end());
  }
  const std::vector<int> bits = spec.sweep_bits.empty() ? std::vector<int>{spec.mantissa_bits} : spec.sweep_bits;

  std::vector<RunElement> elements;
  for (const auto& solver : solvers) {
    for (int b : bits) {
      RunElement e;
      e.step.formulation = spec.formulation;
      e.step.solver = solver;
      e.step.t_rule = spec.t_rule;
      e.mantissa_bits = b;
      e.mu_stop = spec.mu_stop.value_or(driver::StopCriteria::default_mu_min(b));
      try {
        stepgen::validate(e.step);
      } catch (const std::invalid_argument& err) {
        throw UsageError(std::string("--solver: invalid value '") + std::string(to_string(e.step.effective_solver())) +
                         "': " + err.what());
      }
      elements.push_back(e);
    }
  }
  return elements;
}

std::string output_stem(const std::string& problem, const RunElement& element) {
  return problem + "_" + std::string(stepgen::to_string(element.step.formulation)) + "_" +
         std::string(stepgen::to_string(element.step.effective_solver())) + "_p" +
         std::to_string(element.mantissa_bits);
}

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const std::vector<RunElement> elements = expand(spec);
  const ProblemInstance inst = make_problem(spec.problem);
  int status = kOk;

  for (const RunElement& element : elements) {
    const auto pcfg = precision::PrecisionConfig::with_bits(element.mantissa_bits);
    driver::StopCriteria stop;
    stop.mu_min = element.mu_stop;
    stop.max_iters = spec.max_iters;
    stop.step_fraction = spec.step_fraction;

    driver::IterationTrace trace;
    {
      precision::Scope scope(pcfg);
      trace = driver::run(*inst.problem, &inst.known, driver::default_start(spec.problem), element.step,
                          spec.centrality, pcfg, stop);
    }

    const std::string stem = output_stem(spec.problem, element);
    const std::string table = diagnostics::emit_table(trace, &inst.known, spec.output);
    try {
      if (spec.emit_table_dir) {
        write_file(fs::path(*spec.emit_table_dir) / (stem + "." + std::string(diagnostics::extension(spec.output))),
                   table);
      } else {
        if (elements.size() > 1) out << "# " << stem << "\n";
        out << table;
      }
      if (spec.trace_dir) write_file(fs::path(*spec.trace_dir) / (stem + ".json"), diagnostics::trace_json(trace));
    } catch (const std::ios_base::failure& e) {
      err << "pdip: " << e.what() << "\n";
      return kIoFailure;
    }

    if (trace.failed()) {
      err << "pdip: " << stem << ": " << driver::to_string(trace.termination) << ": " << trace.message << "\n";
      status = kSolverFailure;
    }
  }
  out.flush();
  if (!out) {
    err << "pdip: writing to standard output failed\n";
    return kIoFailure;
  }
  return status;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParseResult parsed;
  try {
    parsed = parse_args(args);
  } catch (const UsageError& e) {
    err << "pdip: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }
  if (parsed.help) {
    out << parsed.help_text;
    return kOk;
  }
  return execute(parsed.spec, out, err);
}

}  // namespace pdip::cli
