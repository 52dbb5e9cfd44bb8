#include "pdip/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pdip::diagnostics {
namespace {

using json = nlohmann::json;

double round_to(double x, double scale) { return std::round(x * scale) / scale + 0.0; }

std::optional<double> log_cell(double x) {
  const double v = log10_rounded(x);
  if (!std::isfinite(v)) return std::nullopt;
  return v + 0.0;
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x + 0.0);
  return buf;
}

std::string cell(const std::optional<double>& x, int decimals) { return x ? fixed(*x, decimals) : std::string(); }

std::string lambda_cell(const std::vector<double>& lambda) {
  std::string out = "(";
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (i > 0) out += ",";
    out += fixed(lambda[i], 2);
  }
  return out + ")";
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json vector_json(const Vector& v) { return json(to_doubles(v)); }

json centrality_json(const driver::CentralityStatus& c) {
  return {{"rf_ratio", c.rf_ratio},           {"rg_ratio", c.rg_ratio}, {"min_product_ratio", c.min_product_ratio},
          {"satisfied", c.satisfied()},       {"rf_ok", c.rf_ok},       {"rg_ok", c.rg_ok},
          {"product_ok", c.product_ok}};
}

std::string_view to_string(linalg::PivotKind k) {
  switch (k) {
    case linalg::PivotKind::kOneByOneSmall: return "1x1-small";
    case linalg::PivotKind::kTwoByTwo: return "2x2";
    case linalg::PivotKind::kOneByOneLarge: return "1x1-large";
  }
  return "?";
}

}  // namespace

bool in_window(double mu) { return mu >= kWindowMuLow && mu <= kWindowMuHigh; }

double FamilyRange::spread() const { return min > 0.0 ? max / min : std::numeric_limits<double>::infinity(); }

ThetaAudit theta_mu_audit(const driver::IterationTrace& trace, const KnownSolution& known) {
  if (!known.strictly_complementary) {
    throw std::invalid_argument("theta_mu_audit requires a strictly complementary problem");
  }
  FamilyRange s_b{"s_B/mu"}, lambda_b{"lambda_B"}, s_n{"s_N"}, lambda_n{"lambda_N/mu"};
  auto add = [](FamilyRange& f, double v) {
    if (f.samples == 0) {
      f.min = f.max = v;
    } else {
      f.min = std::min(f.min, v);
      f.max = std::max(f.max, v);
    }
    ++f.samples;
  };

  ThetaAudit audit;
  for (const auto& rec : trace.records) {
    const double mu = rec.residuals.mu.value();
    if (!in_window(mu)) continue;
    ++audit.window_iterations;
    for (std::size_t i : known.active) {
      add(s_b, rec.iterate.s[i].value() / mu);
      add(lambda_b, rec.iterate.lambda[i].value());
    }
    for (std::size_t i : known.inactive) {
      add(s_n, rec.iterate.s[i].value());
      add(lambda_n, rec.iterate.lambda[i].value() / mu);
    }
  }

  audit.pass = audit.window_iterations > 0;
  for (FamilyRange* f : {&s_b, &lambda_b, &s_n, &lambda_n}) {
    if (f->samples == 0) continue;
    f->pass = f->min > 0.0 && f->spread() <= audit.max_spread;
    audit.pass = audit.pass && f->pass;
    audit.families.push_back(*f);
  }
  return audit;
}

std::vector<TableRow> table_rows(const driver::IterationTrace& trace, const KnownSolution* known) {
  std::vector<TableRow> rows;
  rows.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    TableRow row;
    row.iter = rec.index;
    row.log_mu = log_cell(rec.residuals.mu.value()).value_or(-std::numeric_limits<double>::infinity());
    for (Real l : rec.iterate.lambda) row.lambda.push_back(round_to(l.value(), 100.0));
    if (rec.step) {
      row.log_dz = log_cell(norm2(rec.step->dz));
      if (rec.projection) {
        row.log_u = log_cell(rec.projection->u_component);
        row.log_v = log_cell(rec.projection->v_component);
      } else if (known != nullptr) {
        const ProjectionReport p = project_multiplier_step(*rec.step, *known);
        row.log_u = log_cell(p.u_component);
        row.log_v = log_cell(p.v_component);
      }
      row.alpha_max = round_to(rec.alpha_max, 1e4);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view to_string(TableFormat f) {
  switch (f) {
    case TableFormat::kMarkdown: return "md";
    case TableFormat::kCsv: return "csv";
    case TableFormat::kJson: return "json";
  }
  return "?";
}

std::string_view extension(TableFormat f) { return to_string(f); }

TableFormat parse_table_format(std::string_view s) {
  if (s == "md") return TableFormat::kMarkdown;
  if (s == "csv") return TableFormat::kCsv;
  if (s == "json") return TableFormat::kJson;
  throw std::invalid_argument("unknown output format '" + std::string(s) + "' (expected md, csv or json)");
}

std::string emit_table(const std::vector<TableRow>& rows, TableFormat format) {
  std::ostringstream out;
  switch (format) {
    case TableFormat::kMarkdown:
      out << "| iter | log mu | log ||dz|| | log ||U^T dlambda_B|| | log ||V^T dlambda_B|| | alpha_max | lambda^T |\n";
      out << "|---:|---:|---:|---:|---:|---:|:---|\n";
      for (const auto& r : rows) {
        out << "| " << r.iter << " | " << fixed(r.log_mu, 1) << " | " << cell(r.log_dz, 1) << " | "
            << cell(r.log_u, 1) << " | " << cell(r.log_v, 1) << " | " << cell(r.alpha_max, 4) << " | "
            << lambda_cell(r.lambda) << " |\n";
      }
      break;
    case TableFormat::kCsv: {
      const std::size_t m = rows.empty() ? 0 : rows.front().lambda.size();
      out << "iter,log_mu,log_dz,log_u,log_v,alpha_max";
      for (std::size_t i = 0; i < m; ++i) out << ",lambda_" << i + 1;
      out << "\n";
      for (const auto& r : rows) {
        out << r.iter << "," << fixed(r.log_mu, 1) << "," << cell(r.log_dz, 1) << "," << cell(r.log_u, 1) << ","
            << cell(r.log_v, 1) << "," << cell(r.alpha_max, 4);
        for (double l : r.lambda) out << "," << fixed(l, 2);
        out << "\n";
      }
      break;
    }
    case TableFormat::kJson: {
      json arr = json::array();
      for (const auto& r : rows) {
        arr.push_back({{"iter", r.iter},
                       {"log_mu", r.log_mu},
                       {"log_dz", optional_number(r.log_dz)},
                       {"log_u", optional_number(r.log_u)},
                       {"log_v", optional_number(r.log_v)},
                       {"alpha_max", optional_number(r.alpha_max)},
                       {"lambda", r.lambda}});
      }
      out << json{{"rows", arr}}.dump(2) << "\n";
      break;
    }
  }
  return out.str();
}

std::string emit_table(const driver::IterationTrace& trace, const KnownSolution* known, TableFormat format) {
  return emit_table(table_rows(trace, known), format);
}

std::vector<TableRow> parse_table_json(std::string_view text) {
  std::vector<TableRow> rows;
  try {
    const json doc = json::parse(text);
    for (const auto& j : doc.at("rows")) {
      TableRow r;
      r.iter = j.at("iter").get<int>();
      r.log_mu = j.at("log_mu").get<double>();
      r.log_dz = read_optional(j, "log_dz");
      r.log_u = read_optional(j, "log_u");
      r.log_v = read_optional(j, "log_v");
      r.alpha_max = read_optional(j, "alpha_max");
      r.lambda = j.at("lambda").get<std::vector<double>>();
      rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed table JSON: ") + e.what());
  }
  return rows;
}

std::string trace_json(const driver::IterationTrace& trace) {
  const auto& cfg = trace.step_config;
  json doc;
  doc["problem"] = trace.problem;
  doc["formulation"] = stepgen::to_string(cfg.formulation);
  doc["solver"] = stepgen::to_string(cfg.effective_solver());
  doc["t_rule"] = cfg.t_rule.kind == stepgen::TRule::Kind::kMuSquared ? "mu-squared" : "centering";
  doc["sigma"] = cfg.t_rule.sigma;
  doc["mantissa_bits"] = trace.precision.mantissa_bits;
  doc["emulated"] = trace.precision.rounds();
  doc["step_fraction"] = trace.stop.step_fraction;
  doc["max_iters"] = trace.stop.max_iters;
  doc["mu_stop"] = trace.stop.mu_min;
  doc["centrality"] = {{"c", trace.centrality.c}, {"gamma", trace.centrality.gamma}, {"tau", trace.centrality.tau}};
  doc["termination"] = driver::to_string(trace.termination);
  doc["message"] = trace.message;

  json records = json::array();
  for (const auto& rec : trace.records) {
    json r;
    r["index"] = rec.index;
    r["z"] = vector_json(rec.iterate.z);
    r["lambda"] = vector_json(rec.iterate.lambda);
    r["s"] = vector_json(rec.iterate.s);
    r["mu"] = rec.residuals.mu.value();
    r["r_f"] = vector_json(rec.residuals.r_f);
    r["r_g"] = vector_json(rec.residuals.r_g);
    r["centrality"] = centrality_json(rec.centrality);
    r["relaxed_centrality"] = centrality_json(rec.relaxed_centrality);
    if (rec.step) {
      r["step"] = {{"dz", vector_json(rec.step->dz)},
                   {"dlambda", vector_json(rec.step->dlambda)},
                   {"ds", vector_json(rec.step->ds)}};
      r["alpha_max"] = rec.alpha_max;
      r["alpha_taken"] = rec.alpha_taken;
    }
    if (rec.projection) {
      const auto& p = *rec.projection;
      r["projection"] = {{"u_component", p.u_component}, {"v_component", p.v_component},
                         {"dz_norm", p.dz_norm},         {"ds_norm", p.ds_norm},
                         {"dlambda_b_norm", p.dlambda_b_norm}, {"dlambda_n_norm", p.dlambda_n_norm}};
    }
    json pivots = json::array();
    for (const auto& pr : rec.pivot_log) {
      pivots.push_back({{"kind", to_string(pr.kind)},
                        {"indices", pr.indices},
                        {"magnitude", pr.magnitude == linalg::MagnitudeClass::kInverseMu ? "inverse-mu" : "order-one"},
                        {"diagonals", pr.diagonals}});
    }
    r["pivots"] = std::move(pivots);
    records.push_back(std::move(r));
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

}  // namespace pdip::diagnostics
