#include "icr/metrics.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <map>

#include "icr/errors.hpp"

namespace icr::metrics {

MetricTriple delta(const MetricTriple& variant, const MetricTriple& baseline) {
  return MetricTriple{variant.ds - baseline.ds, variant.rc - baseline.rc,
                      variant.is - baseline.is};
}

namespace {

MetricTriple triple_of(const RunRecord& record) {
  return MetricTriple{record.ds, record.rc, record.is};
}

MetricTriple mean_of(const std::vector<MetricTriple>& triples) {
  MetricTriple sum;
  for (const auto& t : triples) {
    sum.ds += t.ds;
    sum.rc += t.rc;
    sum.is += t.is;
  }
  const double n = static_cast<double>(triples.size());
  return MetricTriple{sum.ds / n, sum.rc / n, sum.is / n};
}

}  // namespace

AggregateResult aggregate(const std::vector<RunRecord>& records,
                          const AggregateOptions& options) {
  AggregateResult result;

  // Route-keyed collections; map keeps route order deterministic.
  std::map<std::string, std::vector<MetricTriple>> baseline_by_route;
  std::map<FamilyTag, std::map<std::string, std::vector<MetricTriple>>> family_by_route;
  std::map<std::string, bool> route_has_variants;

  for (const RunRecord& record : records) {
    if (record.termination == Termination::AgentError) {
      ++result.excluded_agent_errors;
      continue;
    }
    const std::string& route_id = record.spec.route.route_id;
    if (!record.spec.family) {
      baseline_by_route[route_id].push_back(triple_of(record));
    } else {
      family_by_route[*record.spec.family][route_id].push_back(triple_of(record));
      route_has_variants[route_id] = true;
    }
  }

  for (const auto& [route_id, has] : route_has_variants) {
    if (has && baseline_by_route.find(route_id) == baseline_by_route.end()) {
      throw MissingBaselineError("route \"" + route_id +
                                 "\" has variant records but no baseline record");
    }
  }
  if (baseline_by_route.empty()) {
    throw MissingBaselineError("no baseline records present");
  }

  // Baseline: mean within route first, then unweighted over routes.
  std::vector<MetricTriple> per_route_baseline;
  per_route_baseline.reserve(baseline_by_route.size());
  for (const auto& [route_id, triples] : baseline_by_route) {
    per_route_baseline.push_back(mean_of(triples));
  }
  result.baseline_mean = mean_of(per_route_baseline);
  result.baseline_routes = static_cast<int>(per_route_baseline.size());

  for (FamilyTag family : kAllFamilies) {
    const auto it = family_by_route.find(family);
    if (it == family_by_route.end()) continue;

    FamilyReport report;
    report.family = family;
    report.n_routes = static_cast<int>(it->second.size());

    if (options.per_route_first) {
      std::vector<MetricTriple> per_route;
      for (const auto& [route_id, triples] : it->second) {
        per_route.push_back(mean_of(triples));
        report.n_runs += static_cast<int>(triples.size());
      }
      report.absolute = mean_of(per_route);
    } else {
      std::vector<MetricTriple> pooled;
      for (const auto& [route_id, triples] : it->second) {
        pooled.insert(pooled.end(), triples.begin(), triples.end());
      }
      report.n_runs = static_cast<int>(pooled.size());
      report.absolute = mean_of(pooled);
    }
    report.delta = delta(report.absolute, result.baseline_mean);
    result.reports.push_back(report);
  }
  return result;
}

TerminationSignature termination_signature(const std::vector<RunRecord>& records,
                                           std::optional<FamilyTag> family,
                                           const std::string& agent_tag) {
  int total = 0, rd = 0, to = 0;
  for (const RunRecord& record : records) {
    if (record.spec.family != family) continue;
    ++total;
    switch (record.termination) {
      case Termination::RouteDeviation:
        ++rd;
        break;
      case Termination::Timeout:
      case Termination::Blocked:
        ++to;
        break;
      default:
        break;
    }
  }
  if (total == 0) {
    throw EmptySelectionError(
        std::string("no records for family ") +
        (family ? std::string(1, family_letter(*family)) : "baseline") +
        " and agent \"" + agent_tag + "\"");
  }
  TerminationSignature signature;
  signature.family = family;
  signature.agent_tag = agent_tag;
  signature.rd_rate = static_cast<double>(rd) / total;
  signature.to_rate = static_cast<double>(to) / total;
  return signature;
}

std::string format_fixed(double value, int decimals) {
  // Scale, round to nearest even, then print the integer digits; IEEE
  // nearbyint under the default rounding mode is exactly half-to-even.
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  const double scaled = std::nearbyint(value * scale);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, scaled / scale);
  std::string out = buf;
  if (out == std::string("-0") || out.rfind("-0.", 0) == 0) {
    // Normalize negative zero output ("-0.00" -> "0.00").
    bool all_zero = true;
    for (char c : out) {
      if (c != '-' && c != '0' && c != '.') all_zero = false;
    }
    if (all_zero) out.erase(0, 1);
  }
  return out;
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "md" || name == "markdown") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  throw FormatError("unknown report format \"" + name + "\" (expected md or csv)");
}

namespace {

std::string family_label(std::optional<FamilyTag> family) {
  return family ? family_name(*family) : "Baseline";
}

struct Row {
  std::string label;
  MetricTriple absolute;
  std::optional<MetricTriple> delta;  // nullopt for the baseline row
  int n_runs = 0;
};

std::vector<Row> table_rows(const AggregateResult& agg) {
  std::vector<Row> rows;
  rows.push_back(
      {"Baseline", agg.baseline_mean, std::nullopt, agg.baseline_routes});
  for (const FamilyReport& report : agg.reports) {
    rows.push_back({family_name(report.family), report.absolute, report.delta,
                    report.n_runs});
  }
  return rows;
}

std::string signed_fixed(double value, int decimals) {
  const std::string s = format_fixed(value, decimals);
  if (!s.empty() && s[0] != '-' && s != "0.00" && s != "0.000") {
    return "+" + s;
  }
  return s;
}

}  // namespace

RenderedReport render_report(const AggregateResult& aggregate_result,
                             const std::vector<TerminationSignature>& signatures,
                             const std::vector<ReportFormat>& formats,
                             const std::string& agent_tag) {
  RenderedReport rendered;
  const std::vector<Row> rows = table_rows(aggregate_result);

  for (ReportFormat format : formats) {
    if (format == ReportFormat::Markdown) {
      std::string md;
      md += "# Instruction robustness report\n\n";
      md += "Agent: `" + agent_tag + "`\n\n";
      md += "Routes: " + std::to_string(aggregate_result.baseline_routes);
      if (aggregate_result.excluded_agent_errors > 0) {
        md += "  (agent-error runs excluded from means: " +
              std::to_string(aggregate_result.excluded_agent_errors) + ")";
      }
      md += "\n\n";
      md += "| Family | DS | RC | IS | dDS | dRC | dIS | Runs |\n";
      md += "|---|---|---|---|---|---|---|---|\n";
      for (const Row& row : rows) {
        md += "| " + row.label + " | " + format_fixed(row.absolute.ds, 2) +
              " | " + format_fixed(row.absolute.rc, 2) + " | " +
              format_fixed(row.absolute.is, 3) + " | ";
        if (row.delta) {
          md += signed_fixed(row.delta->ds, 2) + " | " +
                signed_fixed(row.delta->rc, 2) + " | " +
                signed_fixed(row.delta->is, 3);
        } else {
          md += "--- | --- | ---";
        }
        md += " | " + std::to_string(row.n_runs) + " |\n";
      }
      if (!signatures.empty()) {
        md += "\n## Termination signatures (RD vs TO)\n\n";
        md += "| Family | Agent | RD rate | TO rate |\n";
        md += "|---|---|---|---|\n";
        for (const TerminationSignature& s : signatures) {
          md += "| " + family_label(s.family) + " | " + s.agent_tag + " | " +
                format_fixed(s.rd_rate, 3) + " | " + format_fixed(s.to_rate, 3) +
                " |\n";
        }
      }
      rendered.markdown = std::move(md);
    } else {
      std::string csv;
      csv += "family,ds,rc,is,delta_ds,delta_rc,delta_is,n_runs\n";
      for (const Row& row : rows) {
        csv += row.label + "," + format_fixed(row.absolute.ds, 2) + "," +
               format_fixed(row.absolute.rc, 2) + "," +
               format_fixed(row.absolute.is, 3) + ",";
        if (row.delta) {
          csv += format_fixed(row.delta->ds, 2) + "," +
                 format_fixed(row.delta->rc, 2) + "," +
                 format_fixed(row.delta->is, 3);
        } else {
          csv += ",,";
        }
        csv += "," + std::to_string(row.n_runs) + "\n";
      }
      rendered.csv = std::move(csv);

      std::string sig;
      sig += "family,agent,rd_rate,to_rate\n";
      for (const TerminationSignature& s : signatures) {
        sig += family_label(s.family) + "," + s.agent_tag + "," +
               format_fixed(s.rd_rate, 3) + "," + format_fixed(s.to_rate, 3) +
               "\n";
      }
      rendered.signatures_csv = std::move(sig);
    }
  }
  return rendered;
}

}  // namespace icr::metrics
