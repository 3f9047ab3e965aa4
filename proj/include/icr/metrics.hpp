#pragma once

#include <optional>
#include <string>
#include <vector>

#include "icr/harness.hpp"
#include "icr/model.hpp"

namespace icr::metrics {

using harness::RunRecord;
using harness::Termination;

struct MetricTriple {
  double ds = 0.0;  // [0, 100]
  double rc = 0.0;  // [0, 100]
  double is = 0.0;  // [0, 1]

  bool operator==(const MetricTriple&) const = default;
};

// Componentwise variant minus baseline.
MetricTriple delta(const MetricTriple& variant, const MetricTriple& baseline);

// Per-family aggregate over runs: absolute means plus deltas against the
// baseline mean. delta.x == absolute.x - baseline_mean.x exactly.
struct FamilyReport {
  FamilyTag family = FamilyTag::P;
  MetricTriple absolute;
  MetricTriple delta;
  int n_runs = 0;
  int n_routes = 0;
};

struct AggregateResult {
  MetricTriple baseline_mean;  // unweighted mean over routes
  int baseline_routes = 0;
  std::vector<FamilyReport> reports;  // ordered P, A, N, M (present families)
  int excluded_agent_errors = 0;      // AgentError runs never enter a mean
};

struct AggregateOptions {
  // Family absolute means pool all (route, variant) runs by default; with
  // per_route_first each route is averaged before averaging across routes.
  bool per_route_first = false;
};

// Throws MissingBaselineError when a route has variant records but no
// baseline record.
AggregateResult aggregate(const std::vector<RunRecord>& records,
                          const AggregateOptions& options = AggregateOptions{});

// Fraction of runs ending in RouteDeviation (RD) vs Timeout/Blocked (TO) for
// one (family, agent) selection; family nullopt selects baseline runs.
struct TerminationSignature {
  std::optional<FamilyTag> family;
  std::string agent_tag;
  double rd_rate = 0.0;
  double to_rate = 0.0;
};

// Throws EmptySelectionError when no record matches.
TerminationSignature termination_signature(const std::vector<RunRecord>& records,
                                           std::optional<FamilyTag> family,
                                           const std::string& agent_tag);

// Half-to-even fixed-point formatting; DS/RC print at 2 decimals, IS at 3.
std::string format_fixed(double value, int decimals);

enum class ReportFormat { Markdown, Csv };

// "md" or "csv"; anything else throws FormatError.
ReportFormat report_format_from_name(const std::string& name);

struct RenderedReport {
  std::optional<std::string> markdown;        // report.md
  std::optional<std::string> csv;             // report.csv
  std::optional<std::string> signatures_csv;  // signatures.csv, with csv
};

// Markdown/CSV tables with DS/RC/IS absolute and delta columns, one row per
// family plus a Baseline row whose delta cells read "---" (empty in CSV), and
// a (family, agent, rd_rate, to_rate) point list for the termination-
// signature plot.
RenderedReport render_report(const AggregateResult& aggregate_result,
                             const std::vector<TerminationSignature>& signatures,
                             const std::vector<ReportFormat>& formats,
                             const std::string& agent_tag);

}  // namespace icr::metrics
