#pragma once

#include "icr/model.hpp"

// Frozen robustness-table fixtures: absolute per-family means plus the
// printed deltas for two reference agents on a short and a full benchmark
// split; the acceptance suite must reproduce every printed delta from the
// absolute columns.
namespace icr_test {

struct TableBaseline {
  const char* agent;
  const char* split;
  double ds, rc, is;
};

struct TableRow {
  const char* agent;
  const char* split;
  icr::FamilyTag family;
  double ds, rc, is;           // absolute means
  double d_ds, d_rc, d_is;     // printed deltas vs baseline
};

inline constexpr TableBaseline kTableBaselines[] = {
    {"agent-a", "short", 70.40, 74.92, 0.935},
    {"agent-b", "short", 70.20, 81.30, 0.874},
    {"agent-a", "full", 35.63, 44.25, 0.821},
    {"agent-b", "full", 48.90, 59.70, 0.820},
};

inline constexpr TableRow kTableRows[] = {
    // Short split.
    {"agent-a", "short", icr::FamilyTag::P, 55.46, 59.58, 0.934, -14.94, -15.34, -0.001},
    {"agent-a", "short", icr::FamilyTag::A, 55.22, 57.66, 0.935, -15.18, -17.26, 0.000},
    {"agent-a", "short", icr::FamilyTag::N, 56.03, 62.66, 0.895, -14.37, -12.26, -0.040},
    {"agent-a", "short", icr::FamilyTag::M, 36.76, 45.50, 0.855, -33.64, -29.42, -0.080},
    {"agent-b", "short", icr::FamilyTag::P, 61.22, 69.35, 0.886, -8.98, -11.95, 0.012},
    {"agent-b", "short", icr::FamilyTag::A, 60.44, 62.03, 0.973, -9.76, -19.27, 0.099},
    {"agent-b", "short", icr::FamilyTag::N, 69.67, 76.18, 0.916, -0.53, -5.12, 0.042},
    {"agent-b", "short", icr::FamilyTag::M, 37.70, 43.32, 0.861, -32.50, -37.98, -0.013},
    // Full split.
    {"agent-a", "full", icr::FamilyTag::P, 40.75, 47.77, 0.831, 5.11, 3.51, 0.010},
    {"agent-a", "full", icr::FamilyTag::A, 28.54, 33.83, 0.807, -7.10, -10.42, -0.014},
    {"agent-a", "full", icr::FamilyTag::N, 45.07, 59.76, 0.807, 9.44, 15.50, -0.014},
    {"agent-a", "full", icr::FamilyTag::M, 31.24, 40.04, 0.806, -4.40, -4.21, -0.015},
    {"agent-b", "full", icr::FamilyTag::P, 43.31, 45.23, 0.957, -5.59, -14.47, 0.137},
    {"agent-b", "full", icr::FamilyTag::A, 31.25, 31.97, 0.949, -17.65, -27.73, 0.129},
    {"agent-b", "full", icr::FamilyTag::N, 42.78, 45.74, 0.937, -6.12, -13.96, 0.117},
    {"agent-b", "full", icr::FamilyTag::M, 34.65, 40.23, 0.897, -14.25, -19.47, 0.077},
};

inline const TableBaseline& baseline_for(const char* agent, const char* split) {
  for (const TableBaseline& b : kTableBaselines) {
    if (std::string(b.agent) == agent && std::string(b.split) == split) {
      return b;
    }
  }
  throw std::logic_error("no such fixture baseline");
}

}  // namespace icr_test
