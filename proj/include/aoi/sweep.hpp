#pragma once

// Sweep harness: evaluates a set of methods over a (lambda1, lambda2) grid
// and emits schema-stable CSV, one row per (lambda2, lambda1, method) in
// that nesting order.  Methods: exact_mm1 (exponential service only),
// approx1..approx3, simulate, and delay (mean wait plus mean service).
// Unstable grid points are emitted with status "unstable" rather than
// dropped; per-point numeric failures land in status without aborting the
// sweep.  With the seed fixed, every value is bit-reproducible; runtime_ms
// is wall clock and is the one column that varies between runs.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "aoi/distributions.hpp"

namespace aoi {

struct Lambda1Grid {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
};

struct SweepSpec {
  Lambda1Grid lambda1;
  std::vector<double> lambda2;
  ServiceDistribution service;
  std::vector<std::string> methods;
  int replications = 8;
  long long events_per_rep = 250000;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;
  double exact_tol = 1e-6;     // tolerance handed to the exact evaluation
  std::string output;          // CSV path; empty means caller decides
};

// Reads a sweep description from a parsed config object.  Required keys:
// lambda1 (number or { min, max, steps }), lambda2 (number or array),
// service, methods.  Optional: replications, events, warmup, seed,
// exact_tol, output.  Unknown keys and invalid combinations (for instance
// exact_mm1 with non-exponential service, or an empty method list) throw
// ConfigError.
SweepSpec sweep_from_json(const nlohmann::json& j);

// The lambda1 values the grid denotes: steps evenly spaced points from min
// to max (just {min} when steps is 1).
std::vector<double> grid_points(const Lambda1Grid& grid);

struct SweepRow {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::string method;
  bool has_value = false;
  double value = 0.0;
  bool has_std_error = false;
  double std_error = 0.0;
  double runtime_ms = 0.0;
  std::string status;  // "ok", "unstable", or "error(...)"
};

// Evaluates every (lambda2, lambda1, method) cell.  Rows come back in grid
// order regardless of how the work is scheduled internally; workers sets
// the pool size (0 picks the hardware concurrency).
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers = 0);

// Exact header: "lambda1, lambda2, method, value, std_error, runtime_ms,
// status".  value and std_error are empty fields when absent (analytic rows
// carry no std_error; failed rows carry neither).
void write_sweep_csv(const std::vector<SweepRow>& rows, std::FILE* out);

// Parses a CSV produced by write_sweep_csv; rejects any other header.
std::vector<SweepRow> read_sweep_csv(const std::string& path);

struct MethodReport {
  std::string method;
  int points = 0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
};

struct CompareReport {
  // Within a single file the baseline is a method: "simulate" if present,
  // else "exact_mm1".  Across files the baseline is the first file and this
  // is empty.
  std::string baseline;
  std::vector<MethodReport> methods;
  // Minimum of approx2 - approx1 over points carrying both (per file, then
  // minimized across files).  The second estimate can never be the smaller
  // one, so a negative minimum means a defect somewhere.
  double min_approx2_minus_approx1 = 0.0;
  bool has_approx_pair = false;
};

// One file: every other method is compared against the baseline method on
// matching ok rows.  Several files: every later file's ok rows are compared
// against the first file's row with the same (method, lambda1, lambda2), so
// a file compared with a copy of itself reports zero error.  Throws
// ConfigError when no baseline exists or when ok-point sets differ (grid
// mismatch).
CompareReport compare_report(const std::vector<std::vector<SweepRow>>& files);

}  // namespace aoi
