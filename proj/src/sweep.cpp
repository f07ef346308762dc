#include "aoi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "aoi/analytic.hpp"
#include "aoi/config.hpp"
#include "aoi/errors.hpp"
#include "aoi/rng.hpp"
#include "aoi/sim.hpp"
#include "aoi/transient.hpp"

namespace aoi {

namespace {

using nlohmann::json;

const char* const kKnownMethods[] = {"exact_mm1", "approx1",  "approx2",
                                     "approx3",   "simulate", "delay"};

bool known_method(const std::string& m) {
  for (const char* k : kKnownMethods) {
    if (m == k) return true;
  }
  return false;
}

double to_number(const json& v, const char* what) {
  if (!v.is_number()) {
    throw ConfigError(std::string(what) + " must be a number");
  }
  return v.get<double>();
}

long long to_integer(const json& v, const char* what) {
  if (!v.is_number_integer()) {
    throw ConfigError(std::string(what) + " must be an integer");
  }
  return v.get<long long>();
}

// Commas and newlines would break the one-row-per-line CSV contract.
std::string sanitize_status(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct RowTask {
  double lambda1;
  double lambda2;
  std::uint64_t point_seed;
  const std::string* method;
};

SweepRow compute_row(const SweepSpec& spec, const RowTask& task) {
  SweepRow row;
  row.lambda1 = task.lambda1;
  row.lambda2 = task.lambda2;
  row.method = *task.method;

  const QueueConfig cfg(task.lambda1, task.lambda2, spec.service);
  if (cfg.rho() >= 1.0) {
    // Reported, not skipped: the caller must see where the grid leaves the
    // stable region instead of finding silently missing rows.
    row.status = "unstable";
    return row;
  }

  const auto begin = std::chrono::steady_clock::now();
  try {
    if (row.method == "exact_mm1") {
      row.value = aoi_exact_mm1(cfg, spec.exact_tol);
      row.has_value = true;
    } else if (row.method == "approx1") {
      row.value = aoi_approx1(cfg);
      row.has_value = true;
    } else if (row.method == "approx2") {
      row.value = aoi_approx2(cfg);
      row.has_value = true;
    } else if (row.method == "approx3") {
      row.value = aoi_approx3(cfg);
      row.has_value = true;
    } else if (row.method == "delay") {
      row.value = mean_wait(cfg) + mean(spec.service);
      row.has_value = true;
    } else {  // simulate
      const SimConfig sim{cfg, task.point_seed, spec.replications,
                          spec.events_per_rep, spec.warmup_fraction};
      const SimResult res = simulate(sim);
      row.value = res.age1.value;
      row.has_value = true;
      row.std_error = res.age1.std_error;
      row.has_std_error = true;
    }
    row.status = "ok";
  } catch (const std::exception& e) {
    row.has_value = false;
    row.has_std_error = false;
    row.status = sanitize_status(std::string("error(") + e.what() + ")");
  }
  const auto end = std::chrono::steady_clock::now();
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(end - begin).count();
  return row;
}

}  // namespace

std::vector<double> grid_points(const Lambda1Grid& grid) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(grid.steps));
  if (grid.steps == 1) {
    pts.push_back(grid.min);
    return pts;
  }
  const double step = (grid.max - grid.min) / (grid.steps - 1);
  for (int k = 0; k < grid.steps; ++k) {
    pts.push_back(k + 1 == grid.steps ? grid.max : grid.min + k * step);
  }
  return pts;
}

SweepSpec sweep_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("sweep config must be a table of key = value entries");
  }
  for (const auto& item : j.items()) {
    static const char* const known[] = {
        "lambda1", "lambda2", "service", "methods",   "replications",
        "events",  "warmup",  "seed",    "exact_tol", "output"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return item.key() == k; }) ==
        std::end(known)) {
      throw ConfigError("unknown key '" + item.key() + "' in sweep config");
    }
  }
  if (!j.contains("lambda1")) throw ConfigError("missing key 'lambda1'");
  if (!j.contains("lambda2")) throw ConfigError("missing key 'lambda2'");
  if (!j.contains("service")) throw ConfigError("missing key 'service'");
  if (!j.contains("methods")) throw ConfigError("missing key 'methods'");

  SweepSpec spec{Lambda1Grid{},
                 {},
                 service_from_json(j.at("service")),
                 {},
                 8,
                 250000,
                 0.1,
                 1,
                 1e-6,
                 ""};

  const json& l1 = j.at("lambda1");
  if (l1.is_number()) {
    spec.lambda1 = {to_number(l1, "lambda1"), to_number(l1, "lambda1"), 1};
  } else if (l1.is_object()) {
    for (const auto& item : l1.items()) {
      if (item.key() != "min" && item.key() != "max" && item.key() != "steps") {
        throw ConfigError("unknown field '" + item.key() + "' in lambda1");
      }
    }
    spec.lambda1.min = to_number(l1.contains("min") ? l1.at("min") : json(),
                                 "lambda1.min");
    spec.lambda1.max = to_number(l1.contains("max") ? l1.at("max") : json(),
                                 "lambda1.max");
    spec.lambda1.steps = static_cast<int>(
        to_integer(l1.contains("steps") ? l1.at("steps") : json(),
                   "lambda1.steps"));
  } else {
    throw ConfigError("lambda1 must be a number or { min, max, steps }");
  }
  if (!(spec.lambda1.min > 0.0)) {
    throw ConfigError("lambda1.min must be positive");
  }
  if (!(spec.lambda1.max >= spec.lambda1.min)) {
    throw ConfigError("lambda1.max must be at least lambda1.min");
  }
  if (spec.lambda1.steps < 1) {
    throw ConfigError("lambda1.steps must be at least 1");
  }

  const json& l2 = j.at("lambda2");
  if (l2.is_number()) {
    spec.lambda2.push_back(to_number(l2, "lambda2"));
  } else if (l2.is_array() && !l2.empty()) {
    for (const json& e : l2) spec.lambda2.push_back(to_number(e, "lambda2"));
  } else {
    throw ConfigError("lambda2 must be a number or a nonempty array");
  }
  for (double v : spec.lambda2) {
    if (!(v >= 0.0)) throw ConfigError("lambda2 values must be nonnegative");
  }

  const json& methods = j.at("methods");
  if (!methods.is_array() || methods.empty()) {
    throw ConfigError("methods must be a nonempty array of method names");
  }
  for (const json& m : methods) {
    if (!m.is_string()) throw ConfigError("methods must contain strings");
    const std::string name = m.get<std::string>();
    if (!known_method(name)) {
      throw ConfigError("unknown method '" + name +
                        "' (expected exact_mm1, approx1, approx2, approx3, "
                        "simulate, or delay)");
    }
    if (std::find(spec.methods.begin(), spec.methods.end(), name) !=
        spec.methods.end()) {
      throw ConfigError("method '" + name + "' listed twice");
    }
    spec.methods.push_back(name);
  }
  if (std::find(spec.methods.begin(), spec.methods.end(), "exact_mm1") !=
          spec.methods.end() &&
      !std::holds_alternative<Exponential>(spec.service)) {
    throw ConfigError("method exact_mm1 requires exponential service");
  }

  if (j.contains("replications")) {
    const long long r = to_integer(j.at("replications"), "replications");
    if (r < 1 || r > 1000000) {
      throw ConfigError("replications must be between 1 and 1000000");
    }
    spec.replications = static_cast<int>(r);
  }
  if (j.contains("events")) {
    spec.events_per_rep = to_integer(j.at("events"), "events");
    if (spec.events_per_rep < 100) {
      throw ConfigError("events must be at least 100");
    }
  }
  if (j.contains("warmup")) {
    spec.warmup_fraction = to_number(j.at("warmup"), "warmup");
    if (!(spec.warmup_fraction >= 0.0) || spec.warmup_fraction >= 1.0) {
      throw ConfigError("warmup must lie in [0, 1)");
    }
  }
  if (j.contains("seed")) {
    const long long s = to_integer(j.at("seed"), "seed");
    if (s < 0) throw ConfigError("seed must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("exact_tol")) {
    spec.exact_tol = to_number(j.at("exact_tol"), "exact_tol");
    if (!(spec.exact_tol > 0.0)) {
      throw ConfigError("exact_tol must be positive");
    }
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) {
      throw ConfigError("output must be a string path");
    }
    spec.output = j.at("output").get<std::string>();
  }
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers) {
  if (spec.methods.empty()) {
    throw ConfigError("methods must be a nonempty array of method names");
  }
  if (workers < 0) {
    throw std::invalid_argument("run_sweep: workers must be nonnegative");
  }
  const std::vector<double> pts = grid_points(spec.lambda1);

  std::vector<RowTask> tasks;
  for (std::size_t i2 = 0; i2 < spec.lambda2.size(); ++i2) {
    for (std::size_t i1 = 0; i1 < pts.size(); ++i1) {
      const std::uint64_t point_seed =
          substream(spec.seed, i2, i1, 0x5eed).state;
      for (const std::string& m : spec.methods) {
        tasks.push_back({pts[i1], spec.lambda2[i2], point_seed, &m});
      }
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      rows[i] = compute_row(spec, tasks[i]);
    }
  };
  unsigned hw = workers > 0 ? static_cast<unsigned>(workers)
                            : std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned pool_size =
      static_cast<unsigned>(std::min<std::size_t>(hw, tasks.size()));
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (unsigned t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::FILE* out) {
  std::fprintf(out,
               "lambda1, lambda2, method, value, std_error, runtime_ms, "
               "status\n");
  for (const SweepRow& r : rows) {
    std::fprintf(out, "%.10g, %.10g, %s, ", r.lambda1, r.lambda2,
                 r.method.c_str());
    if (r.has_value) std::fprintf(out, "%.10g", r.value);
    std::fprintf(out, ", ");
    if (r.has_std_error) std::fprintf(out, "%.10g", r.std_error);
    std::fprintf(out, ", %.6g, %s\n", r.runtime_ms, r.status.c_str());
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_field(const std::string& field, const std::string& path,
                   int line_no, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size() || field.empty()) {
    std::ostringstream os;
    os << path << ":" << line_no << ": malformed " << what << " field '"
       << field << "'";
    throw ConfigError(os.str());
  }
  return v;
}

}  // namespace

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError(path + ": empty file");
  }
  if (trim(line) !=
      "lambda1, lambda2, method, value, std_error, runtime_ms, status") {
    throw ConfigError(path + ":1: unexpected header '" + trim(line) + "'");
  }
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 7) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected 7 fields, found "
         << f.size();
      throw ConfigError(os.str());
    }
    SweepRow r;
    r.lambda1 = parse_field(f[0], path, line_no, "lambda1");
    r.lambda2 = parse_field(f[1], path, line_no, "lambda2");
    r.method = f[2];
    if (!f[3].empty()) {
      r.value = parse_field(f[3], path, line_no, "value");
      r.has_value = true;
    }
    if (!f[4].empty()) {
      r.std_error = parse_field(f[4], path, line_no, "std_error");
      r.has_std_error = true;
    }
    r.runtime_ms = parse_field(f[5], path, line_no, "runtime_ms");
    r.status = f[6];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

using PointKey = std::pair<double, double>;
using MethodTable = std::map<std::string, std::map<PointKey, double>>;

// ok rows of one file grouped by method; duplicates within a file are a
// defect of the producer and rejected.
MethodTable table_of(const std::vector<SweepRow>& rows) {
  MethodTable table;
  for (const SweepRow& r : rows) {
    if (r.status != "ok" || !r.has_value) continue;
    const PointKey key{r.lambda1, r.lambda2};
    auto [it, inserted] = table[r.method].emplace(key, r.value);
    if (!inserted) {
      std::ostringstream os;
      os << "duplicate row for method " << r.method << " at (" << r.lambda1
         << ", " << r.lambda2 << ")";
      throw ConfigError(os.str());
    }
  }
  return table;
}

// min(approx2 - approx1) over the keys one file carries both methods at.
void fold_approx_pair(const MethodTable& table, CompareReport& report) {
  const auto a1 = table.find("approx1");
  const auto a2 = table.find("approx2");
  if (a1 == table.end() || a2 == table.end()) return;
  if (!report.has_approx_pair) {
    report.has_approx_pair = true;
    report.min_approx2_minus_approx1 = std::numeric_limits<double>::infinity();
  }
  for (const auto& [key, v1] : a1->second) {
    const auto it = a2->second.find(key);
    if (it == a2->second.end()) continue;
    report.min_approx2_minus_approx1 =
        std::min(report.min_approx2_minus_approx1, it->second - v1);
  }
}

struct ErrorStats {
  int points = 0;
  double max_rel = 0.0;
  double sum_rel = 0.0;
};

void fold_error(std::map<std::string, ErrorStats>& stats,
                const std::string& method, double value, double baseline) {
  ErrorStats& s = stats[method];
  const double rel = std::fabs(value - baseline) / std::fabs(baseline);
  s.max_rel = std::max(s.max_rel, rel);
  s.sum_rel += rel;
  ++s.points;
}

std::vector<MethodReport> reports_of(
    const std::map<std::string, ErrorStats>& stats) {
  std::vector<MethodReport> out;
  for (const auto& [method, s] : stats) {
    MethodReport mr;
    mr.method = method;
    mr.points = s.points;
    mr.max_rel_error = s.max_rel;
    mr.mean_rel_error = s.points > 0 ? s.sum_rel / s.points : 0.0;
    out.push_back(std::move(mr));
  }
  return out;
}

CompareReport compare_within(const MethodTable& table) {
  CompareReport report;
  if (table.count("simulate")) {
    report.baseline = "simulate";
  } else if (table.count("exact_mm1")) {
    report.baseline = "exact_mm1";
  } else {
    throw ConfigError(
        "compare needs a simulate or exact_mm1 baseline among the rows");
  }
  const std::map<PointKey, double>& base = table.at(report.baseline);

  std::map<std::string, ErrorStats> stats;
  for (const auto& [method, values] : table) {
    if (method == report.baseline) continue;
    if (values.size() != base.size() ||
        !std::equal(values.begin(), values.end(), base.begin(),
                    [](const auto& a, const auto& b) {
                      return a.first == b.first;
                    })) {
      throw ConfigError("grid mismatch between " + method + " and baseline " +
                        report.baseline);
    }
    for (const auto& [key, value] : values) {
      fold_error(stats, method, value, base.at(key));
    }
  }
  report.methods = reports_of(stats);
  fold_approx_pair(table, report);
  return report;
}

CompareReport compare_across(const std::vector<MethodTable>& tables) {
  CompareReport report;
  const MethodTable& base = tables.front();
  std::map<std::string, ErrorStats> stats;
  for (std::size_t k = 1; k < tables.size(); ++k) {
    for (const auto& [method, values] : base) {
      const auto other = tables[k].find(method);
      if (other == tables[k].end() ||
          other->second.size() != values.size()) {
        throw ConfigError("grid mismatch: file " + std::to_string(k + 1) +
                          " does not cover method " + method +
                          " on the baseline file's grid");
      }
    }
    for (const auto& [method, values] : tables[k]) {
      const auto in_base = base.find(method);
      if (in_base == base.end()) {
        throw ConfigError("grid mismatch: baseline file lacks method " +
                          method);
      }
      for (const auto& [key, value] : values) {
        const auto b = in_base->second.find(key);
        if (b == in_base->second.end()) {
          std::ostringstream os;
          os << "grid mismatch: baseline file lacks " << method << " at ("
             << key.first << ", " << key.second << ")";
          throw ConfigError(os.str());
        }
        fold_error(stats, method, value, b->second);
      }
    }
  }
  report.methods = reports_of(stats);
  for (const MethodTable& t : tables) fold_approx_pair(t, report);
  return report;
}

}  // namespace

CompareReport compare_report(const std::vector<std::vector<SweepRow>>& files) {
  if (files.empty()) {
    throw ConfigError("compare needs at least one CSV file");
  }
  std::vector<MethodTable> tables;
  tables.reserve(files.size());
  for (const auto& rows : files) tables.push_back(table_of(rows));
  if (tables.size() == 1) return compare_within(tables.front());
  return compare_across(tables);
}

}  // namespace aoi
