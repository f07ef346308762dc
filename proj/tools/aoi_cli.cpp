// Command-line front end: evaluates the average age of information of a
// two-source FCFS queue by exact analysis, closed-form approximation, or
// simulation, runs parameter sweeps to CSV, and compares sweep outputs.
//
// Exit codes: 0 success, 1 usage or config error, 2 numeric failure,
// 3 comparison tolerance exceeded.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aoi/analytic.hpp"
#include "aoi/config.hpp"
#include "aoi/errors.hpp"
#include "aoi/sim.hpp"
#include "aoi/sweep.hpp"
#include "aoi/transient.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumeric = 2;
constexpr int kToleranceGate = 3;

// A point experiment: scalar rates plus service law and sim settings.
struct PointSpec {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  aoi::ServiceDistribution service{aoi::Exponential(1.0)};
  int replications = 8;
  long long events = 250000;
  double warmup = 0.1;
  std::uint64_t seed = 1;
  double exact_tol = 1e-7;
};

double scalar_number(const json& j, const char* key, bool required,
                     double fallback) {
  if (!j.contains(key)) {
    if (required) {
      throw aoi::ConfigError(std::string("missing key '") + key + "'");
    }
    return fallback;
  }
  if (!j.at(key).is_number()) {
    throw aoi::ConfigError(std::string(key) + " must be a number");
  }
  return j.at(key).get<double>();
}

PointSpec point_from_json(const json& j) {
  for (const auto& item : j.items()) {
    static const char* const known[] = {"lambda1", "lambda2", "service",
                                        "replications", "events", "warmup",
                                        "seed", "exact_tol"};
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) {
      throw aoi::ConfigError("unknown key '" + item.key() +
                             "' in point config");
    }
  }
  PointSpec p;
  p.lambda1 = scalar_number(j, "lambda1", true, 0.0);
  p.lambda2 = scalar_number(j, "lambda2", false, 0.0);
  if (!j.contains("service")) {
    throw aoi::ConfigError("missing key 'service'");
  }
  p.service = aoi::service_from_json(j.at("service"));
  if (j.contains("replications")) {
    if (!j.at("replications").is_number_integer()) {
      throw aoi::ConfigError("replications must be an integer");
    }
    p.replications = j.at("replications").get<int>();
  }
  if (j.contains("events")) {
    if (!j.at("events").is_number_integer()) {
      throw aoi::ConfigError("events must be an integer");
    }
    p.events = j.at("events").get<long long>();
  }
  p.warmup = scalar_number(j, "warmup", false, 0.1);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() ||
        j.at("seed").get<long long>() < 0) {
      throw aoi::ConfigError("seed must be a nonnegative integer");
    }
    p.seed = j.at("seed").get<std::uint64_t>();
  }
  p.exact_tol = scalar_number(j, "exact_tol", false, 1e-7);
  return p;
}

int run_exact_mm1(const std::string& config_path, double tol_override) {
  const PointSpec p = point_from_json(aoi::load_config_file(config_path));
  if (!std::holds_alternative<aoi::Exponential>(p.service)) {
    throw aoi::ConfigError("exact-mm1 requires exponential service");
  }
  const aoi::QueueConfig cfg(p.lambda1, p.lambda2, p.service);
  const double tol = tol_override > 0.0 ? tol_override : p.exact_tol;
  std::printf("%.10g\n", aoi::aoi_exact_mm1(cfg, tol));
  return kOk;
}

int run_approx(const std::string& config_path) {
  const PointSpec p = point_from_json(aoi::load_config_file(config_path));
  const aoi::QueueConfig cfg(p.lambda1, p.lambda2, p.service);
  std::printf("approx1 = %.10g\n", aoi::aoi_approx1(cfg));
  std::printf("approx2 = %.10g\n", aoi::aoi_approx2(cfg));
  std::printf("approx3 = %.10g\n", aoi::aoi_approx3(cfg));
  return kOk;
}

int run_single_mg1(const std::string& config_path) {
  const PointSpec p = point_from_json(aoi::load_config_file(config_path));
  if (p.lambda2 != 0.0) {
    throw aoi::ConfigError(
        "single-mg1 describes a single-source queue; lambda2 must be 0");
  }
  std::printf("%.10g\n", aoi::aoi_single_source_mg1(p.lambda1, p.service));
  return kOk;
}

int run_simulate(const std::string& config_path, std::uint64_t seed_override,
                 bool seed_given) {
  const PointSpec p = point_from_json(aoi::load_config_file(config_path));
  const aoi::QueueConfig cfg(p.lambda1, p.lambda2, p.service);
  const aoi::SimConfig sim{cfg, seed_given ? seed_override : p.seed,
                           p.replications, p.events, p.warmup};
  const aoi::SimResult res = aoi::simulate(sim);
  std::printf("age1 = %.10g (std_error %.3g)\n", res.age1.value,
              res.age1.std_error);
  if (cfg.lambda2 > 0.0) {
    std::printf("age2 = %.10g (std_error %.3g)\n", res.age2.value,
                res.age2.std_error);
  }
  std::printf("mean_wait = %.10g (std_error %.3g)\n", res.mean_wait.value,
              res.mean_wait.std_error);
  std::printf("p_brief = %.10g (std_error %.3g)\n", res.p_brief.value,
              res.p_brief.std_error);
  return kOk;
}

int run_sweep_cmd(const std::string& config_path, std::uint64_t seed_override,
                  bool seed_given, const std::string& out_override) {
  aoi::SweepSpec spec = aoi::sweep_from_json(aoi::load_config_file(config_path));
  if (seed_given) spec.seed = seed_override;
  const std::vector<aoi::SweepRow> rows = aoi::run_sweep(spec);
  const std::string out_path =
      !out_override.empty() ? out_override : spec.output;
  if (out_path.empty()) {
    aoi::write_sweep_csv(rows, stdout);
  } else {
    std::FILE* out = std::fopen(out_path.c_str(), "w");
    if (out == nullptr) {
      throw aoi::ConfigError("cannot open output file '" + out_path + "'");
    }
    aoi::write_sweep_csv(rows, out);
    std::fclose(out);
    std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(),
                 out_path.c_str());
  }
  return kOk;
}

int run_compare(const std::vector<std::string>& paths, double tol) {
  std::vector<std::vector<aoi::SweepRow>> files;
  for (const std::string& path : paths) {
    files.push_back(aoi::read_sweep_csv(path));
  }
  const aoi::CompareReport report = aoi::compare_report(files);
  std::printf("baseline: %s\n", report.baseline.empty()
                                    ? paths.front().c_str()
                                    : report.baseline.c_str());
  std::printf("method, points, max_rel_error, mean_rel_error\n");
  for (const aoi::MethodReport& m : report.methods) {
    std::printf("%s, %d, %.6g, %.6g\n", m.method.c_str(), m.points,
                m.max_rel_error, m.mean_rel_error);
  }
  bool gate_failed = false;
  if (report.has_approx_pair) {
    std::printf("approx2 - approx1 minimum: %.6g\n",
                report.min_approx2_minus_approx1);
    if (report.min_approx2_minus_approx1 < -1e-12) {
      std::fprintf(stderr, "compare: approx2 fell below approx1\n");
      gate_failed = true;
    }
  }
  if (tol > 0.0) {
    for (const aoi::MethodReport& m : report.methods) {
      if (m.max_rel_error > tol) {
        std::fprintf(stderr,
                     "compare: %s max relative error %.6g exceeds "
                     "tolerance %.6g\n",
                     m.method.c_str(), m.max_rel_error, tol);
        gate_failed = true;
      }
    }
  }
  return gate_failed ? kToleranceGate : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Average age of information in a two-source FCFS queue: exact "
      "analysis, approximations, and simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::vector<std::string> compare_paths;

  CLI::App* exact = app.add_subcommand(
      "exact-mm1", "Exact average age of source 1, exponential service");
  exact->add_option("--config", config_path, "experiment config file")
      ->required();
  exact->add_option("--tol", tol, "absolute tolerance of the evaluation");

  CLI::App* approx = app.add_subcommand(
      "approx", "Three closed-form approximations of the average age");
  approx->add_option("--config", config_path, "experiment config file")
      ->required();

  CLI::App* single = app.add_subcommand(
      "single-mg1", "Exact single-source average age, general service");
  single->add_option("--config", config_path, "experiment config file")
      ->required();

  CLI::App* sim = app.add_subcommand(
      "simulate", "Simulate the queue and report empirical averages");
  sim->add_option("--config", config_path, "experiment config file")
      ->required();
  CLI::Option* sim_seed = sim->add_option("--seed", seed, "override the seed");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Evaluate methods over a lambda1/lambda2 grid, emit CSV");
  sweep->add_option("--config", config_path, "sweep config file")->required();
  CLI::Option* sweep_seed =
      sweep->add_option("--seed", seed, "override the seed");
  sweep->add_option("--out", out_path, "output CSV path (default stdout)");

  CLI::App* compare = app.add_subcommand(
      "compare", "Summarize methods in sweep CSVs against a baseline");
  compare->add_option("files", compare_paths, "sweep CSV files")
      ->required()
      ->expected(-1);
  compare->add_option("--tol", tol,
                      "fail (exit 3) if any max relative error exceeds this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (exact->parsed()) {
      return run_exact_mm1(config_path, exact->count("--tol") ? tol : 0.0);
    }
    if (approx->parsed()) return run_approx(config_path);
    if (single->parsed()) return run_single_mg1(config_path);
    if (sim->parsed()) {
      return run_simulate(config_path, seed, sim_seed->count() > 0);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(config_path, seed, sweep_seed->count() > 0,
                           out_path);
    }
    if (compare->parsed()) {
      return run_compare(compare_paths, compare->count("--tol") ? tol : 0.0);
    }
  } catch (const aoi::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  }
  return kUsage;
}
