// Simulator checks.  The deterministic core (FCFS service, exact windowed
// age integral) is pinned by hand-computed traces; the stochastic layer is
// validated against closed forms that the simulator does not use: the
// Pollaczek-Khinchine mean wait, the transform expression for the gap
// probability, the single-source age formula, and the exact two-source
// exponential-service age.

#include "aoi/sim.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"
#include "aoi/transient.hpp"
#include "test_util.hpp"

namespace {

// |got - want| within three standard errors, with a floor that keeps the
// check meaningful if the spread estimate collapses.
void check_3se(double got, double want, double se, double floor_abs) {
  const double tol = std::max(3.0 * se, floor_abs);
  CHECK(std::fabs(got - want) <= tol);
}

}  // namespace

int main() {
  const aoi::ServiceDistribution exp1{aoi::Exponential(1.0)};

  // --- FCFS mechanics on hand traces ---
  {
    const std::vector<aoi::Packet> packets = {{1, 1.0, 0.5}, {1, 2.0, 0.5}};
    const auto trace = aoi::run_fcfs(packets);
    CHECK(trace.size() == 2);
    CHECK(trace[0].start == 1.0);
    CHECK(trace[0].depart == 1.5);
    CHECK(trace[1].start == 2.0);
    CHECK(trace[1].depart == 2.5);
  }
  {
    // Overlap: the second packet waits for the first to finish.
    const auto trace =
        aoi::run_fcfs({{1, 0.0, 1.0}, {2, 0.5, 1.0}, {1, 5.0, 0.25}});
    CHECK(trace[1].start == 1.0);
    CHECK(trace[1].depart == 2.0);
    CHECK(trace[2].start == 5.0);  // idle gap: server waits for the arrival
    CHECK(trace[2].depart == 5.25);
  }
  CHECK_THROWS(std::invalid_argument,
               aoi::run_fcfs({{1, 2.0, 0.5}, {1, 1.0, 0.5}}));

  // --- Exact windowed age on hand traces ---
  {
    const auto trace = aoi::run_fcfs({{1, 1.0, 0.5}, {1, 2.0, 0.5}});
    // Over (1.5, 2.5) the age falls to 0.5 at the first delivery and climbs
    // to 1.5; the exact average is 1.
    CHECK(aoi::average_age(trace, 1, 1.5, 2.5) == 1.0);
    // From time zero: age t until 1.5 (area 1.125), then the ramp (area 1).
    CHECK_CLOSE_ABS(aoi::average_age(trace, 1, 0.0, 2.5), 2.125 / 2.5, 1e-15);
    // A source with no deliveries ages linearly from the time-zero reference.
    CHECK_CLOSE_ABS(aoi::average_age(trace, 2, 2.0, 4.0), 3.0, 1e-15);
    CHECK_THROWS(std::invalid_argument, aoi::average_age(trace, 1, 2.0, 2.0));
  }
  {
    // A delivery exactly at the window start: the drop applies throughout.
    const auto trace = aoi::run_fcfs({{1, 1.0, 0.5}});
    CHECK_CLOSE_ABS(aoi::average_age(trace, 1, 1.5, 3.5), 1.5, 1e-15);
  }

  // --- Configuration validation ---
  {
    aoi::SimConfig cfg{aoi::QueueConfig(0.3, 0.3, exp1), 1, 2, 1000, 0.1};
    aoi::SimConfig bad = cfg;
    bad.replications = 0;
    CHECK_THROWS(std::invalid_argument, aoi::simulate(bad));
    bad = cfg;
    bad.events_per_rep = 50;
    CHECK_THROWS(std::invalid_argument, aoi::simulate(bad));
    bad = cfg;
    bad.warmup_fraction = 1.0;
    CHECK_THROWS(std::invalid_argument, aoi::simulate(bad));
    bad = cfg;
    bad.warmup_fraction = -0.1;
    CHECK_THROWS(std::invalid_argument, aoi::simulate(bad));
  }

  // --- A source that never delivers inside the window ---
  {
    aoi::SimConfig cfg{aoi::QueueConfig(1e-12, 0.5, exp1), 7, 1, 100, 0.1};
    CHECK_THROWS(aoi::NoDeliveries, aoi::simulate(cfg));
  }

  // --- Determinism: same seed bit-identical, different seed different ---
  {
    aoi::SimConfig cfg{aoi::QueueConfig(0.25, 0.35, exp1), 42, 3, 20000, 0.1};
    const auto a = aoi::simulate(cfg);
    const auto b = aoi::simulate(cfg);
    CHECK(a.age1.value == b.age1.value);
    CHECK(a.age2.value == b.age2.value);
    CHECK(a.mean_wait.value == b.mean_wait.value);
    CHECK(a.p_brief.value == b.p_brief.value);
    CHECK(a.long_gap_moment.value == b.long_gap_moment.value);
    CHECK(a.deliveries1 == b.deliveries1);
    aoi::SimConfig other = cfg;
    other.seed = 43;
    const auto c = aoi::simulate(other);
    CHECK(c.age1.value != a.age1.value);
    CHECK(a.age1.std_error > 0.0);
    CHECK(a.deliveries1 > 0);
  }

  // --- Mean wait against Pollaczek-Khinchine, gap probability against the
  // transform expression (exponential service, rho = 0.7) ---
  {
    const aoi::QueueConfig queue(0.28, 0.42, exp1);
    aoi::SimConfig cfg{queue, 11, 6, 100000, 0.1};
    const auto res = aoi::simulate(cfg);
    check_3se(res.mean_wait.value, aoi::mean_wait(queue),
              res.mean_wait.std_error, 1e-3);
    check_3se(res.p_brief.value, aoi::p_brief(queue), res.p_brief.std_error,
              1e-3);
    CHECK(res.p_brief.value > 0.0 && res.p_brief.value < 1.0);
    CHECK(res.long_gap_moment.value > 0.0);
  }

  // --- Single-source age against the closed form (3.5 at lambda 0.5) ---
  {
    const aoi::QueueConfig queue(0.5, 0.0, exp1);
    aoi::SimConfig cfg{queue, 5, 8, 100000, 0.1};
    const auto res = aoi::simulate(cfg);
    check_3se(res.age1.value, aoi::aoi_single_source_mg1(0.5, exp1),
              res.age1.std_error, 1e-3);
    CHECK(res.age2.value == 0.0);
    CHECK(res.age2.std_error == 0.0);
  }

  // --- Symmetric sources agree with each other and with the exact
  // two-source value ---
  {
    const aoi::QueueConfig queue(0.3, 0.3, exp1);
    aoi::SimConfig cfg{queue, 9, 6, 100000, 0.1};
    const auto res = aoi::simulate(cfg);
    CHECK(std::fabs(res.age1.value - res.age2.value) <=
          3.0 * (res.age1.std_error + res.age2.std_error));
    const double exact = aoi::aoi_exact_mm1(queue, 1e-4);
    check_3se(res.age1.value, exact, res.age1.std_error, 0.01 * exact);
  }

  // --- Trace CSV: exact header, one row per packet, rows self-consistent ---
  {
    const char* path = "trace_test.csv";
    std::FILE* out = std::fopen(path, "w");
    CHECK(out != nullptr);
    aoi::write_trace_csv(aoi::QueueConfig(0.3, 0.4, exp1), 3, 200, out);
    std::fclose(out);

    std::FILE* in = std::fopen(path, "r");
    CHECK(in != nullptr);
    char line[256];
    CHECK(std::fgets(line, sizeof line, in) != nullptr);
    CHECK(std::strcmp(line, "source, gen_time, arrive_service, depart, wait\n") ==
          0);
    int rows = 0;
    double prev_depart = 0.0;
    double prev_arrival = 0.0;
    while (std::fgets(line, sizeof line, in) != nullptr) {
      int source = 0;
      double gen = 0, start = 0, depart = 0, wait = 0;
      CHECK(std::sscanf(line, "%d , %lf , %lf , %lf , %lf", &source, &gen,
                        &start, &depart, &wait) == 5);
      CHECK(source == 1 || source == 2);
      CHECK(gen >= prev_arrival);         // arrival order
      CHECK(depart >= prev_depart);       // FCFS departs in order
      CHECK(start >= gen);
      // Fields are printed at 10 significant digits, so the reconstructed
      // difference is only good to ~1e-7 at these magnitudes.
      CHECK_CLOSE_ABS(wait, start - gen, 1e-6);
      CHECK(depart > start);
      prev_depart = depart;
      prev_arrival = gen;
      ++rows;
    }
    std::fclose(in);
    std::remove(path);
    CHECK(rows == 200);
  }

  return testutil::summary("sim");
}
