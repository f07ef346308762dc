#pragma once

// Discrete-event simulation of the two-source FCFS queue.  A replication
// generates a fixed number of packets (FCFS delivers in arrival order, so
// counting packets counts departures), serves them against one shared
// server, and measures exact time averages over a post-warmup window:
// per-source age of information, waiting time, the brief-gap fraction, and
// the long-gap wait-interarrival moment that the transient analysis
// predicts.  Streams are counter-based per (replication, source, purpose),
// so results are reproducible under any scheduling.

#include <cstdint>
#include <cstdio>
#include <vector>

#include "aoi/analytic.hpp"

namespace aoi {

// One packet offered to the server: which source generated it, when, and
// how much service it needs.
struct Packet {
  int source;
  double arrival;
  double service;
};

// One served packet: service starts at max(arrival, previous departure).
struct Completed {
  int source;
  double arrival;
  double start;
  double depart;
};

// Serves packets FCFS on a single initially idle server.  The input must
// be sorted by arrival time; throws std::invalid_argument otherwise.
std::vector<Completed> run_fcfs(const std::vector<Packet>& packets);

// Exact time average of the age of the given source over [w_begin, w_end]:
// the age at time t is t minus the generation time of the newest update of
// that source delivered by t, starting from a zero-age reference at time
// zero.  The trace must be depart-ordered (run_fcfs output is).
double average_age(const std::vector<Completed>& trace, int source,
                   double w_begin, double w_end);

struct SimConfig {
  QueueConfig queue;
  std::uint64_t seed = 1;
  int replications = 8;
  long long events_per_rep = 250000;  // departures per replication
  double warmup_fraction = 0.1;       // leading departures excluded
};

// A replication-averaged estimate; std_error is the standard deviation of
// the per-replication means divided by sqrt(replications), zero when there
// is only one replication.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct SimResult {
  Estimate age1;             // time-average age of source 1
  Estimate age2;             // same for the background source (zero if none)
  Estimate mean_wait;        // waiting time of all packets arriving in window
  Estimate p_brief;          // fraction of source-1 gaps below prior system time
  Estimate long_gap_moment;  // mean of W * X over gaps at or above it
  long long deliveries1 = 0;  // source-1 departures inside the window, summed
};

// Runs the replications and aggregates.  Throws std::invalid_argument for a
// nonsensical configuration and NoDeliveries when a replication's window
// ends before source 1 has delivered anything; an unstable queue only earns
// a stderr warning, since the finite-window averages still exist.
SimResult simulate(const SimConfig& cfg);

// Writes a packet-level trace of a single replication as CSV (header plus
// one row per packet, in arrival order) to out.
void write_trace_csv(const QueueConfig& queue, std::uint64_t seed,
                     long long packets, std::FILE* out);

}  // namespace aoi
