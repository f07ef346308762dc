#include "aoi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aoi/distributions.hpp"
#include "aoi/errors.hpp"
#include "aoi/rng.hpp"

namespace aoi {

namespace {

double exp_gap(RngStream& rng, double rate) {
  return -std::log(rng.next_uniform()) / rate;
}

// Stream purposes within one (replication, source) pair.
constexpr std::uint64_t kArrivals = 0;
constexpr std::uint64_t kServices = 1;

// First `count` packets of the merged arrival process, arrival-sorted.
// Service times are drawn when a packet is generated, so each packet's
// demand depends only on (seed, replication, source, index).
std::vector<Packet> generate_packets(const QueueConfig& queue,
                                     std::uint64_t seed, std::uint64_t rep,
                                     long long count) {
  RngStream arr1 = substream(seed, rep, 1, kArrivals);
  RngStream svc1 = substream(seed, rep, 1, kServices);
  RngStream arr2 = substream(seed, rep, 2, kArrivals);
  RngStream svc2 = substream(seed, rep, 2, kServices);

  const bool background = queue.lambda2 > 0.0;
  std::vector<Packet> packets;
  packets.reserve(static_cast<std::size_t>(count));

  double t1 = exp_gap(arr1, queue.lambda1);
  double t2 = background ? exp_gap(arr2, queue.lambda2)
                         : std::numeric_limits<double>::infinity();
  for (long long i = 0; i < count; ++i) {
    if (t1 <= t2) {
      packets.push_back({1, t1, sample(queue.service, svc1)});
      t1 += exp_gap(arr1, queue.lambda1);
    } else {
      packets.push_back({2, t2, sample(queue.service, svc2)});
      t2 += exp_gap(arr2, queue.lambda2);
    }
  }
  return packets;
}

struct RepStats {
  double age1 = 0.0;
  double age2 = 0.0;
  double mean_wait = 0.0;
  double p_brief = 0.0;
  double long_gap_moment = 0.0;
  long long deliveries1 = 0;
};

RepStats run_replication(const SimConfig& cfg, std::uint64_t rep) {
  const long long n = cfg.events_per_rep;
  const std::vector<Packet> packets =
      generate_packets(cfg.queue, cfg.seed, rep, n);
  const std::vector<Completed> trace = run_fcfs(packets);

  const long long warm =
      static_cast<long long>(std::floor(cfg.warmup_fraction * n));
  const double t_w = warm > 0 ? trace[warm - 1].depart : 0.0;
  const double t_end = trace[n - 1].depart;

  RepStats out;
  out.age1 = average_age(trace, 1, t_w, t_end);
  if (cfg.queue.lambda2 > 0.0) out.age2 = average_age(trace, 2, t_w, t_end);

  double wait_sum = 0.0;
  long long wait_count = 0;
  // Source-1 gap bookkeeping: a gap is the spacing between consecutive
  // source-1 arrivals, brief when it is below the previous update's system
  // time (the new update arrives while the old one is still in the system).
  double prev_arrival = 0.0;
  double prev_system = 0.0;
  bool has_prev = false;
  long long gaps = 0;
  long long brief = 0;
  double long_sum = 0.0;

  for (const Completed& c : trace) {
    const bool in_window = c.arrival >= t_w && c.arrival <= t_end;
    if (in_window) {
      wait_sum += c.start - c.arrival;
      ++wait_count;
    }
    if (c.source == 1) {
      if (c.depart <= t_end && c.depart >= t_w) ++out.deliveries1;
      if (has_prev && in_window) {
        const double gap = c.arrival - prev_arrival;
        const double wait = c.start - c.arrival;
        ++gaps;
        if (gap < prev_system) {
          ++brief;
        } else {
          long_sum += wait * gap;
        }
      }
      prev_arrival = c.arrival;
      prev_system = c.depart - c.arrival;
      has_prev = true;
    }
  }

  if (out.deliveries1 == 0) {
    throw NoDeliveries("simulate: source 1 delivered nothing inside the window");
  }
  if (wait_count > 0) out.mean_wait = wait_sum / static_cast<double>(wait_count);
  if (gaps > 0) {
    out.p_brief = static_cast<double>(brief) / static_cast<double>(gaps);
    out.long_gap_moment = long_sum / static_cast<double>(gaps);
  }
  return out;
}

Estimate aggregate(const std::vector<double>& means) {
  Estimate e;
  const std::size_t r = means.size();
  for (double m : means) e.value += m;
  e.value /= static_cast<double>(r);
  if (r > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - e.value) * (m - e.value);
    e.std_error = std::sqrt(ss / static_cast<double>(r - 1)) /
                  std::sqrt(static_cast<double>(r));
  }
  return e;
}

}  // namespace

std::vector<Completed> run_fcfs(const std::vector<Packet>& packets) {
  if (!std::is_sorted(packets.begin(), packets.end(),
                      [](const Packet& a, const Packet& b) {
                        return a.arrival < b.arrival;
                      })) {
    throw std::invalid_argument("run_fcfs: packets must be arrival-sorted");
  }
  std::vector<Completed> trace;
  trace.reserve(packets.size());
  double free_at = 0.0;
  for (const Packet& p : packets) {
    const double start = std::max(p.arrival, free_at);
    free_at = start + p.service;
    trace.push_back({p.source, p.arrival, start, free_at});
  }
  return trace;
}

double average_age(const std::vector<Completed>& trace, int source,
                   double w_begin, double w_end) {
  if (!(w_end > w_begin)) {
    throw std::invalid_argument("average_age: window must have positive length");
  }
  double area = 0.0;
  double newest = 0.0;  // generation time of the newest delivered update
  double t_prev = 0.0;
  // Age is t - newest on [from, to); the integral of a linear segment is
  // exact.  Segments outside the window are clipped away.
  auto add_segment = [&](double from, double to) {
    const double a = std::max(from, w_begin);
    const double b = std::min(to, w_end);
    if (a >= b) return;
    area += (b - a) * (0.5 * (a + b) - newest);
  };
  for (const Completed& c : trace) {
    if (c.source != source) continue;
    if (c.depart >= w_end) break;
    add_segment(t_prev, c.depart);
    newest = c.arrival;  // FCFS delivers a source's updates in order
    t_prev = c.depart;
  }
  add_segment(t_prev, w_end);
  return area / (w_end - w_begin);
}

SimResult simulate(const SimConfig& cfg) {
  if (cfg.replications < 1) {
    throw std::invalid_argument("simulate: replications must be at least 1");
  }
  if (cfg.events_per_rep < 100) {
    throw std::invalid_argument("simulate: events_per_rep must be at least 100");
  }
  if (!(cfg.warmup_fraction >= 0.0) || cfg.warmup_fraction >= 1.0) {
    throw std::invalid_argument("simulate: warmup_fraction must lie in [0, 1)");
  }
  if (cfg.queue.rho() >= 1.0) {
    std::fprintf(stderr,
                 "simulate: total load %.6g >= 1, the queue is unstable; "
                 "finite-window averages will not converge\n",
                 cfg.queue.rho());
  }

  const int r = cfg.replications;
  std::vector<double> age1(r), age2(r), wait(r), pb(r), lg(r);
  SimResult res;
  for (int i = 0; i < r; ++i) {
    const RepStats s = run_replication(cfg, static_cast<std::uint64_t>(i));
    age1[static_cast<std::size_t>(i)] = s.age1;
    age2[static_cast<std::size_t>(i)] = s.age2;
    wait[static_cast<std::size_t>(i)] = s.mean_wait;
    pb[static_cast<std::size_t>(i)] = s.p_brief;
    lg[static_cast<std::size_t>(i)] = s.long_gap_moment;
    res.deliveries1 += s.deliveries1;
  }
  res.age1 = aggregate(age1);
  res.age2 = aggregate(age2);
  res.mean_wait = aggregate(wait);
  res.p_brief = aggregate(pb);
  res.long_gap_moment = aggregate(lg);
  return res;
}

void write_trace_csv(const QueueConfig& queue, std::uint64_t seed,
                     long long packets, std::FILE* out) {
  if (packets < 1) {
    throw std::invalid_argument("write_trace_csv: packets must be at least 1");
  }
  const std::vector<Packet> generated = generate_packets(queue, seed, 0, packets);
  const std::vector<Completed> trace = run_fcfs(generated);
  std::fprintf(out, "source, gen_time, arrive_service, depart, wait\n");
  for (const Completed& c : trace) {
    std::fprintf(out, "%d, %.10g, %.10g, %.10g, %.10g\n", c.source, c.arrival,
                 c.start, c.depart, c.start - c.arrival);
  }
}

}  // namespace aoi
