#pragma once

// Steady-state quantities of the two-source FCFS M/G/1 queue: the
// Pollaczek-Khinchine mean wait, the Laplace transform of the stationary
// system time with its first two derivatives, the probability that an
// update's interarrival gap is shorter than the previous system time
// ("brief" gap), three closed-form approximations of the mean age of
// information of source 1, and the exact single-source mean age.
//
// Source 1 is the tagged source with rate lambda1; every other source is
// folded into a background stream of rate lambda2 (their AoI-relevant
// behavior depends only on the aggregate rate).

#include "aoi/distributions.hpp"

namespace aoi {

struct QueueConfig {
  double lambda1;               // tagged source arrival rate, > 0
  double lambda2;               // aggregate rate of all other sources, >= 0
  ServiceDistribution service;  // common service law

  QueueConfig(double lambda1, double lambda2, ServiceDistribution service);

  double total_rate() const { return lambda1 + lambda2; }
  // Utilization rho = (lambda1 + lambda2) * E[S].
  double rho() const;
};

// Throws Unstable unless rho < 1.
void require_stable(const QueueConfig& cfg);

// Pollaczek-Khinchine mean waiting time lambda E[S^2] / (2 (1 - rho)).
double mean_wait(const QueueConfig& cfg);

// L_T(a) = E[e^{-aT}] for the stationary system time T (wait plus service)
// of the aggregate FCFS queue.  Defined for a >= 0; L_T(0) = 1.
double laplace_system_time(const QueueConfig& cfg, double a);

// First and second derivatives of L_T at a > 0 (the ratio degenerates to
// 0/0 at a = 0, where the derivatives are not needed).
double laplace_system_time_d1(const QueueConfig& cfg, double a);
double laplace_system_time_d2(const QueueConfig& cfg, double a);

// Probability that a tagged-source interarrival gap is shorter than the
// preceding update's system time, computed as 1 - L_T(lambda1); p_long is
// its complement, so the two always sum to exactly 1.
double p_brief(const QueueConfig& cfg);
double p_long(const QueueConfig& cfg);

// Closed-form approximations of the mean age of information of source 1,
// increasing in fidelity of the correlation correction they apply.  All
// require a stable queue and a finite E[S^2].
double aoi_approx1(const QueueConfig& cfg);
double aoi_approx2(const QueueConfig& cfg);
double aoi_approx3(const QueueConfig& cfg);

// Exact mean age of information for a single source with general service:
// E[S] + lambda E[S^2] / (2 (1 - rho)) + (1 - rho) / (lambda L_S(lambda)).
double aoi_single_source_mg1(double lambda, const ServiceDistribution& service);

}  // namespace aoi
