#pragma once

// Numeric kernels for the transient queue-length formulas: modified Bessel
// functions of the first kind (integer order) and the generalized Marcum Q
// function.  Target accuracy: Bessel relative error ~1e-12 for x <= 50 and
// ~1e-9 beyond; Marcum absolute error ~1e-12.

#include <vector>

namespace aoi {

// I_k(x) for integer k (I_{-k} = I_k) and x >= 0.  Throws Overflow when the
// value exceeds the double range; use the scaled variant there.
double bessel_i(int k, double x);

// e^{-x} I_k(x); representable for every x >= 0.
double bessel_i_scaled(int k, double x);

// ln(e^{-x} I_k(x)); -inf when the scaled value underflows (x = 0, k > 0).
double log_bessel_i_scaled(int k, double x);

// ln(e^{-x} I_k(x)) for k = 0..k_max in one pass: a single downward
// recurrence for large x, per-order power series otherwise.
std::vector<double> log_bessel_i_scaled_seq(int k_max, double x);

// Generalized Marcum Q function of positive integer order,
//   Q_k(a,b) = sum_{n>=0} pois(n; a^2/2) * P[Poi(b^2/2) <= k+n-1],
// i.e. the upper tail at b^2/2 of a Poisson-mixed Erlang count.  The mixing
// series is truncated when its remaining mass drops below 1e-15.
double marcum_q(int k, double a, double b);

// 1 - Q_k(a,b), accumulated from positive terms
//   sum_{n>=0} pois(n; a^2/2) * P[Poi(b^2/2) >= k+n]
// so small complements are not lost to cancellation.
double marcum_q_complement(int k, double a, double b);

}  // namespace aoi
