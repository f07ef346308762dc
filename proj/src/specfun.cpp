#include "aoi/specfun.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "aoi/errors.hpp"

namespace aoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this argument the ascending series needs only a handful of terms per
// order; above it one downward recurrence produces all orders at once.
constexpr double kSeriesCut = 15.0;

// ln I_k(x) by the ascending series.  Every term is positive, so there is no
// cancellation; the term count grows with x, which is why callers keep this
// to x < kSeriesCut.
double log_bessel_series(int k, double x) {
  if (x == 0.0) return k == 0 ? 0.0 : -kInf;
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 1000; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m + k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return k * std::log(0.5 * x) - std::lgamma(static_cast<double>(k) + 1.0) +
         std::log(sum);
}

// Start order for the downward recurrence: far enough above both k_max and x
// that contamination by the dominant solution is washed out to double
// precision by the time the requested orders are reached.
int recurrence_start(int k_max, double x) {
  const int span = k_max > static_cast<int>(x) ? k_max : static_cast<int>(x);
  return span + 50 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(span)));
}

// ln(e^{-x} I_k(x)) for k = 0..k_max via the downward recurrence
// I_{j-1} = I_{j+1} + (2j/x) I_j seeded high with (0, tiny), normalized with
// e^{-x}(I_0 + 2 sum_{j>=1} I_j) = 1.  Trial values grow toward low orders,
// so everything is rescaled in lockstep when they approach the double range;
// per-order logs stay exact because the cumulative shift is tracked.
std::vector<double> log_scaled_by_recurrence(int k_max, double x) {
  const int start = recurrence_start(k_max, x);
  std::vector<double> lg(static_cast<size_t>(k_max) + 1, -kInf);
  double shift = 0.0;               // total downscaling applied, in log space
  double v_hi = 0.0;                // trial value at order j+1
  double v = 1e-280;                // trial value at order j
  double sum = 0.0;                 // I_0 + 2 sum_{j>=1} I_j, current scale
  constexpr double kBig = 1e280;
  constexpr double kLogBig = 644.8029106167233;  // ln(1e280)
  for (int j = start; j >= 0; --j) {
    if (j <= k_max) lg[static_cast<size_t>(j)] = std::log(v) + shift;
    sum += (j == 0 ? 1.0 : 2.0) * v;
    if (j == 0) break;
    double v_lo = v_hi + (2.0 * static_cast<double>(j) / x) * v;
    v_hi = v;
    v = v_lo;
    if (v > kBig) {
      v *= 1.0 / kBig;
      v_hi *= 1.0 / kBig;
      sum *= 1.0 / kBig;
      shift += kLogBig;
    }
  }
  const double log_norm = std::log(sum) + shift;
  for (double& l : lg) l -= log_norm;
  return lg;
}

// Poisson pmf logarithm, mean y > 0.
double log_pois(double y, std::int64_t n) {
  return static_cast<double>(n) * std::log(y) - y -
         std::lgamma(static_cast<double>(n) + 1.0);
}

// (P[Poi(x) <= m], P[Poi(x) >= m+1]) with the smaller tail summed directly
// and the larger one taken as its complement, so both stay accurate in
// absolute terms.
struct Tails {
  double lower, upper;
};

Tails poisson_tails(double x, std::int64_t m) {
  if (m < 0) return {0.0, 1.0};
  if (x == 0.0) return {1.0, 0.0};
  if (static_cast<double>(m) >= x) {
    // Above the mode: the upper tail is the small side; sum it upward.
    double w = std::exp(log_pois(x, m + 1));
    double s = 0.0;
    for (std::int64_t n = m + 1;; ++n) {
      s += w;
      if (static_cast<double>(n) > x && w < 1e-18 * (s + 1e-300)) break;
      w *= x / static_cast<double>(n + 1);
    }
    return {1.0 - s, s};
  }
  // Below the mode: the lower tail is the small side; sum it downward.
  double w = std::exp(log_pois(x, m));
  double s = 0.0;
  for (std::int64_t n = m; n >= 0; --n) {
    s += w;
    if (w < 1e-18 * s) break;
    w *= static_cast<double>(n) / x;
  }
  return {s, 1.0 - s};
}

struct MarcumPair {
  double q;  // Q_k(a,b)
  double p;  // 1 - Q_k(a,b)
};

// One pass produces both Q and its complement as sums of positive products:
//   Q = sum_n pois(n; y) * P[Poi(x) <= k+n-1],  P = sum_n pois(n; y) * P[Poi(x) >= k+n]
// with y = a^2/2 (mixing mean) and x = b^2/2 (threshold mean).
MarcumPair marcum_core(int k, double a, double b) {
  if (k < 1) throw std::invalid_argument("marcum_q: order must be >= 1");
  if (a < 0.0 || b < 0.0)
    throw std::invalid_argument("marcum_q: arguments must be nonnegative");
  const double y = 0.5 * a * a;
  const double x = 0.5 * b * b;
  if (x == 0.0) return {1.0, 0.0};
  if (y == 0.0) {
    const Tails t = poisson_tails(x, k - 1);
    return {t.lower, t.upper};
  }
  // Mixing window: mass below n_lo is under ~1e-17.
  std::int64_t n_lo = 0;
  if (y > 110.0)
    n_lo = static_cast<std::int64_t>(y - 9.0 * std::sqrt(y) - 12.0);
  double w = std::exp(log_pois(y, n_lo));
  Tails t = poisson_tails(x, k + n_lo - 1);
  double step = std::exp(log_pois(x, k + n_lo));  // pmf at the tail boundary
  double q = 0.0;
  double p = 0.0;
  for (std::int64_t n = n_lo;; ++n) {
    q += w * t.lower;
    p += w * t.upper;
    const double ratio = y / static_cast<double>(n + 1);
    // Remaining mixing mass is below w * ratio / (1 - ratio) once past the
    // mode; both accumulated values are short by at most that.
    if (ratio < 1.0 && w * ratio / (1.0 - ratio) < 1e-15) break;
    if (n - n_lo > 40'000'000)
      throw TruncationFailure("marcum_q: mixing series did not terminate");
    t.lower += step;
    t.upper -= step;
    if (t.upper < 0.0) t.upper = 0.0;
    if (t.lower > 1.0) t.lower = 1.0;
    step *= x / static_cast<double>(k + n + 1);
    w *= ratio;
  }
  if (q > 1.0) q = 1.0;
  if (p > 1.0) p = 1.0;
  return {q, p};
}

}  // namespace

double log_bessel_i_scaled(int k, double x) {
  if (k < 0) k = -k;
  if (x < 0.0)
    throw std::invalid_argument("bessel_i: argument must be nonnegative");
  if (x < kSeriesCut) return log_bessel_series(k, x) - x;
  return log_scaled_by_recurrence(k, x)[static_cast<size_t>(k)];
}

std::vector<double> log_bessel_i_scaled_seq(int k_max, double x) {
  if (k_max < 0) throw std::invalid_argument("bessel_i: k_max must be >= 0");
  if (x < 0.0)
    throw std::invalid_argument("bessel_i: argument must be nonnegative");
  if (x < kSeriesCut) {
    std::vector<double> lg(static_cast<size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
      lg[static_cast<size_t>(k)] = log_bessel_series(k, x) - x;
    return lg;
  }
  return log_scaled_by_recurrence(k_max, x);
}

double bessel_i_scaled(int k, double x) {
  return std::exp(log_bessel_i_scaled(k, x));
}

double bessel_i(int k, double x) {
  const double lg = log_bessel_i_scaled(k, x) + x;
  if (lg > 709.0) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "bessel_i(%d, %g) exceeds double range", k, x);
    throw Overflow(msg);
  }
  return std::exp(lg);
}

double marcum_q(int k, double a, double b) { return marcum_core(k, a, b).q; }

double marcum_q_complement(int k, double a, double b) {
  return marcum_core(k, a, b).p;
}

}  // namespace aoi
