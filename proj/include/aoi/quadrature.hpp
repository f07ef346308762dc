#pragma once

// Adaptive Gauss-Kronrod (G7, K15) quadrature on finite intervals, plus an
// exponential change of variables for integrands on [0, inf) with a known
// decay rate.  Subdivision is deterministic (left to right, tolerance split
// between halves), so repeated runs sum leaves in the same order and produce
// bit-identical results.

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "aoi/errors.hpp"

namespace aoi {

namespace detail {

// Positive Kronrod abscissae (descending) and the matching weights on [-1,1].
// Odd indices are the embedded 7-point Gauss nodes.
inline constexpr double kGkNode[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kGkWeightK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGkWeightG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelResult {
  double integral;
  double error;  // |Kronrod - Gauss| scaled to the interval
};

template <class F>
PanelResult gk15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fmid = f(mid);
  double sum_k = kGkWeightK[7] * fmid;
  double sum_g = kGkWeightG[3] * fmid;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNode[i];
    const double lo = f(mid - dx);
    const double hi = f(mid + dx);
    sum_k += kGkWeightK[i] * (lo + hi);
    if (i % 2 == 1) sum_g += kGkWeightG[i / 2] * (lo + hi);
  }
  return {half * sum_k, half * std::fabs(sum_k - sum_g)};
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance abs_tol.  Throws
// QuadratureFailure if the error estimate cannot be brought under the
// tolerance within max_depth bisections or the integrand is non-finite.
//
// Acceptance is two-level: a panel is kept only when its children's rules
// are individually converged AND their sum agrees with the parent's value.
// The embedded |Kronrod - Gauss| difference alone can be deceptively small
// on a panel wider than the integrand's features (both rules under-resolve
// and agree by accident), and that deception would silently break the
// tolerance contract; requiring agreement across a bisection level as well
// makes it need two independent coincidences.  min_depth additionally
// forces that many bisection levels before any acceptance, for callers
// whose first panel spans an entire mapped half line.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol,
                 int max_depth = 52, int min_depth = 0) {
  if (!(a < b)) return 0.0;
  struct Interval {
    double a, b, tol;
    int depth;
    detail::PanelResult r;  // gk15 over [a, b], already evaluated
  };
  auto checked = [&f](double lo, double hi) {
    const auto r = detail::gk15(f, lo, hi);
    if (!std::isfinite(r.integral)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "non-finite integrand on [%.6g, %.6g]", lo, hi);
      throw QuadratureFailure(msg);
    }
    return r;
  };
  std::vector<Interval> stack;
  stack.push_back({a, b, abs_tol, 0, checked(a, b)});
  double total = 0.0;
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (iv.a + iv.b);
    const auto rl = checked(iv.a, mid);
    const auto rr = checked(mid, iv.b);
    const double two = rl.integral + rr.integral;
    const double err =
        rl.error + rr.error + std::fabs(two - iv.r.integral);
    // Accept when within tolerance, allowing a relative floor of ~100 ulp of
    // the local panel integral: integrands built from exponentials of
    // O(100) arguments carry that much intrinsic roundoff, and insisting on
    // more only fragments noisy panels forever.  Summed over all panels the
    // floor concedes at most ~2e-14 * integral of |f|.  A width floor scaled
    // to the panel's own coordinates catches the remaining pathological
    // splits; a panel closing in on a singularity at 0 keeps descending and
    // still reaches the depth limit below.
    const double machine_width =
        64.0 * std::numeric_limits<double>::epsilon() *
        std::max(std::fabs(iv.a), std::fabs(iv.b));
    if ((iv.depth >= min_depth &&
         err <= iv.tol + 2e-14 * std::fabs(two)) ||
        iv.b - iv.a <= machine_width) {
      total += two;
      continue;
    }
    if (iv.depth >= max_depth) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "no convergence on [%.6g, %.6g]: error %.3g > tol %.3g",
                    iv.a, iv.b, err, iv.tol);
      throw QuadratureFailure(msg);
    }
    const double child_tol = 0.5 * iv.tol;
    // Push right first so the left half is processed first (fixed order).
    stack.push_back({mid, iv.b, child_tol, iv.depth + 1, rr});
    stack.push_back({iv.a, mid, child_tol, iv.depth + 1, rl});
  }
  return total;
}

// Integrates f over [0, t_cap) when f decays at least like e^{-rate * t}.
// The domain is cut into geometric windows [0, w], [w, 2w], [2w, 4w], ...
// with w = 1/rate, each integrated adaptively in the native t coordinate
// and given an equal share of the tolerance.  Window doubling mirrors the
// decay, so late windows carry negligible mass and converge immediately,
// while nodes stay linear in t everywhere: a global change of variables
// would instead warp the integrand's length scales, and on warped panels
// the nested rules can agree long before they converge.  The horizon is
// min(t_cap, 60/rate); beyond it the integrand is below e^-60 of its own
// scale.  Pass t_cap = +inf for the full half line.
template <class F>
double integrate_decaying(F&& f, double rate, double abs_tol,
                          double t_cap = std::numeric_limits<double>::infinity(),
                          int min_depth = 0) {
  const double w = 1.0 / rate;
  const double horizon = std::min(t_cap, 60.0 * w);
  int n = 1;
  for (double start = w; start < horizon; start *= 2.0) ++n;
  const double share = abs_tol / n;
  double total = 0.0;
  double a = 0.0;
  double b = std::min(w, horizon);
  for (int k = 0; k < n; ++k) {
    total += integrate(f, a, b, share, 52, min_depth);
    a = b;
    b = std::min(2.0 * a, horizon);
  }
  return total;
}

}  // namespace aoi
