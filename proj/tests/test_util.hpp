#pragma once

// Minimal check/summary harness shared by the test binaries.  Each binary is
// a plain main() that runs its checks and returns nonzero if any failed.

#include <cmath>
#include <cstdio>

namespace testutil {

inline int g_checks = 0;
inline int g_failures = 0;

inline void check_impl(bool ok, const char* expr, const char* file, int line) {
  ++g_checks;
  if (!ok) {
    ++g_failures;
    std::printf("[FAIL] %s:%d  %s\n", file, line, expr);
  }
}

inline void check_close_abs_impl(double got, double want, double tol,
                                 const char* expr, const char* file, int line) {
  ++g_checks;
  if (!(std::fabs(got - want) <= tol)) {
    ++g_failures;
    std::printf("[FAIL] %s:%d  %s: got %.17g want %.17g (|diff| %.3g > %.3g)\n",
                file, line, expr, got, want, std::fabs(got - want), tol);
  }
}

// Relative comparison with a floor of 1 on the scale, i.e. the tolerance is
// tol * max(1, |want|).
inline void check_close_rel_impl(double got, double want, double tol,
                                 const char* expr, const char* file, int line) {
  const double scale = std::fabs(want) > 1.0 ? std::fabs(want) : 1.0;
  check_close_abs_impl(got, want, tol * scale, expr, file, line);
}

inline int summary(const char* name) {
  if (g_failures == 0) {
    std::printf("%s: %d checks passed\n", name, g_checks);
    return 0;
  }
  std::printf("%s: %d of %d checks FAILED\n", name, g_failures, g_checks);
  return 1;
}

// Numerical derivative for consistency checks: centered stencil away from
// the domain edge, one-sided second-order stencil at a = 0.
template <class F>
double fd1(F&& f, double a, double h = 1e-5) {
  if (a >= h) return (f(a + h) - f(a - h)) / (2.0 * h);
  return (-3.0 * f(a) + 4.0 * f(a + h) - f(a + 2.0 * h)) / (2.0 * h);
}

template <class Ex, class Fn>
bool throws(Fn&& fn) {
  try {
    fn();
  } catch (const Ex&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace testutil

#define CHECK(cond) ::testutil::check_impl((cond), #cond, __FILE__, __LINE__)
#define CHECK_CLOSE_ABS(got, want, tol) \
  ::testutil::check_close_abs_impl((got), (want), (tol), #got, __FILE__, __LINE__)
#define CHECK_CLOSE_REL(got, want, tol) \
  ::testutil::check_close_rel_impl((got), (want), (tol), #got, __FILE__, __LINE__)
#define CHECK_THROWS(Ex, expr) \
  CHECK(::testutil::throws<Ex>([&] { (void)(expr); }))
