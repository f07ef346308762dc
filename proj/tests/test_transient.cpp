// Transient-occupancy checks.  The closed reflection form is validated
// against an independent uniformization oracle on a parameter grid, against
// the pure-death closed form at lambda2 = 0, and against the stationary
// distribution at large elapsed times; the interference integral is
// cross-checked by a brute-force re-evaluation that routes every occupancy
// mean through per-query transient_prob calls instead of the library's
// shared series tables.

#include "aoi/transient.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"
#include "test_util.hpp"

namespace {

double prob(int j, int m, double l2, double mu, double tau) {
  return aoi::transient_prob(aoi::TransientQuery(j, m, l2, mu, tau));
}

double oracle(int j, int m, double l2, double mu, double tau) {
  return aoi::ctmc_oracle(aoi::TransientQuery(j, m, l2, mu, tau));
}

double psi_at(double mu, double rho1, double l2, double tol,
              aoi::PsiTruncation tr = {}) {
  tr.abs_tol = tol;
  return aoi::psi(aoi::PsiParams(mu, rho1, l2, tr));
}

// Independent evaluation of the interference integral: same quadrature
// driver, but every occupancy mean is summed from individual
// transient_prob calls (fresh Bessel and Marcum evaluations per term), so
// a slip in the library's shared tables or running recurrences would show
// up as a mismatch.  The m sum stops on the same provable geometric tail
// bound the library uses, at a 1e-9 cutoff.
double brute_psi(double mu, double rho1, double lambda2, double abs_tol) {
  const double lam1 = rho1 * mu;
  const double drain = mu - lambda2;
  const double r = std::sqrt(lambda2 / mu);
  const double tail_slope = r / (1.0 - r);
  const double tail_flat = r / ((1.0 - r) * (1.0 - r));
  auto outer = [&](double tau) {
    std::vector<double> mean;  // mean[j], filled on first use at this tau
    auto mean_at = [&](int j) {
      if (j >= static_cast<int>(mean.size())) mean.resize(j + 1, -1.0);
      if (mean[j] >= 0.0) return mean[j];
      double acc = 0.0;
      for (int m = 1;; ++m) {
        const double p = prob(j, m, lambda2, mu, tau);
        acc += m * p;
        if (m > j && p * (m * tail_slope + tail_flat) < 1e-9) break;
      }
      return mean[j] = acc;
    };
    auto inner = [&](double t) {
      const double y = lambda2 * t;
      const int hi = static_cast<int>(std::ceil(y + 8.5 * std::sqrt(y) + 10.0));
      const int lo = static_cast<int>(
          std::max(0.0, std::floor(y - 8.5 * std::sqrt(y) - 10.0)));
      double pj = lo == 0 ? std::exp(-y)
                          : std::exp(lo * std::log(y) - y -
                                     std::lgamma(lo + 1.0));
      double s = 0.0;
      for (int j = lo; j <= hi; ++j) {
        s += pj * mean_at(j);
        pj *= y / (j + 1.0);
      }
      return (t + tau) * std::exp(-drain * t) * s;
    };
    const double h = aoi::integrate_decaying(inner, drain,
                                             0.1 * abs_tol * lam1,
                                             50.0 / drain);
    return std::exp(-lam1 * tau) * h;
  };
  return aoi::integrate_decaying(outer, lam1, 0.5 * abs_tol, 50.0 / lam1);
}

// The exact-age remainder that pairs with the interference integral,
// written directly from the load fractions.
double remainder_by_loads(double mu, double rho1, double rho2) {
  const double rho = rho1 + rho2;
  const double g2 = (1.0 - rho2) * (1.0 - rho2);
  return (1.0 / rho1 + rho / (1.0 - rho) +
          (2.0 * rho2 - 1.0) * (rho - 1.0) / g2 +
          2.0 * rho1 * rho2 * (rho - 1.0) / (g2 * (1.0 - rho2))) /
         mu;
}

// The same remainder assembled through the steady-state transform of the
// system time, as mean wait plus transform terms at a = lambda1.  Equality
// of the two assemblies is a pure algebraic identity for exponential
// service, so any disagreement is an implementation defect in one of them.
double remainder_by_transforms(double mu, double rho1, double rho2) {
  const double l1 = rho1 * mu;
  const double l2 = rho2 * mu;
  const aoi::QueueConfig cfg(l1, l2, aoi::Exponential(mu));
  const double lt = aoi::laplace_system_time(cfg, l1);
  const double lt1 = aoi::laplace_system_time_d1(cfg, l1);
  const double lt2 = aoi::laplace_system_time_d2(cfg, l1);
  return aoi::mean_wait(cfg) + (2.0 / mu) * (l2 / l1 + 1.0) - 1.0 / l1 +
         (2.0 * (1.0 - rho2) / l1) * lt + (2.0 * rho2 - 1.0) * lt1 -
         l1 * rho2 * lt2;
}

}  // namespace

int main() {
  // --- tau = 0: the chain has not moved ---
  for (auto [j, m] : {std::pair{0, 0}, {2, 2}, {3, 1}}) {
    CHECK_CLOSE_ABS(prob(j, m, 0.5, 1.0, 0.0), j == m ? 1.0 : 0.0, 0.0);
    CHECK_CLOSE_ABS(oracle(j, m, 0.5, 1.0, 0.0), j == m ? 1.0 : 0.0, 1e-12);
  }

  // --- lambda2 = 0: pure death, Poisson-count closed form ---
  {
    const double mu = 1.3, tau = 0.7, y = mu * tau;
    const int j = 3;
    // P(exactly j - m services in tau) for 1 <= m <= j.
    for (int m = 1; m <= j; ++m) {
      const double want =
          std::exp(-y) * std::pow(y, j - m) / std::tgamma(j - m + 1.0);
      CHECK_CLOSE_ABS(prob(j, m, 0.0, mu, tau), want, 1e-12);
    }
    // m = 0 absorbs the upper tail; m > j is unreachable.
    double tail = 1.0;
    for (int k = 0; k < j; ++k)
      tail -= std::exp(-y) * std::pow(y, k) / std::tgamma(k + 1.0);
    CHECK_CLOSE_ABS(prob(j, 0, 0.0, mu, tau), tail, 1e-12);
    CHECK(prob(j, j + 1, 0.0, mu, tau) == 0.0);
    for (int m = 0; m <= j + 1; ++m)
      CHECK_CLOSE_ABS(prob(j, m, 0.0, mu, tau), oracle(j, m, 0.0, mu, tau),
                      1e-10);
  }

  // --- large tau: geometric stationary occupancy, any start ---
  for (auto [l2, mu] : {std::pair{0.6, 1.0}, {1.5, 2.5}}) {
    const double rho2 = l2 / mu, tau = 500.0 / mu;
    for (int j : {0, 4})
      for (int m = 0; m <= 6; ++m)
        CHECK_CLOSE_ABS(prob(j, m, l2, mu, tau),
                        (1.0 - rho2) * std::pow(rho2, m), 1e-6);
  }

  // --- closed form vs uniformization oracle across the grid ---
  {
    double worst = 0.0;
    for (auto [l2, mu] : {std::pair{0.45, 1.0}, {1.5, 2.5}})
      for (double tau : {0.25, 0.8, 2.0, 6.0})
        for (int j = 0; j <= 5; ++j)
          for (int m = 0; m <= 5; ++m) {
            const double d =
                std::fabs(prob(j, m, l2, mu, tau) - oracle(j, m, l2, mu, tau));
            if (d > worst) worst = d;
          }
    CHECK(worst <= 1e-8);
  }

  // --- frozen spot value (midway through relaxation, start above target) ---
  CHECK_CLOSE_ABS(oracle(2, 0, 0.3, 1.0, 1.7), 0.366635582869654, 1e-10);
  CHECK_CLOSE_ABS(prob(2, 0, 0.3, 1.0, 1.7), 0.366635582869654, 1e-9);

  // --- normalization over target states ---
  {
    double s = 0.0;
    for (int m = 0; m <= 60; ++m) s += prob(2, m, 0.6, 1.0, 1.0);
    CHECK_CLOSE_ABS(s, 1.0, 1e-8);
    s = 0.0;
    for (int m = 0; m <= 60; ++m) s += prob(0, m, 1.5, 2.5, 2.0);
    CHECK_CLOSE_ABS(s, 1.0, 1e-8);
    s = 0.0;
    for (int m = 0; m <= 80; ++m) s += oracle(2, m, 0.6, 1.0, 1.0);
    CHECK_CLOSE_ABS(s, 1.0, 1e-10);
  }

  // --- the two circulating spellings of the first reflection term ---
  {
    const aoi::TransientQuery at_j1(1, 2, 0.6, 1.0, 1.0);
    CHECK(aoi::transient_prob(at_j1, aoi::ReflectionIndex::m_minus_j) ==
          aoi::transient_prob(at_j1, aoi::ReflectionIndex::m_minus_1));
    const aoi::TransientQuery at_j2(2, 1, 0.6, 1.0, 1.0);
    const double std_form =
        aoi::transient_prob(at_j2, aoi::ReflectionIndex::m_minus_j);
    const double variant =
        aoi::transient_prob(at_j2, aoi::ReflectionIndex::m_minus_1);
    const double ref = aoi::ctmc_oracle(at_j2);
    CHECK_CLOSE_ABS(std_form, ref, 1e-9);
    CHECK_CLOSE_ABS(variant, 0.348678335236, 1e-9);
    CHECK(std::fabs(variant - ref) > 1e-4);  // the variant is not the law
  }

  // --- query validation ---
  CHECK_THROWS(std::invalid_argument, aoi::TransientQuery(-1, 0, 0.5, 1, 1));
  CHECK_THROWS(std::invalid_argument, aoi::TransientQuery(0, -2, 0.5, 1, 1));
  CHECK_THROWS(std::invalid_argument, aoi::TransientQuery(0, 0, -0.1, 1, 1));
  CHECK_THROWS(std::invalid_argument, aoi::TransientQuery(0, 0, 0.5, 0, 1));
  CHECK_THROWS(std::invalid_argument, aoi::TransientQuery(0, 0, 0.5, 1, -1));
  CHECK_THROWS(aoi::Unstable, aoi::TransientQuery(0, 0, 1.0, 1.0, 1));

  // --- interference integral ---
  CHECK(psi_at(1.0, 0.3, 0.0, 1e-7) == 0.0);
  {
    const double tiny = psi_at(1.0, 0.3, 1e-9, 1e-7);
    CHECK(tiny > 0.0);
    CHECK(tiny < 1e-6);
  }
  // Strictly increasing in the background load.
  {
    const double p1 = psi_at(1.0, 0.3, 0.1, 1e-5);
    const double p2 = psi_at(1.0, 0.3, 0.3, 1e-5);
    const double p3 = psi_at(1.0, 0.3, 0.5, 1e-5);
    const double p4 = psi_at(1.0, 0.3, 0.65, 1e-3);
    CHECK(p1 > 0.0);
    CHECK(p1 < p2);
    CHECK(p2 < p3);
    CHECK(p3 < p4);
  }
  // Halving the tolerance moves the value by less than the tolerance.
  {
    const double loose = psi_at(1.0, 0.3, 0.4, 1e-6);
    const double tight = psi_at(1.0, 0.3, 0.4, 5e-7);
    CHECK(std::fabs(loose - tight) < 1e-6);
  }
  // Bit-for-bit deterministic.
  CHECK(psi_at(1.0, 0.3, 0.4, 1e-5) == psi_at(1.0, 0.3, 0.4, 1e-5));
  // Doubling the integration caps is invisible at the same tolerance: the
  // defaults already cover the mass.
  {
    aoi::PsiTruncation wide;
    wide.t_max = 2.0 * 50.0 / 0.65;
    wide.tau_max = 2.0 * 50.0 / 0.45;
    CHECK_CLOSE_ABS(psi_at(1.0, 0.45, 0.35, 1e-4, wide),
                    psi_at(1.0, 0.45, 0.35, 1e-4), 1e-4);
  }
  // Brute-force cross-check through the public occupancy law.
  CHECK_CLOSE_ABS(psi_at(1.0, 0.45, 0.2, 2e-5), brute_psi(1.0, 0.45, 0.2, 2e-5),
                  3e-4);
  // Hard truncation limits that clip real mass must refuse, not degrade.
  {
    aoi::PsiTruncation low_m;
    low_m.m_max = 3;
    CHECK_THROWS(aoi::TruncationFailure,
                 aoi::psi(aoi::PsiParams(1.0, 0.3, 0.5, low_m)));
    aoi::PsiTruncation low_j;
    low_j.j_max = 2;
    CHECK_THROWS(aoi::TruncationFailure,
                 aoi::psi(aoi::PsiParams(1.0, 0.3, 0.5, low_j)));
  }
  // Parameter validation.
  CHECK_THROWS(aoi::Unstable, aoi::PsiParams(1.0, 0.4, 0.6));
  CHECK_THROWS(std::invalid_argument, aoi::PsiParams(0.0, 0.3, 0.4));
  {
    aoi::PsiTruncation bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS(std::invalid_argument, aoi::PsiParams(1.0, 0.3, 0.4, bad));
    aoi::PsiTruncation neg;
    neg.t_max = -1.0;
    CHECK_THROWS(std::invalid_argument, aoi::PsiParams(1.0, 0.3, 0.4, neg));
  }

  // --- exact exponential-service age ---
  {
    const aoi::ServiceDistribution exp1{aoi::Exponential(1.0)};
    // No background traffic: matches the single-source closed form exactly,
    // and a vanishing background rate approaches it.
    const double single = aoi::aoi_single_source_mg1(0.5, exp1);
    CHECK_CLOSE_ABS(aoi::aoi_exact_mm1({0.5, 0.0, exp1}), single, 1e-9);
    CHECK_CLOSE_ABS(aoi::aoi_exact_mm1({0.5, 1e-9, exp1}, 1e-9), single, 1e-6);
    // Frozen value with real background traffic.
    CHECK_CLOSE_ABS(aoi::aoi_exact_mm1({0.3, 0.4, exp1}), 6.0845574935,
                    1.1e-7);
    // Age can never beat a service time.
    CHECK(aoi::aoi_exact_mm1({0.3, 0.4, exp1}, 1e-5) > 1.0);
    CHECK_THROWS(aoi::NotExponential,
                 aoi::aoi_exact_mm1({0.3, 0.4, aoi::Gamma(2.0, 2.0)}));
    CHECK_THROWS(aoi::Unstable, aoi::aoi_exact_mm1({0.6, 0.6, exp1}));
  }

  // --- the closed-form remainder agrees with its transform assembly ---
  for (double mu : {1.0, 2.5})
    for (double rho1 : {0.1, 0.3, 0.45})
      for (double rho2 : {0.1, 0.3, 0.5})
        CHECK_CLOSE_REL(remainder_by_transforms(mu, rho1, rho2),
                        remainder_by_loads(mu, rho1, rho2), 1e-10);

  return testutil::summary("test_transient");
}
