#pragma once

// Transient occupancy of an M/M/1 queue and the double integral that turns it
// into the exact average Age of Information for a tagged source sharing an
// exponential server with background traffic.

#include <aoi/analytic.hpp>
#include <aoi/errors.hpp>

namespace aoi {

// Occupancy query: an M/M/1 queue with arrival rate lambda2 and service rate
// mu holds exactly j packets at time zero; asks for the probability that it
// holds exactly m packets tau time units later.
struct TransientQuery {
  int j;
  int m;
  double lambda2;
  double mu;
  double tau;

  // Validates: j, m >= 0; mu > 0; lambda2 >= 0; tau >= 0; lambda2/mu < 1
  // (the stationary tail term requires a stable queue; throws Unstable).
  TransientQuery(int initial, int target, double arrival_rate,
                 double service_rate, double elapsed);
};

// Order convention for the first reflection term of the occupancy formula.
// The closed form circulates in two spellings that differ in the first
// Bessel term's order and load exponent: m - j (consistent with the
// reflection argument and with the CTMC oracle) and m - 1 (a variant that
// coincides with the former only when j = 1).  The m - 1 spelling is kept
// selectable so tests can document that it disagrees with the oracle.
enum class ReflectionIndex { m_minus_j, m_minus_1 };

// P(queue holds m at time tau | held j at time 0), evaluated from the
// closed reflection form in exponentially scaled Bessel / Marcum terms so
// no intermediate overflows.  Throws TruncationFailure if the underlying
// series cannot reach 1e-10 absolute accuracy.
double transient_prob(const TransientQuery& q,
                      ReflectionIndex idx = ReflectionIndex::m_minus_j);

// Same probability computed by uniformization of the birth-death chain on a
// truncated state space (truncation level chosen so the neglected mass is
// below 1e-12).  Slower; exists to validate transient_prob independently.
double ctmc_oracle(const TransientQuery& q);

// Truncation controls for psi().  Zero for any bound means "derive from the
// decay rates"; explicit values are honored as hard limits and psi() throws
// TruncationFailure when a hard limit clips mass it cannot bound below the
// accuracy budget.
struct PsiTruncation {
  int m_max = 0;        // occupancy summation cap
  int j_max = 0;        // background-packet-count summation cap
  double t_max = 0.0;   // inner integration cap (default 50 / (mu - lambda2))
  double tau_max = 0.0; // outer integration cap (default 50 / lambda1)
  double abs_tol = 1e-7;
};

// Parameters of the interference integral
//   Psi = int_0^inf int_0^inf (t + tau) e^{-mu (t + rho1 tau)}
//           * sum_{m,j} m Pbar_{m|j}(tau) (lambda2 t)^j / j!  dtau dt,
// the transient-queue ingredient of the exact tagged-source AoI.  The
// lambda1 (1 - rho) prefactor that converts Psi into the conditional
// moment E[W X | long interarrival] * P(long interarrival) is left to the
// caller.
struct PsiParams {
  double mu;
  double rho1;
  double lambda2;
  PsiTruncation truncation;

  // Validates mu > 0, rho1 > 0, lambda2 >= 0, rho1 + lambda2/mu < 1
  // (throws Unstable otherwise) and resolves zero truncation bounds to
  // their rate-derived defaults.
  PsiParams(double service_rate, double load1, double arrival2,
            PsiTruncation trunc = {});
};

// Evaluates the integral above by iterated adaptive quadrature over
// geometric windows of the two semi-infinite axes, with the occupancy sums
// truncated under provable tail bounds so the absolute error stays within
// truncation.abs_tol.  Throws TruncationFailure or QuadratureFailure when
// that is impossible within the configured bounds.
double psi(const PsiParams& p);

// Exact average AoI of source 1 for exponential service: the psi integral
// plus a closed-form remainder.  abs_tol is the absolute accuracy of the
// returned AoI (the integral's own tolerance is scaled accordingly).
// Throws NotExponential for any other service law and Unstable when
// lambda1 + lambda2 >= mu.
double aoi_exact_mm1(const QueueConfig& cfg, double abs_tol = 1e-7);

}  // namespace aoi
