#include "aoi/analytic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aoi/errors.hpp"

namespace aoi {

namespace {

// Shared pieces of the system-time transform ratio L_T = N / D with
//   N(a) = (1 - rho) a L_S(a),   D(a) = a - lambda (1 - L_S(a)).
// For a stable queue and a > 0, convexity of L_S gives
// lambda (1 - L_S(a)) <= rho a < a, so D > 0.
struct TransformParts {
  double ls, ls1, ls2;  // L_S and derivatives at a
  double d;             // denominator D(a)
  double lambda, rho;
};

TransformParts transform_parts(const QueueConfig& cfg, double a) {
  TransformParts p;
  p.lambda = cfg.total_rate();
  p.rho = cfg.rho();
  p.ls = laplace(cfg.service, a);
  p.ls1 = laplace_d1(cfg.service, a);
  p.ls2 = laplace_d2(cfg.service, a);
  p.d = a - p.lambda * (1.0 - p.ls);
  if (!(p.d > 0.0)) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "system-time transform denominator not positive at a=%g", a);
    throw Error(msg);
  }
  return p;
}

void require_positive_eval_point(double a, const char* op) {
  if (!(a > 0.0)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "%s: evaluation point must be > 0", op);
    throw std::invalid_argument(msg);
  }
}

}  // namespace

QueueConfig::QueueConfig(double lambda1_, double lambda2_,
                         ServiceDistribution service_)
    : lambda1(lambda1_), lambda2(lambda2_), service(std::move(service_)) {
  if (!(std::isfinite(lambda1) && lambda1 > 0.0))
    throw std::invalid_argument("queue config: lambda1 must be > 0");
  if (!(std::isfinite(lambda2) && lambda2 >= 0.0))
    throw std::invalid_argument("queue config: lambda2 must be >= 0");
}

double QueueConfig::rho() const { return total_rate() * mean(service); }

void require_stable(const QueueConfig& cfg) {
  const double r = cfg.rho();
  if (r >= 1.0) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "queue is unstable: rho = %.6g >= 1 "
                  "(lambda1=%g, lambda2=%g, mean service %g)",
                  r, cfg.lambda1, cfg.lambda2, mean(cfg.service));
    throw Unstable(msg);
  }
}

double mean_wait(const QueueConfig& cfg) {
  require_stable(cfg);
  return cfg.total_rate() * second_moment(cfg.service) /
         (2.0 * (1.0 - cfg.rho()));
}

double laplace_system_time(const QueueConfig& cfg, double a) {
  require_stable(cfg);
  if (a < 0.0)
    throw std::invalid_argument("laplace_system_time: argument must be >= 0");
  if (a == 0.0) return 1.0;
  const TransformParts p = transform_parts(cfg, a);
  return (1.0 - p.rho) * a * p.ls / p.d;
}

double laplace_system_time_d1(const QueueConfig& cfg, double a) {
  require_stable(cfg);
  require_positive_eval_point(a, "laplace_system_time_d1");
  const TransformParts p = transform_parts(cfg, a);
  // Quotient rule collapses to (1 - rho) G / D^2 with
  // G = lambda L_S (L_S - 1) + (a^2 - a lambda) L'_S.
  const double g =
      p.lambda * p.ls * (p.ls - 1.0) + (a * a - a * p.lambda) * p.ls1;
  return (1.0 - p.rho) * g / (p.d * p.d);
}

double laplace_system_time_d2(const QueueConfig& cfg, double a) {
  require_stable(cfg);
  require_positive_eval_point(a, "laplace_system_time_d2");
  const TransformParts p = transform_parts(cfg, a);
  const double g =
      p.lambda * p.ls * (p.ls - 1.0) + (a * a - a * p.lambda) * p.ls1;
  const double g1 = (a * a - a * p.lambda) * p.ls2 +
                    2.0 * p.ls1 * (a - p.lambda + p.lambda * p.ls);
  const double dprime = 1.0 + p.lambda * p.ls1;
  const double d2 = p.d * p.d;
  return (1.0 - p.rho) * (g1 / d2 - 2.0 * g * dprime / (d2 * p.d));
}

double p_brief(const QueueConfig& cfg) {
  return 1.0 - laplace_system_time(cfg, cfg.lambda1);
}

double p_long(const QueueConfig& cfg) { return 1.0 - p_brief(cfg); }

double aoi_approx1(const QueueConfig& cfg) {
  require_stable(cfg);
  const double l1 = cfg.lambda1;
  const double inv_mu = mean(cfg.service);
  const double rho2 = cfg.lambda2 * inv_mu;
  const double lt = laplace_system_time(cfg, l1);
  const double lt1 = laplace_system_time_d1(cfg, l1);
  return mean_wait(cfg) + 2.0 * inv_mu + (2.0 * rho2 - 1.0) / l1 +
         (2.0 * (1.0 - rho2) / l1) * lt + (rho2 - 1.0) * lt1;
}

double aoi_approx2(const QueueConfig& cfg) {
  require_stable(cfg);
  const double l1 = cfg.lambda1;
  const double inv_mu = mean(cfg.service);
  const double rho2 = cfg.lambda2 * inv_mu;
  const double lt = laplace_system_time(cfg, l1);
  const double lt1 = laplace_system_time_d1(cfg, l1);
  return mean_wait(cfg) + 2.0 * inv_mu + (2.0 * rho2 - 1.0) / l1 +
         (inv_mu + 2.0 * (1.0 - rho2) / l1) * lt +
         (rho2 - 1.0 - l1 * inv_mu) * lt1;
}

double aoi_approx3(const QueueConfig& cfg) {
  require_stable(cfg);
  const double l1 = cfg.lambda1;
  const double inv_mu = mean(cfg.service);
  const double rho2 = cfg.lambda2 * inv_mu;
  const double lt = laplace_system_time(cfg, l1);
  const double lt1 = laplace_system_time_d1(cfg, l1);
  const double lt2 = laplace_system_time_d2(cfg, l1);
  // Residual-load factor: mean backlog contribution of the background
  // stream, lambda2 E[S^2] / (2 (1 - rho2)).
  const double bg = cfg.lambda2 * second_moment(cfg.service) /
                    (2.0 * (1.0 - rho2));
  return mean_wait(cfg) + 2.0 * inv_mu + (2.0 * rho2 - 1.0) / l1 +
         (bg + 2.0 * (1.0 - rho2) / l1) * lt +
         (2.0 * rho2 - 1.0 - l1 * bg) * lt1 - l1 * rho2 * lt2;
}

double aoi_single_source_mg1(double lambda,
                             const ServiceDistribution& service) {
  const QueueConfig cfg(lambda, 0.0, service);
  require_stable(cfg);
  const double rho = cfg.rho();
  return mean(service) +
         lambda * second_moment(service) / (2.0 * (1.0 - rho)) +
         (1.0 - rho) / (lambda * laplace(service, lambda));
}

}  // namespace aoi
