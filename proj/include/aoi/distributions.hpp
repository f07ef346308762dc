#pragma once

// Service-time laws: exponential, gamma, hyper-exponential, log-normal, and
// Pareto.  Each exposes exact moments where they exist in closed form, the
// Laplace transform L_S(a) = E[e^{-aS}] with its first two derivatives
// (closed form when elementary, adaptive quadrature otherwise), and an
// inverse-CDF / rejection sampler driven by an explicit stream.

#include <variant>
#include <vector>

#include "aoi/rng.hpp"

namespace aoi {

// Parameters are validated at construction; invalid values throw
// std::invalid_argument, and a Pareto shape too small for a finite mean
// throws InfiniteMoment.

struct Exponential {
  double rate;
  explicit Exponential(double rate);
};

struct Gamma {
  double shape, rate;
  Gamma(double shape, double rate);
};

struct HyperExponential {
  std::vector<double> probs, rates;  // mixture weights and component rates
  HyperExponential(std::vector<double> probs, std::vector<double> rates);
};

struct LogNormal {
  double location, scale;  // mean and standard deviation of ln S
  LogNormal(double location, double scale);
};

struct Pareto {
  double scale, shape;  // support [scale, inf), tail exponent shape
  Pareto(double scale, double shape);
};

using ServiceDistribution =
    std::variant<Exponential, Gamma, HyperExponential, LogNormal, Pareto>;

// E[S].  Positive and finite for every constructible distribution.
double mean(const ServiceDistribution& dist);

// E[S^2].  Throws InfiniteMoment for Pareto with shape <= 2; every other
// law (and Pareto with shape > 2) has it in closed form.
double second_moment(const ServiceDistribution& dist);

// L_S(a) = E[e^{-aS}] for a >= 0; lies in (0, 1].
double laplace(const ServiceDistribution& dist, double a);

// dL_S/da = -E[S e^{-aS}]  (always <= 0).
double laplace_d1(const ServiceDistribution& dist, double a);

// d^2 L_S / da^2 = E[S^2 e^{-aS}]  (always >= 0).  At a = 0 this is the
// second moment, so Pareto with shape <= 2 throws InfiniteMoment there;
// for a > 0 it is finite for every law.
double laplace_d2(const ServiceDistribution& dist, double a);

// One draw; consumes only the given stream, so sequences are reproducible
// per stream regardless of scheduling.
double sample(const ServiceDistribution& dist, RngStream& rng);

// Lower-case law name for messages and serialization.
const char* kind_name(const ServiceDistribution& dist);

}  // namespace aoi
