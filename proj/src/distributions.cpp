#include "aoi/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"

namespace aoi {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// E[S^k e^{-aS}] for log-normal S: substitute S = e^{location + scale z} and
// integrate the standard normal weight.  The window [-12.5, 12.5 + k scale]
// holds all but ~1e-35 of the mass of the shifted Gaussian that the weight
// S^k produces.
double lognormal_weighted(const LogNormal& d, double a, int k) {
  const double nu = d.location;
  const double sigma = d.scale;
  const double z_hi = 12.5 + k * sigma;
  auto f = [&](double z) {
    const double s = std::exp(nu + sigma * z);
    const double ex = -0.5 * z * z + k * (nu + sigma * z) - a * s;
    return std::isinf(s) ? 0.0 : kInvSqrt2Pi * std::exp(ex);
  };
  const double scale = std::exp(k * nu + 0.5 * k * k * sigma * sigma);
  return integrate(f, -12.5, z_hi, 1e-12 * scale);
}

// E[S^k e^{-aS}] for Pareto S: substitute S = omega e^u, giving
// alpha omega^k int_0^inf exp(g(u)) du with g(u) = (k - alpha) u - a omega e^u.
// Integrable whenever a > 0 or alpha > k; callers enforce that.
double pareto_weighted(const Pareto& d, double a, int k) {
  const double alpha = d.shape;
  const double omega = d.scale;
  const double drift = k - alpha;  // linear coefficient of g
  double u_max;
  if (a > 0.0) {
    u_max = std::log1p(750.0 / (a * omega));
    if (drift < 0.0) u_max = std::min(u_max, 100.0 / -drift);
  } else {
    u_max = 100.0 / -drift;
  }
  // Peak of g: at u = 0 when drift <= 0, else where a omega e^u = drift.
  double g_peak = -a * omega;
  if (a > 0.0 && drift > 0.0) {
    const double u_star = std::log(drift / (a * omega));
    if (u_star > 0.0) g_peak = std::max(g_peak, drift * (u_star - 1.0));
  }
  auto f = [&](double u) {
    const double w = a * omega * std::exp(u);
    return std::isinf(w) ? 0.0 : std::exp(drift * u - w);
  };
  const double tol =
      1e-12 * std::exp(g_peak) * std::max(1.0, std::min(u_max, 50.0));
  const double body = integrate(f, 0.0, u_max, tol);
  return alpha * std::pow(omega, k) * body;
}

double hyper_moment(const HyperExponential& d, int k) {
  double m = 0.0;
  const double fact = k == 2 ? 2.0 : 1.0;
  for (size_t i = 0; i < d.probs.size(); ++i)
    m += d.probs[i] * fact / std::pow(d.rates[i], k);
  return m;
}

}  // namespace

Exponential::Exponential(double rate_) : rate(rate_) {
  require(std::isfinite(rate) && rate > 0.0, "exponential: rate must be > 0");
}

Gamma::Gamma(double shape_, double rate_) : shape(shape_), rate(rate_) {
  require(std::isfinite(shape) && shape > 0.0, "gamma: shape must be > 0");
  require(std::isfinite(rate) && rate > 0.0, "gamma: rate must be > 0");
}

HyperExponential::HyperExponential(std::vector<double> probs_,
                                   std::vector<double> rates_)
    : probs(std::move(probs_)), rates(std::move(rates_)) {
  require(!probs.empty() && probs.size() == rates.size(),
          "hyperexponential: need matching, nonempty weights and rates");
  double total = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p > 0.0,
            "hyperexponential: weights must be > 0");
    total += p;
  }
  for (double g : rates)
    require(std::isfinite(g) && g > 0.0, "hyperexponential: rates must be > 0");
  require(std::fabs(total - 1.0) <= 1e-12,
          "hyperexponential: weights must sum to 1");
}

LogNormal::LogNormal(double location_, double scale_)
    : location(location_), scale(scale_) {
  require(std::isfinite(location), "lognormal: location must be finite");
  require(std::isfinite(scale) && scale > 0.0, "lognormal: scale must be > 0");
}

Pareto::Pareto(double scale_, double shape_) : scale(scale_), shape(shape_) {
  require(std::isfinite(scale) && scale > 0.0, "pareto: scale must be > 0");
  require(std::isfinite(shape) && shape > 0.0, "pareto: shape must be > 0");
  if (shape <= 1.0)
    throw InfiniteMoment("pareto: mean is infinite for shape <= 1");
}

double mean(const ServiceDistribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          return 1.0 / d.rate;
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return d.shape / d.rate;
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          return hyper_moment(d, 1);
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return std::exp(d.location + 0.5 * d.scale * d.scale);
        } else {
          return d.shape * d.scale / (d.shape - 1.0);
        }
      },
      dist);
}

double second_moment(const ServiceDistribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          return 2.0 / (d.rate * d.rate);
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return d.shape * (d.shape + 1.0) / (d.rate * d.rate);
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          return hyper_moment(d, 2);
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return std::exp(2.0 * d.location + 2.0 * d.scale * d.scale);
        } else {
          if (d.shape <= 2.0)
            throw InfiniteMoment(
                "pareto: second moment is infinite for shape <= 2");
          return d.shape * d.scale * d.scale / (d.shape - 2.0);
        }
      },
      dist);
}

double laplace(const ServiceDistribution& dist, double a) {
  require(a >= 0.0, "laplace: argument must be >= 0");
  if (a == 0.0) return 1.0;
  return std::visit(
      [a](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          return d.rate / (d.rate + a);
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return std::pow(d.rate / (d.rate + a), d.shape);
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          double v = 0.0;
          for (size_t i = 0; i < d.probs.size(); ++i)
            v += d.probs[i] * d.rates[i] / (d.rates[i] + a);
          return v;
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return std::min(1.0, lognormal_weighted(d, a, 0));
        } else {
          return std::min(1.0, pareto_weighted(d, a, 0));
        }
      },
      dist);
}

double laplace_d1(const ServiceDistribution& dist, double a) {
  require(a >= 0.0, "laplace_d1: argument must be >= 0");
  return std::visit(
      [a](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          const double m = d.rate + a;
          return -d.rate / (m * m);
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return -d.shape * std::pow(d.rate / (d.rate + a), d.shape) /
                 (d.rate + a);
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          double v = 0.0;
          for (size_t i = 0; i < d.probs.size(); ++i) {
            const double m = d.rates[i] + a;
            v -= d.probs[i] * d.rates[i] / (m * m);
          }
          return v;
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return -lognormal_weighted(d, a, 1);
        } else {
          return -pareto_weighted(d, a, 1);
        }
      },
      dist);
}

double laplace_d2(const ServiceDistribution& dist, double a) {
  require(a >= 0.0, "laplace_d2: argument must be >= 0");
  return std::visit(
      [a](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          const double m = d.rate + a;
          return 2.0 * d.rate / (m * m * m);
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return d.shape * (d.shape + 1.0) *
                 std::pow(d.rate / (d.rate + a), d.shape) /
                 ((d.rate + a) * (d.rate + a));
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          double v = 0.0;
          for (size_t i = 0; i < d.probs.size(); ++i) {
            const double m = d.rates[i] + a;
            v += d.probs[i] * 2.0 * d.rates[i] / (m * m * m);
          }
          return v;
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return lognormal_weighted(d, a, 2);
        } else {
          if (a == 0.0 && d.shape <= 2.0)
            throw InfiniteMoment(
                "pareto: second moment is infinite for shape <= 2");
          return pareto_weighted(d, a, 2);
        }
      },
      dist);
}

namespace {

// Marsaglia-Tsang rejection sampler; the shape < 1 case boosts the shape by
// one and applies the standard power-of-uniform correction.
double sample_std_gamma(double shape, RngStream& rng) {
  if (shape < 1.0) {
    const double u = rng.next_uniform();
    return sample_std_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample(const ServiceDistribution& dist, RngStream& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          return -std::log(rng.next_uniform()) / d.rate;
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return sample_std_gamma(d.shape, rng) / d.rate;
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          const double u = rng.next_uniform();
          double acc = 0.0;
          size_t pick = d.probs.size() - 1;
          for (size_t i = 0; i < d.probs.size(); ++i) {
            acc += d.probs[i];
            if (u <= acc) {
              pick = i;
              break;
            }
          }
          return -std::log(rng.next_uniform()) / d.rates[pick];
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return std::exp(d.location + d.scale * rng.next_normal());
        } else {
          return d.scale * std::pow(rng.next_uniform(), -1.0 / d.shape);
        }
      },
      dist);
}

const char* kind_name(const ServiceDistribution& dist) {
  return std::visit(
      [](const auto& d) -> const char* {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          return "exponential";
        } else if constexpr (std::is_same_v<D, Gamma>) {
          return "gamma";
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          return "hyperexponential";
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          return "lognormal";
        } else {
          return "pareto";
        }
      },
      dist);
}

}  // namespace aoi
