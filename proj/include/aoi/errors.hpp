#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Base class for every failure this library reports deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested moment does not exist, e.g. E[S^2] of a Pareto law with shape <= 2.
struct InfiniteMoment : Error {
  using Error::Error;
};

// Adaptive integration could not reach the requested tolerance.
struct QuadratureFailure : Error {
  using Error::Error;
};

// A series truncation cannot deliver the requested accuracy.
struct TruncationFailure : Error {
  using Error::Error;
};

// The queue is not stable (total load >= 1) where a formula needs stability.
struct Unstable : Error {
  using Error::Error;
};

// An operation restricted to exponential service received another law.
struct NotExponential : Error {
  using Error::Error;
};

// A simulated source produced no deliveries inside the observation window.
struct NoDeliveries : Error {
  using Error::Error;
};

// A result exceeds the double range (use the scaled variant instead).
struct Overflow : Error {
  using Error::Error;
};

// A config file could not be parsed; message carries line/field diagnostics.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace aoi
