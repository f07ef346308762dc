#pragma once

// Experiment configuration: a small key = value format parsed into JSON,
// plus converters between JSON objects and service distributions.  One file
// describes one experiment, e.g.
//
//   lambda1 = { min = 0.05, max = 0.35, steps = 7 }
//   lambda2 = [0.6]
//   service = { kind = "exponential", rate = 1.0 }
//   methods = ["exact_mm1", "simulate"]
//
// Values are numbers, quoted strings, [value, ...] arrays, and
// { key = value, ... } tables; # starts a comment.  Parse errors throw
// ConfigError with file:line diagnostics; semantic errors name the field.

#include <string>

#include "json.hpp"

#include "aoi/distributions.hpp"

namespace aoi {

// Parses configuration text into a JSON object; origin labels error messages
// (usually the file name).
nlohmann::json parse_config_text(const std::string& text,
                                 const std::string& origin);

// Reads and parses a configuration file.
nlohmann::json load_config_file(const std::string& path);

// Builds a service distribution from { kind = "...", ... }.  Field names
// mirror the distribution parameters: exponential(rate), gamma(shape, rate),
// hyperexponential(probs, rates), lognormal(location, scale),
// pareto(scale, shape).  Unknown or missing fields throw ConfigError.
ServiceDistribution service_from_json(const nlohmann::json& j);

// Inverse of service_from_json; round-trips exactly.
nlohmann::json service_to_json(const ServiceDistribution& dist);

}  // namespace aoi
