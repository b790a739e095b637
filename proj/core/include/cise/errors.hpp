#pragma once

#include <stdexcept>
#include <string>

namespace cise {

// Curve geometry too ill-conditioned to certify: coincident control points,
// vanishing tangents, or a nonpositive lower speed bound.
class DegenerateSegmentError : public std::runtime_error {
 public:
  explicit DegenerateSegmentError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke a documented precondition (bad dimension, non-unit normal,
// invalid boundary, parameter out of range).
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Inputs are well formed but fail a semantic gate: an initial set that does
// not certify, or a boundary handed to a stage that requires a verified one.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A data file exists but cannot be used: malformed CSV, wrong header, or
// content that violates a format invariant.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A config file cannot be parsed or fails schema validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cise
