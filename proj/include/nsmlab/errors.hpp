#pragma once

#include <stdexcept>
#include <string>

namespace nsmlab {

/// An operator was handed inputs that violate its declared contract
/// (wrong centering, missing boundary policy, mismatched grids).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A physical or numerical parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pure-Neumann Poisson problem with a right-hand side of nonzero mean.
class CompatibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Something that the discrete identities guarantee did not hold.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CflError : public std::runtime_error {
 public:
  CflError(const std::string& what, double requested, double allowed)
      : std::runtime_error(what), requested_dt(requested), allowed_dt(allowed) {}
  double requested_dt;
  double allowed_dt;
};

/// Raised when a step would produce a non-positive density or a non-finite value.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double t, double min_rho, std::string culprit)
      : std::runtime_error(what), time(t), min_density(min_rho), field(std::move(culprit)) {}
  double time;
  double min_density;
  std::string field;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line_number = 0)
      : std::runtime_error(what), line(line_number) {}
  int line;
};

}  // namespace nsmlab
