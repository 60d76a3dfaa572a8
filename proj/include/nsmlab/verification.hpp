#pragma once

// Operator and solver verification: manufactured-solution convergence,
// discrete identities, summation by parts and Helmholtz round trips.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace nsmlab {

struct Check {
  std::string name;
  double value = 0;
  double lower = 0;  // pass iff lower <= value <= upper
  double upper = 0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool all_passed() const;
  void append(const VerificationReport& other);
};

/// Test hook: replaces the Laplacian under test by an inconsistent stencil so
/// that the convergence checks must fail.
enum class Fault { None, BrokenStencil };

/// Error ratios of gradient, divergence, both curls and the Laplacian on
/// trigonometric fields under 32 -> 64 -> 128 refinement; accepted in [3.5, 4.5].
VerificationReport operator_convergence(Fault fault = Fault::None);

/// div(curl) = 0, curl(grad) = 0 and the two summation-by-parts pairings on
/// random fields, relative to the natural scale; accepted below 1e-12.
VerificationReport discrete_identities(std::uint64_t seed = 1);

/// Relative residual of helmholtz_solve over `instances` random right-hand
/// sides per (alpha, beta) regime; accepted below 1e-12.
VerificationReport helmholtz_exactness(int instances = 100, std::uint64_t seed = 2);

VerificationReport run_mms(Fault fault = Fault::None);

/// One "name,value,lower,upper,PASS|FAIL" line per check after a header.
void write_report(std::ostream& os, const VerificationReport& r);

}  // namespace nsmlab
