#pragma once

// Well-prepared initial data, paired compressible/limit runs, epsilon sweeps
// and empirical convergence orders.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nsmlab/diagnostics.hpp"
#include "nsmlab/mhd_solver.hpp"
#include "nsmlab/nsm_solver.hpp"

namespace nsmlab {

/// Analytic family for (v0, B0, sigma0, theta0).
///   psi   = a_v (ly/pi) sin(2 pi kx x / lx) sin^m(pi y / ly)   at nodes, v0 = curl psi
///   B0    = a_B cos(2 pi kx x / lx) cos(pi y / ly)
///   sigma = s_sigma S(x, y),  theta = -s_theta S(x, y),  S = sin(2 pi kx x / lx) cos(pi y / ly)
/// plus one secondary mode per field whose coefficients (|c| <= 1/4) and
/// phases are drawn from the seed.
struct ProfileSpec {
  double a_v = 1.0;
  double a_b = 1.0;
  int kx = 1;
  int wall_exponent = 1;  // odd, so that the vorticity vanishes on the walls
  double s_sigma = 1.0;
  double s_theta = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ProfileSpec&) const = default;
};

/// Compressible initial state: u0 = v0, b0 = B0, E0 = curl B0 - v0 x B0.
NsmState well_prepared_ic(const Gridd& g, const ProfileSpec& spec, double epsilon);

/// Matching initial state of the limit system.
MhdState limit_ic(const Gridd& g, const ProfileSpec& spec);

/// t_end / ceil(t_end / min(stable_dt(ic), dt_max)): the largest admissible
/// step that lands exactly on t_end.
double auto_dt(const Gridd& g, const NsmState& ic, const NsmParams& p, double dt_max);

struct TimeStepPolicy {
  bool automatic = true;
  double fixed = 0;       // used when automatic is false
  double dt_max = 1e-3;   // cap for the automatic choice
  bool operator==(const TimeStepPolicy&) const = default;
};

double resolve_dt(const Gridd& g, const NsmState& ic, const NsmParams& p, const TimeStepPolicy& policy);

/// Steps between stored snapshots: max(1, floor(t_end / (100 dt))).
int snapshot_stride(double t_end, double dt);

enum class RunStatus { Completed, BlowUp, CflAbort };
const char* to_string(RunStatus s);

struct PairResult {
  double epsilon = 0;
  RunStatus status = RunStatus::Completed;
  std::string message;              // abort reason, empty when completed
  double dt = 0;
  int steps = 0;
  std::vector<double> times;        // snapshot instants
  std::vector<LimitErrors> errors;  // one per snapshot
  std::vector<double> m_values;     // discrete M at each snapshot (empty if < 3 snapshots)
  LimitErrors sup;                  // componentwise max over snapshots
  double m_final = 0;               // NaN when M is unavailable
  double wall_seconds = 0;
};

/// Runs both systems from matched data to p.t_end with step p.dt. Blow-ups
/// and step-size aborts end the run early and are reported in the status.
PairResult run_pair(const Gridd& g, const ProfileSpec& spec, const NsmParams& p);

struct FitResult {
  double order = 0;
  double r2 = 0;
  int excluded = 0;  // points dropped for a non-positive or non-finite error
};

/// Least-squares slope of log(error) against log(epsilon). Non-positive
/// errors are skipped; fewer than 3 usable points is an InsufficientDataError.
FitResult fit_order(const std::vector<std::pair<double, double>>& points);

struct MetricFit {
  bool available = false;
  FitResult fit;
  int points = 0;
};

struct SweepReport {
  std::vector<double> epsilons;                 // strictly decreasing
  std::vector<PairResult> runs;                 // same order
  std::map<std::string, MetricFit> fits;        // keyed by sweep column name
};

/// Names of the sup-in-time metrics carried in sweep reports, in column order.
const std::vector<std::string>& sweep_metrics();
double sweep_metric(const LimitErrors& e, const std::string& name);

/// Fits every sweep metric over the completed runs.
std::map<std::string, MetricFit> fit_sweep(const std::vector<double>& epsilons,
                                           const std::vector<LimitErrors>& sups,
                                           const std::vector<RunStatus>& statuses);

/// One run_pair per epsilon, at most `threads` at a time (0 = hardware
/// concurrency). The result does not depend on the thread count.
SweepReport run_sweep(const Gridd& g, const ProfileSpec& spec, const std::vector<double>& epsilons,
                      const NsmParams& p, const TimeStepPolicy& policy, int threads);

}  // namespace nsmlab
