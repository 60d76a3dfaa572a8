#pragma once

// CSV, summary and manifest text for runs and sweeps.

#include <string>
#include <vector>

#include "nsmlab/config.hpp"
#include "nsmlab/limit_harness.hpp"

namespace nsmlab {

/// printf("%.*g"); non-finite values print as nan, inf, -inf.
std::string format_number(double v, int precision = 17);

/// One row of sweep.csv.
struct SweepRow {
  double epsilon = 0;
  std::string status;
  std::vector<double> sups;  // in sweep_metrics() order
  double m_final = 0;
};

std::vector<SweepRow> sweep_rows(const SweepReport& r);

std::string sweep_csv(const std::vector<SweepRow>& rows, int precision = 17);
std::string timeseries_csv(const PairResult& r, int precision = 17);

/// Inverse of sweep_csv; ConfigError (with line) on a malformed file.
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// Statuses, per-metric order fits and consecutive ratios, from the rows alone.
std::string summary_text(const std::vector<SweepRow>& rows);

/// "timeseries_eps0.025.csv"
std::string timeseries_name(double epsilon);

/// Run metadata (kept out of the data files): config echo, threads, timings.
std::string manifest_text(const RunConfig& c, int threads, const std::vector<PairResult>& runs);

/// Writes text to dir/name, creating dir if needed.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace nsmlab
