#include "nsmlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nsmlab {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string sweep_header() {
  std::string h = "epsilon,status";
  for (const auto& m : sweep_metrics()) h += "," + m;
  return h + ",M_final\n";
}

double parse_cell(const std::string& s, int line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("sweep.csv line " + std::to_string(line) + ": bad number '" + s + "'", line);
}

}  // namespace

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::vector<SweepRow> sweep_rows(const SweepReport& r) {
  std::vector<SweepRow> rows;
  for (const PairResult& run : r.runs) {
    SweepRow row;
    row.epsilon = run.epsilon;
    row.status = to_string(run.status);
    for (const auto& m : sweep_metrics()) row.sups.push_back(sweep_metric(run.sup, m));
    row.m_final = run.m_final;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, int precision) {
  std::string out = sweep_header();
  for (const SweepRow& r : rows) {
    out += format_number(r.epsilon, precision) + "," + r.status;
    for (double v : r.sups) out += "," + format_number(v, precision);
    out += "," + format_number(r.m_final, precision) + "\n";
  }
  return out;
}

std::string timeseries_csv(const PairResult& r, int precision) {
  std::string out = "t,err_u_l2,err_u_h1,err_b_l2,err_sigma,err_theta,ohm,M\n";
  for (size_t k = 0; k < r.times.size(); ++k) {
    const LimitErrors& e = r.errors[k];
    const double m = k < r.m_values.size() ? r.m_values[k] : std::nan("");
    for (double v : {r.times[k], e.err_u_l2, e.err_u_h1, e.err_b_l2, e.err_sigma, e.err_theta, e.ohm})
      out += format_number(v, precision) + ",";
    out += format_number(m, precision) + "\n";
  }
  return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line + "\n" != sweep_header())
    throw ConfigError("sweep.csv line 1: unexpected header", 1);
  const size_t width = sweep_metrics().size() + 3;
  std::vector<SweepRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != width)
      throw ConfigError("sweep.csv line " + std::to_string(n) + ": expected " +
                            std::to_string(width) + " columns",
                        n);
    SweepRow r;
    r.epsilon = parse_cell(cells[0], n);
    r.status = cells[1];
    for (size_t k = 2; k + 1 < width; ++k) r.sups.push_back(parse_cell(cells[k], n));
    r.m_final = parse_cell(cells.back(), n);
    rows.push_back(r);
  }
  return rows;
}

std::string summary_text(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  char buf[256];
  int completed = 0;
  for (const SweepRow& r : rows) completed += r.status == "completed";
  os << "runs: " << rows.size() << " (" << completed << " completed)\n\n";
  os << "epsilon      status      M_final\n";
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-12.6g %-11s %s\n", r.epsilon, r.status.c_str(),
                  format_number(r.m_final, 6).c_str());
    os << buf;
  }

  std::vector<double> eps;
  std::vector<LimitErrors> sups;
  std::vector<RunStatus> statuses;
  for (const SweepRow& r : rows) {
    eps.push_back(r.epsilon);
    LimitErrors e;
    e.err_u_l2 = r.sups.at(0);
    e.err_u_h1 = r.sups.at(1);
    e.err_b_l2 = r.sups.at(2);
    e.err_sigma = r.sups.at(3);
    e.err_theta = r.sups.at(4);
    e.ohm = r.sups.at(5);
    sups.push_back(e);
    statuses.push_back(r.status == "completed" ? RunStatus::Completed
                       : r.status == "blowup" ? RunStatus::BlowUp
                                              : RunStatus::CflAbort);
  }
  const auto fits = fit_sweep(eps, sups, statuses);

  os << "\nmetric           order     r2        points  ratios\n";
  for (size_t m = 0; m < sweep_metrics().size(); ++m) {
    const std::string& name = sweep_metrics()[m];
    const MetricFit& f = fits.at(name);
    if (f.available)
      std::snprintf(buf, sizeof buf, "%-16s %-9.4f %-9.6f %-7d", name.c_str(), f.fit.order, f.fit.r2,
                    f.points);
    else
      std::snprintf(buf, sizeof buf, "%-16s %-9s %-9s %-7d", name.c_str(), "n/a", "n/a", f.points);
    os << buf;
    for (size_t i = 1; i < rows.size(); ++i) {
      const double a = rows[i - 1].sups[m], b = rows[i].sups[m];
      os << (i > 1 ? " " : "") << format_number(a > 0 ? b / a : std::nan(""), 4);
    }
    os << "\n";
  }
  return os.str();
}

std::string timeseries_name(double epsilon) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "timeseries_eps%g.csv", epsilon);
  return buf;
}

std::string manifest_text(const RunConfig& c, int threads, const std::vector<PairResult>& runs) {
  std::ostringstream os;
  os << "# nsmlab run manifest\n";
  os << "threads = " << threads << "\n";
  for (const PairResult& r : runs) {
    os << "run eps=" << format_number(r.epsilon) << " status=" << to_string(r.status)
       << " dt=" << format_number(r.dt) << " steps=" << r.steps
       << " wall_seconds=" << format_number(r.wall_seconds, 6);
    if (!r.message.empty()) os << " message=\"" << r.message << "\"";
    os << "\n";
  }
  os << "# config\n" << emit_config(c);
  return os.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("error writing " + path.string());
}

}  // namespace nsmlab
