#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "nsmlab/config.hpp"
#include "nsmlab/limit_harness.hpp"
#include "nsmlab/report.hpp"
#include "nsmlab/verification.hpp"

using namespace nsmlab;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kMmsFailed = 3 };

struct Options {
  std::string config = "default";
  std::optional<std::string> out;
  std::optional<std::string> epsilons;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool break_stencil = false;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "config file, or 'default' for built-in defaults");
  app->add_option("--out", o.out, "output directory (overrides output.directory)");
  app->add_option("--epsilons", o.epsilons, "comma-separated epsilon ladder (overrides sweep.epsilons)");
  app->add_option("--seed", o.seed, "initial-data seed (overrides ic.seed)");
  app->add_option("--threads", o.threads, "worker threads, 0 = hardware concurrency")
      ->check(CLI::NonNegativeNumber);
}

RunConfig load(const Options& o) {
  RunConfig c = parse_config(o.config);
  if (o.out) c.directory = *o.out;
  if (o.epsilons) c.epsilons = parse_number_list(*o.epsilons);
  if (o.seed) c.ic.seed = *o.seed;
  validate(c);
  return c;
}

int thread_count(const Options& o) {
  if (o.threads) return *o.threads;
  if (const char* env = std::getenv("NSM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<int>(v);
    std::cerr << "nsmlab: ignoring malformed NSM_THREADS='" << env << "'\n";
  }
  return 0;
}

int run_simulate(const RunConfig& c, int threads) {
  const Gridd g = make_grid(c);
  NsmParams p = make_params(c, c.epsilon);
  p.dt = resolve_dt(g, well_prepared_ic(g, c.ic, c.epsilon), p, c.dt);
  const PairResult r = run_pair(g, c.ic, p);
  write_file(c.directory, timeseries_name(r.epsilon), timeseries_csv(r, c.precision));
  write_file(c.directory, "manifest.txt", manifest_text(c, threads, {r}));
  std::cout << "epsilon=" << format_number(r.epsilon, 6) << " status=" << to_string(r.status)
            << " steps=" << r.steps << " sup_err_u_h1=" << format_number(r.sup.err_u_h1, 6)
            << " sup_ohm=" << format_number(r.sup.ohm, 6)
            << " M_final=" << format_number(r.m_final, 6) << "\n";
  if (r.status != RunStatus::Completed) {
    std::cerr << "nsmlab: run ended early: " << r.message << "\n";
    return kNumerical;
  }
  return kOk;
}

int run_sweep_mode(const RunConfig& c, int threads) {
  const Gridd g = make_grid(c);
  const SweepReport rep = run_sweep(g, c.ic, c.epsilons, make_params(c, c.epsilons.front()), c.dt, threads);
  const auto rows = sweep_rows(rep);
  write_file(c.directory, "sweep.csv", sweep_csv(rows, c.precision));
  for (const PairResult& r : rep.runs)
    write_file(c.directory, timeseries_name(r.epsilon), timeseries_csv(r, c.precision));
  const std::string summary = summary_text(rows);
  write_file(c.directory, "summary.txt", summary);
  write_file(c.directory, "manifest.txt", manifest_text(c, threads, rep.runs));
  std::cout << summary;
  for (const PairResult& r : rep.runs)
    if (r.status != RunStatus::Completed)
      std::cerr << "nsmlab: epsilon=" << format_number(r.epsilon, 6) << " " << to_string(r.status)
                << ": " << r.message << "\n";
  return kOk;
}

int run_mms_mode(const Options& o, const RunConfig& c) {
  const VerificationReport r = run_mms(o.break_stencil ? Fault::BrokenStencil : Fault::None);
  write_report(std::cout, r);
  if (o.out) {
    std::ostringstream os;
    write_report(os, r);
    write_file(c.directory, "mms.csv", os.str());
  }
  if (!r.all_passed()) {
    std::cerr << "nsmlab: mms verification failed\n";
    return kMmsFailed;
  }
  return kOk;
}

int run_report(const RunConfig& c) {
  const std::string path = c.directory + "/sweep.csv";
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string summary = summary_text(parse_sweep_csv(ss.str()));
  write_file(c.directory, "summary.txt", summary);
  std::cout << summary;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsmlab: compressible Navier-Stokes-Maxwell runs and their incompressible MHD limit"};
  app.require_subcommand(0, 1);
  Options top, sub;
  add_common(&app, top);

  auto* simulate = app.add_subcommand("simulate", "single-epsilon paired run, writes a time-series CSV");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep, writes sweep.csv, time series and summary");
  auto* mms = app.add_subcommand("mms", "operator and solver verification suite");
  auto* report = app.add_subcommand("report", "re-render summary.txt from an existing sweep.csv");
  for (auto* s : {simulate, sweep, mms, report}) add_common(s, sub);
  mms->add_flag("--break-stencil", sub.break_stencil)->group("");

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "nsmlab: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const bool has_sub = !app.get_subcommands().empty();
  const Options& o = has_sub ? sub : top;
  try {
    const RunConfig c = load(o);
    Mode mode = c.mode;
    if (simulate->parsed()) mode = Mode::Simulate;
    if (sweep->parsed()) mode = Mode::Sweep;
    if (mms->parsed()) mode = Mode::Mms;
    if (report->parsed()) mode = Mode::Report;
    if (!has_sub && top.config == "default") {
      std::cerr << "nsmlab: give a subcommand or a --config naming a mode\n\n" << app.help();
      return kUsage;
    }
    const int threads = thread_count(o);
    switch (mode) {
      case Mode::Simulate: return run_simulate(c, threads);
      case Mode::Sweep: return run_sweep_mode(c, threads);
      case Mode::Mms: return run_mms_mode(o, c);
      case Mode::Report: return run_report(c);
    }
  } catch (const ConfigError& e) {
    std::cerr << "nsmlab: config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "nsmlab: parameter error: " << e.what() << "\n";
    return kUsage;
  } catch (const BlowUpError& e) {
    std::cerr << "nsmlab: blow-up: " << e.what() << "\n";
    return kNumerical;
  } catch (const CflError& e) {
    std::cerr << "nsmlab: step-size error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::logic_error& e) {
    std::cerr << "nsmlab: internal error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "nsmlab: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
