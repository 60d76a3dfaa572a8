#include "nsmlab/limit_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace nsmlab {

namespace {

using C = Centering;
using BP = BoundaryPolicy;
constexpr double kPi = std::numbers::pi;

// Secondary-mode coefficients in [-1/4, 1/4) and phases in [0, 2 pi).
struct Secondary {
  double c_psi, ph_psi, c_b, ph_b, c_s, ph_s;
};

Secondary draw_secondary(std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  auto unit = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  Secondary s{};
  s.c_psi = 0.5 * (unit() - 0.5);
  s.ph_psi = 2 * kPi * unit();
  s.c_b = 0.5 * (unit() - 0.5);
  s.ph_b = 2 * kPi * unit();
  s.c_s = 0.5 * (unit() - 0.5);
  s.ph_s = 2 * kPi * unit();
  return s;
}

struct Profiles {
  Fieldd psi, b, shape;
};

Profiles profiles(const Gridd& g, const ProfileSpec& spec) {
  spec.validate();
  const Secondary sec = draw_secondary(spec.seed);
  const double kx = 2 * kPi * spec.kx / g.lx(), k2 = 2 * kPi * (spec.kx + 1) / g.lx();
  const double ky = kPi / g.ly();
  const int m = spec.wall_exponent;
  Profiles out;
  out.psi = Fieldd::sample(g, C::Node, BP::Dirichlet0, [&](double x, double y) {
    const double main = std::sin(kx * x) * std::pow(std::sin(ky * y), m);
    const double second = sec.c_psi * std::sin(k2 * x + sec.ph_psi) * std::sin(2 * ky * y) / 2;
    return spec.a_v / ky * (main + second);
  });
  out.b = Fieldd::sample(g, C::Center, BP::Neumann0, [&](double x, double y) {
    return spec.a_b * (std::cos(kx * x) * std::cos(ky * y) +
                       sec.c_b * std::cos(k2 * x + sec.ph_b) * std::cos(2 * ky * y));
  });
  out.shape = Fieldd::sample(g, C::Center, BP::Neumann0, [&](double x, double y) {
    return std::sin(kx * x) * std::cos(ky * y) +
           sec.c_s * std::cos(k2 * x + sec.ph_s) * std::cos(2 * ky * y);
  });
  return out;
}

LimitErrors componentwise_max(const LimitErrors& a, const LimitErrors& b) {
  LimitErrors m;
  m.err_u_l2 = std::max(a.err_u_l2, b.err_u_l2);
  m.err_u_h1 = std::max(a.err_u_h1, b.err_u_h1);
  m.err_b_l2 = std::max(a.err_b_l2, b.err_b_l2);
  m.err_b_h1 = std::max(a.err_b_h1, b.err_b_h1);
  m.err_sigma = std::max(a.err_sigma, b.err_sigma);
  m.err_theta = std::max(a.err_theta, b.err_theta);
  m.ohm = std::max(a.ohm, b.ohm);
  return m;
}

}  // namespace

void ProfileSpec::validate() const {
  for (double v : {a_v, a_b, s_sigma, s_theta})
    if (!std::isfinite(v)) throw ParameterError("ProfileSpec: amplitudes must be finite");
  if (kx < 1) throw ParameterError("ProfileSpec: kx must be a positive integer");
  if (wall_exponent < 1 || wall_exponent % 2 == 0)
    throw ParameterError("ProfileSpec: wall_exponent must be a positive odd integer");
}

NsmState well_prepared_ic(const Gridd& g, const ProfileSpec& spec, double epsilon) {
  if (!(epsilon > 0 && epsilon <= 1))
    throw ParameterError("well_prepared_ic: epsilon must lie in (0, 1]");
  const Profiles pr = profiles(g, spec);
  NsmState s = NsmState::zeros(g);
  auto [u1, u2] = curl_of_scalar(g, pr.psi);
  s.u1 = u1.with_bc(BP::Neumann0);
  s.u2 = u2.with_bc(BP::Dirichlet0);
  s.b3 = pr.b;
  s.sigma = spec.s_sigma * pr.shape;
  s.theta = -spec.s_theta * pr.shape;
  const double rho_min = 1 + epsilon * s.sigma.data().minCoeff();
  if (rho_min < 0.5)
    throw ParameterError("well_prepared_ic: 1 + eps sigma0 drops to " + std::to_string(rho_min) +
                         " (< 0.5); lower s_sigma");
  auto [c1, c2] = curl_of_scalar(g, s.b3);
  auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
  s.e1 = (c1 - w1).with_bc(BP::Dirichlet0);
  s.e2 = (c2 - w2).with_bc(BP::Neumann0);
  return s;
}

MhdState limit_ic(const Gridd& g, const ProfileSpec& spec) {
  const Profiles pr = profiles(g, spec);
  MhdState m = MhdState::zeros(g);
  auto [u1, u2] = curl_of_scalar(g, pr.psi);
  m.v1 = u1.with_bc(BP::Neumann0);
  m.v2 = u2.with_bc(BP::Dirichlet0);
  m.bz = pr.b;
  return m;
}

double auto_dt(const Gridd& g, const NsmState& ic, const NsmParams& p, double dt_max) {
  if (!(dt_max > 0)) throw ParameterError("auto_dt: dt_max must be positive");
  if (!(p.t_end > 0)) throw ParameterError("auto_dt: t_end must be positive");
  const double target = std::min(stable_dt(g, ic, p), dt_max);
  return p.t_end / std::ceil(p.t_end / target);
}

double resolve_dt(const Gridd& g, const NsmState& ic, const NsmParams& p,
                  const TimeStepPolicy& policy) {
  if (policy.automatic) return auto_dt(g, ic, p, policy.dt_max);
  if (!(policy.fixed > 0)) throw ParameterError("time step must be positive");
  return policy.fixed;
}

int snapshot_stride(double t_end, double dt) {
  return std::max(1, static_cast<int>(std::floor(t_end / (100 * dt) + 1e-9)));
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BlowUp: return "blowup";
    case RunStatus::CflAbort: return "cfl_abort";
  }
  return "?";
}

PairResult run_pair(const Gridd& g, const ProfileSpec& spec, const NsmParams& p) {
  p.validate();
  const auto start = std::chrono::steady_clock::now();
  PairResult r;
  r.epsilon = p.epsilon;
  r.dt = p.dt;

  NsmState s = well_prepared_ic(g, spec, p.epsilon);
  MhdState m = limit_ic(g, spec);
  const int n_steps = std::max(1, static_cast<int>(std::ceil(p.t_end / p.dt - 1e-9)));
  const int stride = snapshot_stride(p.t_end, p.dt);

  std::vector<NsmState> history;
  auto record = [&] {
    history.push_back(s);
    r.times.push_back(s.time);
    r.errors.push_back(nsm_vs_mhd_error(g, s, m, p.epsilon));
  };
  record();
  try {
    for (int k = 1; k <= n_steps; ++k) {
      NsmParams q = p;
      const double t_next = k == n_steps ? p.t_end : k * p.dt;
      q.dt = t_next - s.time;
      NsmState s_next = step(g, s, q);
      MhdState m_next = mhd_step(g, m, p.mu, q.dt);
      s = std::move(s_next);
      m = std::move(m_next);
      s.time = m.time = t_next;
      r.steps = k;
      if (k % stride == 0 || k == n_steps) record();
    }
  } catch (const BlowUpError& e) {
    r.status = RunStatus::BlowUp;
    r.message = e.what();
  } catch (const CflError& e) {
    r.status = RunStatus::CflAbort;
    r.message = e.what();
  }

  r.sup = r.errors.front();
  for (const auto& e : r.errors) r.sup = componentwise_max(r.sup, e);
  r.m_final = std::numeric_limits<double>::quiet_NaN();
  if (history.size() >= 3) {
    r.m_values = discrete_M(g, history, p.epsilon).m_values;
    r.m_final = r.m_values.back();
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

FitResult fit_order(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> x, y;
  int excluded = 0;
  for (const auto& [eps, err] : points)
    if (eps > 0 && err > 0 && std::isfinite(err)) {
      x.push_back(std::log(eps));
      y.push_back(std::log(err));
    } else {
      ++excluded;
    }
  const int n = static_cast<int>(x.size());
  if (n < 3)
    throw InsufficientDataError("fit_order: need at least 3 positive points, got " +
                                std::to_string(n));
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) throw InsufficientDataError("fit_order: epsilons must not all coincide");
  FitResult f;
  f.excluded = excluded;
  f.order = sxy / sxx;
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (my + f.order * (x[i] - mx));
    ss_res += r * r;
  }
  f.r2 = syy > 0 ? 1 - ss_res / syy : 1.0;
  return f;
}

const std::vector<std::string>& sweep_metrics() {
  static const std::vector<std::string> names{"sup_err_u_l2",  "sup_err_u_h1",  "sup_err_b_l2",
                                              "sup_err_sigma", "sup_err_theta", "sup_ohm"};
  return names;
}

double sweep_metric(const LimitErrors& e, const std::string& name) {
  if (name == "sup_err_u_l2") return e.err_u_l2;
  if (name == "sup_err_u_h1") return e.err_u_h1;
  if (name == "sup_err_b_l2") return e.err_b_l2;
  if (name == "sup_err_sigma") return e.err_sigma;
  if (name == "sup_err_theta") return e.err_theta;
  if (name == "sup_ohm") return e.ohm;
  throw ParameterError("unknown sweep metric " + name);
}

std::map<std::string, MetricFit> fit_sweep(const std::vector<double>& epsilons,
                                           const std::vector<LimitErrors>& sups,
                                           const std::vector<RunStatus>& statuses) {
  std::map<std::string, MetricFit> fits;
  for (const auto& name : sweep_metrics()) {
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < epsilons.size(); ++i)
      if (statuses[i] == RunStatus::Completed) pts.emplace_back(epsilons[i], sweep_metric(sups[i], name));
    MetricFit mf;
    for (const auto& [e, v] : pts) mf.points += v > 0 ? 1 : 0;
    try {
      mf.fit = fit_order(pts);
      mf.available = true;
    } catch (const InsufficientDataError&) {
      mf.available = false;
    }
    fits[name] = mf;
  }
  return fits;
}

SweepReport run_sweep(const Gridd& g, const ProfileSpec& spec, const std::vector<double>& epsilons,
                      const NsmParams& p, const TimeStepPolicy& policy, int threads) {
  if (epsilons.size() < 3) throw ParameterError("run_sweep: need at least 3 epsilon values");
  for (size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0 && epsilons[i] <= 1))
      throw ParameterError("run_sweep: epsilon values must lie in (0, 1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw ParameterError("run_sweep: epsilon values must be strictly decreasing");
  }
  const int n = static_cast<int>(epsilons.size());
  SweepReport rep;
  rep.epsilons = epsilons;
  rep.runs.resize(n);
  std::vector<std::exception_ptr> failures(n);

  auto job = [&](int i) {
    try {
      NsmParams q = p;
      q.epsilon = epsilons[i];
      q.dt = resolve_dt(g, well_prepared_ic(g, spec, q.epsilon), q, policy);
      rep.runs[i] = run_pair(g, spec, q);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<LimitErrors> sups;
  std::vector<RunStatus> statuses;
  for (const auto& r : rep.runs) {
    sups.push_back(r.sup);
    statuses.push_back(r.status);
  }
  rep.fits = fit_sweep(epsilons, sups, statuses);
  return rep;
}

}  // namespace nsmlab
