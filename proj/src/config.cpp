#include "nsmlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace nsmlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v) {
  double out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError("expected a finite number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_integer(const std::string& v) {
  Int out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key real(const char* name, double RunConfig::*m) {
  return {name, [m](RunConfig& c, const std::string& v) { c.*m = to_double(v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Key integer(const char* name, int RunConfig::*m) {
  return {name, [m](RunConfig& c, const std::string& v) { c.*m = to_integer<int>(v); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      integer("grid.nx", &RunConfig::nx),
      integer("grid.ny", &RunConfig::ny),
      real("grid.lx", &RunConfig::lx),
      real("grid.ly", &RunConfig::ly),
      real("physics.mu", &RunConfig::mu),
      real("physics.lambda", &RunConfig::lambda),
      real("physics.kappa", &RunConfig::kappa),
      real("physics.cv", &RunConfig::cv),
      real("physics.rgas", &RunConfig::rgas),
      real("physics.epsilon", &RunConfig::epsilon),
      {"physics.scheme",
       [](RunConfig& c, const std::string& v) {
         if (v == "imex1")
           c.scheme = Scheme::Imex1;
         else if (v == "rk2")
           c.scheme = Scheme::ExplicitRk2;
         else
           throw ConfigError("physics.scheme must be imex1 or rk2, got '" + v + "'");
       },
       [](const RunConfig& c) { return std::string(c.scheme == Scheme::Imex1 ? "imex1" : "rk2"); }},
      {"time.dt",
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") {
           c.dt.automatic = true;
           c.dt.fixed = 0;
         } else {
           c.dt.automatic = false;
           c.dt.fixed = to_double(v);
         }
       },
       [](const RunConfig& c) { return c.dt.automatic ? std::string("auto") : fmt(c.dt.fixed); }},
      {"time.dt_max", [](RunConfig& c, const std::string& v) { c.dt.dt_max = to_double(v); },
       [](const RunConfig& c) { return fmt(c.dt.dt_max); }},
      real("time.t_end", &RunConfig::t_end),
      {"sweep.epsilons", [](RunConfig& c, const std::string& v) { c.epsilons = parse_number_list(v); },
       [](const RunConfig& c) {
         std::string s;
         for (size_t i = 0; i < c.epsilons.size(); ++i) s += (i ? "," : "") + fmt(c.epsilons[i]);
         return s;
       }},
      {"ic.a_v", [](RunConfig& c, const std::string& v) { c.ic.a_v = to_double(v); },
       [](const RunConfig& c) { return fmt(c.ic.a_v); }},
      {"ic.a_b", [](RunConfig& c, const std::string& v) { c.ic.a_b = to_double(v); },
       [](const RunConfig& c) { return fmt(c.ic.a_b); }},
      {"ic.kx", [](RunConfig& c, const std::string& v) { c.ic.kx = to_integer<int>(v); },
       [](const RunConfig& c) { return std::to_string(c.ic.kx); }},
      {"ic.wall_exponent",
       [](RunConfig& c, const std::string& v) { c.ic.wall_exponent = to_integer<int>(v); },
       [](const RunConfig& c) { return std::to_string(c.ic.wall_exponent); }},
      {"ic.s_sigma", [](RunConfig& c, const std::string& v) { c.ic.s_sigma = to_double(v); },
       [](const RunConfig& c) { return fmt(c.ic.s_sigma); }},
      {"ic.s_theta", [](RunConfig& c, const std::string& v) { c.ic.s_theta = to_double(v); },
       [](const RunConfig& c) { return fmt(c.ic.s_theta); }},
      {"ic.seed", [](RunConfig& c, const std::string& v) { c.ic.seed = to_integer<std::uint64_t>(v); },
       [](const RunConfig& c) { return std::to_string(c.ic.seed); }},
      {"output.directory",
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) throw ConfigError("output.directory must not be empty");
         c.directory = v;
       },
       [](const RunConfig& c) { return c.directory; }},
      integer("output.precision", &RunConfig::precision),
      {"mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "simulate")
           c.mode = Mode::Simulate;
         else if (v == "sweep")
           c.mode = Mode::Sweep;
         else if (v == "mms")
           c.mode = Mode::Mms;
         else if (v == "report")
           c.mode = Mode::Report;
         else
           throw ConfigError("mode must be simulate, sweep, mms or report, got '" + v + "'");
       },
       [](const RunConfig& c) { return std::string(to_string(c.mode)); }},
  };
  return table;
}

struct Violation {
  std::string key;
  std::string message;
};

std::optional<Violation> first_violation(const RunConfig& c) {
  auto fail = [](const char* key, const std::string& msg) {
    return std::optional<Violation>(Violation{key, std::string(key) + ": " + msg});
  };
  if (c.nx < 8) return fail("grid.nx", "must be an integer >= 8");
  if (c.ny < 8) return fail("grid.ny", "must be an integer >= 8");
  if (!(c.lx > 0)) return fail("grid.lx", "must be positive");
  if (!(c.ly > 0)) return fail("grid.ly", "must be positive");
  if (!(c.mu > 0)) return fail("physics.mu", "viscosity must satisfy mu > 0");
  if (!(c.lambda + 2 * c.mu / 3 >= 0))
    return fail("physics.lambda", "must satisfy lambda + 2 mu / 3 >= 0");
  if (!(c.kappa > 0)) return fail("physics.kappa", "must be positive");
  if (!(c.cv > 0)) return fail("physics.cv", "must be positive");
  if (!(c.rgas > 0)) return fail("physics.rgas", "must be positive");
  if (!(c.epsilon > 0 && c.epsilon <= 1))
    return fail("physics.epsilon", "must satisfy 0 < epsilon <= 1");
  if (!c.dt.automatic && !(c.dt.fixed > 0)) return fail("time.dt", "must be 'auto' or positive");
  if (!(c.dt.dt_max > 0)) return fail("time.dt_max", "must be positive");
  if (!(c.t_end > 0)) return fail("time.t_end", "must be positive");
  if (c.epsilons.size() < 3) return fail("sweep.epsilons", "needs at least 3 values");
  for (size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > 0 && c.epsilons[i] <= 1))
      return fail("sweep.epsilons", "every value must satisfy 0 < epsilon <= 1");
    if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1]))
      return fail("sweep.epsilons", "values must be strictly decreasing");
  }
  if (c.ic.kx < 1) return fail("ic.kx", "must be a positive integer");
  if (c.ic.wall_exponent < 1 || c.ic.wall_exponent % 2 == 0)
    return fail("ic.wall_exponent", "must be a positive odd integer");
  if (c.precision < 1 || c.precision > 17) return fail("output.precision", "must lie in [1, 17]");
  return std::nullopt;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Sweep: return "sweep";
    case Mode::Mms: return "mms";
    case Mode::Report: return "report";
  }
  return "?";
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
    const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    const Key* k = nullptr;
    for (const Key& cand : keys())
      if (key == cand.name) k = &cand;
    if (!k) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
    if (seen.count(key))
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "' (first on line " +
                            std::to_string(seen[key]) + ")",
                        line);
    seen[key] = line;
    try {
      k->set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + e.what(), line);
    }
  }
  if (auto v = first_violation(c)) {
    const int at = seen.count(v->key) ? seen[v->key] : 0;
    throw ConfigError(at ? "line " + std::to_string(at) + ": " + v->message : v->message, at);
  }
  return c;
}

RunConfig parse_config(const std::string& path) {
  if (path == "default") return RunConfig{};
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(c) + "\n";
  return out;
}

void validate(const RunConfig& c) {
  if (auto v = first_violation(c)) throw ConfigError(v->message);
}

Gridd make_grid(const RunConfig& c) { return Gridd(c.nx, c.ny, c.lx, c.ly); }

NsmParams make_params(const RunConfig& c, double epsilon) {
  NsmParams p;
  p.epsilon = epsilon;
  p.mu = c.mu;
  p.lambda = c.lambda;
  p.kappa = c.kappa;
  p.cv = c.cv;
  p.rgas = c.rgas;
  p.t_end = c.t_end;
  p.scheme = c.scheme;
  return p;
}

}  // namespace nsmlab
