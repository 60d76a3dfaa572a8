#include "nsmlab/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "nsmlab/helmholtz.hpp"
#include "nsmlab/operators.hpp"

namespace nsmlab {

namespace {

using C = Centering;
using BP = BoundaryPolicy;
using Fn = std::function<double(double, double)>;

constexpr double kLx = 2.0, kLy = 1.0;
constexpr double kA = 2 * std::numbers::pi / kLx, kB = std::numbers::pi / kLy;

Check make_check(std::string name, double value, double lower, double upper) {
  return {std::move(name), value, lower, upper, value >= lower && value <= upper};
}

// Even about both walls (Neumann-compatible).
double p_fn(double x, double y) {
  return std::cos(kA * x + 0.3) * std::cos(kB * y) + 0.5 * std::sin(2 * kA * x) * std::cos(2 * kB * y);
}
double p_x(double x, double y) {
  return -kA * std::sin(kA * x + 0.3) * std::cos(kB * y) + kA * std::cos(2 * kA * x) * std::cos(2 * kB * y);
}
double p_y(double x, double y) {
  return -kB * std::cos(kA * x + 0.3) * std::sin(kB * y) - kB * std::sin(2 * kA * x) * std::sin(2 * kB * y);
}
double p_lap(double x, double y) {
  const double k2 = kA * kA + kB * kB;
  return -k2 * std::cos(kA * x + 0.3) * std::cos(kB * y) -
         2 * k2 * std::sin(2 * kA * x) * std::cos(2 * kB * y);
}

// Odd about both walls (Dirichlet-compatible).
double q_fn(double x, double y) {
  return std::cos(kA * x + 0.7) * std::sin(kB * y) + 0.3 * std::sin(2 * kA * x) * std::sin(2 * kB * y);
}
double q_x(double x, double y) {
  return -kA * std::sin(kA * x + 0.7) * std::sin(kB * y) + 0.6 * kA * std::cos(2 * kA * x) * std::sin(2 * kB * y);
}
double q_y(double x, double y) {
  return kB * std::cos(kA * x + 0.7) * std::cos(kB * y) + 0.6 * kB * std::sin(2 * kA * x) * std::cos(2 * kB * y);
}
double q_lap(double x, double y) {
  const double k2 = kA * kA + kB * kB;
  return -k2 * std::cos(kA * x + 0.7) * std::sin(kB * y) -
         1.2 * k2 * std::sin(2 * kA * x) * std::sin(2 * kB * y);
}

double max_error(const Gridd& g, const Fieldd& computed, const Fn& exact) {
  const Fieldd e = Fieldd::sample(g, computed.centering(), BP::None, exact);
  return (computed.data() - e.data()).abs().maxCoeff();
}

Fieldd laplacian_under_test(const Gridd& g, const Fieldd& f, Fault fault) {
  Fieldd out = laplacian(g, f);
  if (fault == Fault::BrokenStencil) {
    Fieldd wrong = f;
    wrong *= 1.0 / g.hx();
    out += wrong;
  }
  return out;
}

// Error of each operator on an n x n grid, in a fixed order.
std::vector<double> operator_errors(int n, Fault fault) {
  const Gridd g(n, n, kLx, kLy);
  const Fieldd p = Fieldd::sample(g, C::Center, BP::Neumann0, p_fn);
  const Fieldd q_face = Fieldd::sample(g, C::FaceY, BP::Dirichlet0, q_fn);
  const Fieldd u1 = Fieldd::sample(g, C::FaceX, BP::Neumann0, p_fn);
  std::vector<double> err;

  auto [gx, gy] = gradient(g, p);
  err.push_back(std::max(max_error(g, gx, p_x), max_error(g, gy, p_y)));

  err.push_back(max_error(g, divergence(g, u1, q_face),
                          [](double x, double y) { return p_x(x, y) + q_y(x, y); }));

  auto [c1, c2] = curl_of_scalar(g, p);
  auto [n1, n2] = curl_of_scalar(g, Fieldd::sample(g, C::Node, BP::Dirichlet0, q_fn));
  err.push_back(std::max({max_error(g, c1, p_y),
                          max_error(g, c2, [](double x, double y) { return -p_x(x, y); }),
                          max_error(g, n1, q_y),
                          max_error(g, n2, [](double x, double y) { return -q_x(x, y); })}));

  err.push_back(max_error(g, curl_of_vector(g, q_face, u1),
                          [](double x, double y) { return p_x(x, y) - q_y(x, y); }));

  err.push_back(std::max(max_error(g, laplacian_under_test(g, p, fault), p_lap),
                         max_error(g, laplacian_under_test(g, q_face, fault), q_lap)));
  return err;
}

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-52 - 1.0; }

 private:
  std::mt19937_64 engine_;
};

Fieldd random_field(const Gridd& g, C c, BP bc, Uniform& rnd) {
  Fieldd f = Fieldd::zeros(g, c, bc);
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < f.nx(); ++i) f(i, j) = rnd();
  f.enforce_walls();
  return f;
}

}  // namespace

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void VerificationReport::append(const VerificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

VerificationReport operator_convergence(Fault fault) {
  static const char* names[] = {"gradient", "divergence", "curl_of_scalar", "curl_of_vector",
                                "laplacian"};
  const std::vector<double> e32 = operator_errors(32, fault), e64 = operator_errors(64, fault),
                            e128 = operator_errors(128, fault);
  VerificationReport r;
  for (size_t k = 0; k < e32.size(); ++k) {
    r.checks.push_back(make_check(std::string(names[k]) + "_ratio_32_64", e32[k] / e64[k], 3.5, 4.5));
    r.checks.push_back(make_check(std::string(names[k]) + "_ratio_64_128", e64[k] / e128[k], 3.5, 4.5));
  }
  return r;
}

VerificationReport discrete_identities(std::uint64_t seed) {
  const Gridd g(48, 40, kLx, kLy);
  const double inv_cell = 1.0 / (g.hx() * g.hy());
  Uniform rnd(seed);
  double div_curl = 0, curl_grad = 0, sbp_div = 0, sbp_curl = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Fieldd b = random_field(g, C::Center, BP::Neumann0, rnd);
    const Fieldd psi = random_field(g, C::Node, BP::Dirichlet0, rnd);
    auto [c1, c2] = curl_of_scalar(g, b);
    auto [v1, v2] = curl_of_scalar(g, psi);
    div_curl = std::max({div_curl, max_abs(divergence(g, c1, c2)) / (max_abs(b) * inv_cell),
                         max_abs(divergence(g, v1, v2)) / (max_abs(psi) * inv_cell)});

    const Fieldd p = random_field(g, C::Center, BP::Neumann0, rnd);
    const Fieldd w = random_field(g, C::Node, BP::Neumann0, rnd);
    auto [gx, gy] = gradient(g, p);
    auto [hx, hy] = gradient(g, w);
    curl_grad = std::max({curl_grad, max_abs(curl_of_vector(g, gx, gy)) / (max_abs(p) * inv_cell),
                          max_abs(curl_of_vector(g, hx, hy)) / (max_abs(w) * inv_cell)});

    // <grad p, u> = -<p, div u> for u2 = 0 on the walls
    const Fieldd u1 = random_field(g, C::FaceX, BP::Neumann0, rnd);
    const Fieldd u2 = random_field(g, C::FaceY, BP::Dirichlet0, rnd);
    const double lhs = inner_product(g, gx, u1) + inner_product(g, gy, u2);
    const double rhs = -inner_product(g, p, divergence(g, u1, u2));
    const double scale = std::sqrt(inner_product(g, gx, gx) + inner_product(g, gy, gy)) *
                         std::sqrt(inner_product(g, u1, u1) + inner_product(g, u2, u2));
    sbp_div = std::max(sbp_div, std::abs(lhs - rhs) / scale);

    // <curl b, E> = <b, curl E> for E1 = 0 on the walls
    const Fieldd e1 = random_field(g, C::FaceY, BP::Dirichlet0, rnd);
    const Fieldd e2 = random_field(g, C::FaceX, BP::Neumann0, rnd);
    const double l2 = inner_product(g, c1, e1) + inner_product(g, c2, e2);
    const double r2 = inner_product(g, b, curl_of_vector(g, e1, e2));
    const double scale2 = std::sqrt(inner_product(g, c1, c1) + inner_product(g, c2, c2)) *
                          std::sqrt(inner_product(g, e1, e1) + inner_product(g, e2, e2));
    sbp_curl = std::max(sbp_curl, std::abs(l2 - r2) / scale2);
  }
  VerificationReport r;
  r.checks.push_back(make_check("div_curl_zero", div_curl, 0, 1e-12));
  r.checks.push_back(make_check("curl_grad_zero", curl_grad, 0, 1e-12));
  r.checks.push_back(make_check("sbp_grad_div", sbp_div, 0, 1e-12));
  r.checks.push_back(make_check("sbp_curl_curl", sbp_curl, 0, 1e-12));
  return r;
}

VerificationReport helmholtz_exactness(int instances, std::uint64_t seed) {
  struct Layout {
    C c;
    BP bc;
  };
  static const Layout all[] = {{C::Center, BP::Neumann0}, {C::Center, BP::Dirichlet0},
                               {C::FaceX, BP::Neumann0},  {C::FaceY, BP::Dirichlet0},
                               {C::FaceY, BP::Neumann0},  {C::Node, BP::Dirichlet0}};
  static const Layout neumann[] = {{C::Center, BP::Neumann0}, {C::FaceX, BP::Neumann0}};
  struct Regime {
    const char* name;
    double alpha, beta;
  };
  static const Regime regimes[] = {{"helmholtz_a1_b1e-3", 1, 1e-3}, {"helmholtz_a1_b0.1", 1, 0.1},
                                   {"helmholtz_a1_b10", 1, 10},     {"helmholtz_a2_b3", 2, 3},
                                   {"poisson_neumann", 0, 1}};
  const Gridd g(32, 32, 2 * std::numbers::pi, std::numbers::pi);
  Uniform rnd(seed);
  VerificationReport r;
  for (const Regime& reg : regimes) {
    const bool singular = reg.alpha == 0;
    double worst = 0;
    for (int k = 0; k < instances; ++k) {
      const Layout& lay = singular ? neumann[k % 2] : all[k % 6];
      Fieldd rhs = random_field(g, lay.c, lay.bc, rnd);
      if (singular) rhs.data() -= rhs.data().mean();
      const Fieldd phi = helmholtz_solve(g, reg.alpha, reg.beta, rhs);
      const Fieldd res = apply_helmholtz(g, reg.alpha, reg.beta, phi) - rhs;
      worst = std::max(worst, max_abs(res) / max_abs(rhs));
    }
    r.checks.push_back(make_check(reg.name, worst, 0, 1e-12));
  }
  return r;
}

VerificationReport run_mms(Fault fault) {
  VerificationReport r = operator_convergence(fault);
  r.append(discrete_identities());
  r.append(helmholtz_exactness());
  return r;
}

void write_report(std::ostream& os, const VerificationReport& r) {
  os << "check,value,lower,upper,result\n";
  char buf[256];
  for (const Check& c : r.checks) {
    std::snprintf(buf, sizeof buf, "%s,%.6e,%.6g,%.6g,%s\n", c.name.c_str(), c.value, c.lower,
                  c.upper, c.passed ? "PASS" : "FAIL");
    os << buf;
  }
}

}  // namespace nsmlab
