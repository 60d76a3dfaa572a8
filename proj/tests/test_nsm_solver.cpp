#include <cmath>

#include "doctest.h"
#include "nsm_support.hpp"
#include "nsmlab/helmholtz.hpp"
#include "nsmlab/nsm_solver.hpp"

using namespace nsmlab;
using namespace nsmlab::testing;
using C = Centering;
using BP = BoundaryPolicy;

namespace {

Gridd small_grid() { return Gridd(8, 8, 2 * kPi, kPi); }

int wrap(int i, int n) { return (i % n + n) % n; }

// b averaged onto FaceX / FaceY, written longhand with the mirror ghost.
double b_on_facex(const Fieldd& b, int i, int j) { return 0.5 * (b(wrap(i - 1, b.nx()), j) + b(i, j)); }
double b_on_facey(const Fieldd& b, int i, int j) {
  const int ny = b.rows();
  const double lo = j == 0 ? b(i, 0) : b(i, j - 1);
  const double hi = j == ny ? b(i, ny - 1) : b(i, j);
  return 0.5 * (lo + hi);
}

double max_abs_diff(const Fieldd& a, const Fieldd& b) { return (a.data() - b.data()).abs().maxCoeff(); }

NsmParams params(double eps) {
  NsmParams p;
  p.epsilon = eps;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  NsmParams p;
  CHECK_NOTHROW(p.validate());
  p.epsilon = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = NsmParams{};
  p.epsilon = 1.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = NsmParams{};
  p.mu = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = NsmParams{};
  p.lambda = -0.1;  // lambda + 2 mu / 3 < 0 with mu = 0.1
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.lambda = -0.06;
  CHECK_NOTHROW(p.validate());
  p = NsmParams{};
  p.kappa = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK(NsmParams{}.sound_speed() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("derived thermodynamic accessors") {
  Gridd g = small_grid();
  Uniform rnd(5);
  auto s = noise_state(g, rnd, 1.0);
  auto rho = density(s, 0.1);
  auto T = temperature(s, 0.1);
  auto p = pressure(s, 0.1, 2.0);
  CHECK(rho(3, 4) == doctest::Approx(1 + 0.1 * s.sigma(3, 4)));
  CHECK(T(3, 4) == doctest::Approx(1 + 0.1 * s.theta(3, 4)));
  CHECK(p(3, 4) == doctest::Approx(2.0 * rho(3, 4) * T(3, 4)));
}

TEST_CASE("lorentz force") {
  Gridd g = small_grid();
  Uniform rnd(11);
  SUBCASE("b = 0") {
    auto s = noise_state(g, rnd, 1.0);
    s.b3 = Fieldd::zeros(g, C::Center, BP::Neumann0);
    auto [f1, f2] = lorentz_force(g, s);
    CHECK(max_abs(f1) == 0.0);
    CHECK(max_abs(f2) == 0.0);
  }
  SUBCASE("E = 0 and u = 0") {
    auto s = NsmState::zeros(g);
    s.b3 = random_field(g, C::Center, BP::Neumann0, rnd);
    auto [f1, f2] = lorentz_force(g, s);
    CHECK(max_abs(f1) == 0.0);
    CHECK(max_abs(f2) == 0.0);
  }
  SUBCASE("random state against a pointwise oracle") {
    auto s = noise_state(g, rnd, 1.0);
    auto [f1, f2] = lorentz_force(g, s);
    CHECK(f1.centering() == C::FaceX);
    CHECK(f2.centering() == C::FaceY);
    double err = 0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double bx = b_on_facex(s.b3, i, j);
        const double g2 = s.e2(i, j) - s.u1(i, j) * bx;
        err = std::max(err, std::abs(f1(i, j) - g2 * bx));
      }
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double by = b_on_facey(s.b3, i, j);
        const double g1 = s.e1(i, j) + s.u2(i, j) * by;
        err = std::max(err, std::abs(f2(i, j) + g1 * by));
      }
    CHECK(err == 0.0);
    CHECK(f2.walls_satisfied());
  }
  SUBCASE("work done by the force is minus the Ohm pairing") {
    // <(E + u x b) x b, u> = -<E + u x b, u x b>
    for (int trial = 0; trial < 10; ++trial) {
      auto s = noise_state(g, rnd, 1.0);
      auto [f1, f2] = lorentz_force(g, s);
      auto [g1, g2] = ohm_vector(g, s);
      auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
      const double lhs = inner_product(g, f1, s.u1) + inner_product(g, f2, s.u2);
      const double rhs = -(inner_product(g, g1, w1) + inner_product(g, g2, w2));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("joule heating") {
  Gridd g = small_grid();
  Uniform rnd(12);
  SUBCASE("exact Ohm balance gives zero") {
    auto s = noise_state(g, rnd, 1.0);
    auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
    s.e1 = -w1;
    s.e2 = -w2;
    CHECK(max_abs(joule_heating(g, s)) == 0.0);
  }
  SUBCASE("u = 0, b = 0 gives |E|^2 averaged to centres") {
    auto s = NsmState::zeros(g);
    s.e1 = random_field(g, C::FaceY, BP::Dirichlet0, rnd);
    s.e2 = random_field(g, C::FaceX, BP::Neumann0, rnd);
    auto q = joule_heating(g, s);
    double err = 0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double a = 0.5 * (std::pow(s.e1(i, j), 2) + std::pow(s.e1(i, j + 1), 2));
        const double b = 0.5 * (std::pow(s.e2(i, j), 2) + std::pow(s.e2(wrap(i + 1, 8), j), 2));
        err = std::max(err, std::abs(q(i, j) - a - b));
      }
    CHECK(err <= 1e-15);
  }
  SUBCASE("random state, nonnegative and matching the oracle") {
    auto s = noise_state(g, rnd, 1.0);
    auto q = joule_heating(g, s);
    CHECK(q.data().minCoeff() >= 0.0);
    double err = 0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        auto g1 = [&](int jj) { return s.e1(i, jj) + s.u2(i, jj) * b_on_facey(s.b3, i, jj); };
        auto g2 = [&](int ii) {
          return s.e2(ii, j) - s.u1(ii, j) * b_on_facex(s.b3, ii, j);
        };
        const double want = 0.5 * (g1(j) * g1(j) + g1(j + 1) * g1(j + 1)) +
                            0.5 * (g2(i) * g2(i) + g2(wrap(i + 1, 8)) * g2(wrap(i + 1, 8)));
        err = std::max(err, std::abs(q(i, j) - want));
      }
    CHECK(err <= 1e-14);
  }
}

TEST_CASE("viscous heating") {
  Gridd g(16, 16, 1.0, 1.0);
  Uniform rnd(13);
  NsmParams p;
  SUBCASE("constant velocity") {
    auto s = NsmState::zeros(g);
    s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 3.0);
    CHECK(max_abs(viscous_heating(g, s, p)) == 0.0);
  }
  SUBCASE("rigid shear u1 = y away from the walls") {
    auto s = NsmState::zeros(g);
    s.u1 = Fieldd::sample(g, C::FaceX, BP::Neumann0, [](double, double y) { return y; });
    auto q = viscous_heating(g, s, p);
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 0; i < g.nx(); ++i) CHECK(q(i, j) == doctest::Approx(p.mu).epsilon(1e-12));
  }
  SUBCASE("random velocity against the oracle") {
    p.lambda = 0.3;
    auto s = noise_state(g, rnd, 1.0);
    auto q = viscous_heating(g, s, p);
    CHECK(q.data().minCoeff() >= 0.0);
    const int n = g.nx();
    auto d12 = [&](int i, int j) {
      const double lo = j == 0 ? s.u1(i, 0) : s.u1(i, j - 1);
      const double hi = j == g.ny() ? s.u1(i, g.ny() - 1) : s.u1(i, j);
      return 0.5 * ((hi - lo) / g.hy() + (s.u2(i, j) - s.u2(wrap(i - 1, n), j)) / g.hx());
    };
    double err = 0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < n; ++i) {
        const double a = (s.u1(wrap(i + 1, n), j) - s.u1(i, j)) / g.hx();
        const double b = (s.u2(i, j + 1) - s.u2(i, j)) / g.hy();
        double shear = 0;
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj) shear += 0.25 * std::pow(d12(wrap(i + di, n), j + dj), 2);
        const double want = 2 * p.mu * (a * a + b * b + 2 * shear) + p.lambda * (a + b) * (a + b);
        err = std::max(err, std::abs(q(i, j) - want) / std::max(1.0, std::abs(want)));
      }
    CHECK(err <= 1e-13);
  }
}

TEST_CASE("momentum advection") {
  Gridd g = small_grid();
  Uniform rnd(14);
  SUBCASE("random velocity against a longhand oracle") {
    auto s = noise_state(g, rnd, 1.0);
    auto [a1, a2] = momentum_advection(g, s.u1, s.u2);
    const int n = g.nx(), ny = g.ny();
    const double hx = g.hx(), hy = g.hy();
    auto u1 = [&](int i, int j) {
      i = wrap(i, n);
      if (j < 0) return s.u1(i, 0);
      if (j >= ny) return s.u1(i, ny - 1);
      return s.u1(i, j);
    };
    auto u2 = [&](int i, int j) { return s.u2(wrap(i, n), j); };
    auto div = [&](int i, int j) {
      return (u1(i + 1, j) - u1(i, j)) / hx + (u2(i, j + 1) - u2(i, j)) / hy;
    };
    auto c1 = [&](int i, int j) { return 0.5 * (u1(i, j) + u1(i + 1, j)); };
    auto c2 = [&](int i, int j) { return 0.5 * (u2(i, j) + u2(i, j + 1)); };
    auto nn = [&](int i, int j) {
      return 0.5 * (u1(i, j - 1) + u1(i, j)) * 0.5 * (u2(i - 1, j) + u2(i, j));
    };
    double err = 0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < n; ++i) {
        const double want = (c1(i, j) * c1(i, j) - c1(i - 1, j) * c1(i - 1, j)) / hx +
                            (nn(i, j + 1) - nn(i, j)) / hy -
                            u1(i, j) * 0.5 * (div(i - 1, j) + div(i, j));
        err = std::max(err, std::abs(a1(i, j) - want));
      }
    for (int j = 1; j < ny; ++j)
      for (int i = 0; i < n; ++i) {
        const double want = (nn(i + 1, j) - nn(i, j)) / hx +
                            (c2(i, j) * c2(i, j) - c2(i, j - 1) * c2(i, j - 1)) / hy -
                            u2(i, j) * 0.5 * (div(i, j - 1) + div(i, j));
        err = std::max(err, std::abs(a2(i, j) - want));
      }
    CHECK(err <= 1e-12);
    CHECK(a2.walls_satisfied());
  }
  SUBCASE("kinetic energy is conserved for divergence-free velocity") {
    Gridd gg(16, 16, 2 * kPi, kPi);
    for (int trial = 0; trial < 10; ++trial) {
      auto psi = random_field(gg, C::Node, BP::Dirichlet0, rnd);
      auto [u1, u2] = curl_of_scalar(gg, psi);
      CHECK(max_abs(divergence(gg, u1, u2)) < 1e-12);
      auto [a1, a2] = momentum_advection(gg, u1, u2);
      const double work = inner_product(gg, a1, u1) + inner_product(gg, a2, u2);
      const double scale = l2_norm(gg, a1) * l2_norm(gg, u1) + l2_norm(gg, a2) * l2_norm(gg, u2);
      CHECK(std::abs(work) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("maxwell substep") {
  Gridd g = small_grid();
  Uniform rnd(21);
  const NsmParams p = params(0.05);
  SUBCASE("u = 0, b constant, E = 0 is unchanged") {
    auto s = NsmState::zeros(g);
    s.b3 = Fieldd::constant(g, C::Center, BP::Neumann0, 0.7);
    auto m = maxwell_substep(g, s, p, 1e-2);
    CHECK(max_abs(m.e1) <= 1e-15);
    CHECK(max_abs(m.e2) <= 1e-15);
    CHECK(max_abs_diff(m.b3, s.b3) <= 1e-15);
  }
  SUBCASE("Ohm equilibrium with curl b = u x b and E = 0") {
    // b = const and u = 0 is the only equilibrium the channel supports cheaply;
    // add a uniform u1 so that u x b is a nonzero constant normal to the walls
    auto s = NsmState::zeros(g);
    s.b3 = Fieldd::constant(g, C::Center, BP::Neumann0, 2.0);
    s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 0.5);
    // u x b = (0, -1): E = -u x b balances, curl b = 0
    s.e2 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 1.0);
    auto m = maxwell_substep(g, s, p, 1e-2);
    CHECK(max_abs_diff(m.e2, s.e2) <= 1e-14);
    CHECK(max_abs(m.e1) <= 1e-14);
    CHECK(max_abs_diff(m.b3, s.b3) <= 1e-14);
  }
  SUBCASE("random state satisfies the update relations") {
    for (double dt : {1e-3, 1e-2, 0.3}) {
      auto s = noise_state(g, rnd, 1.0);
      auto m = maxwell_substep(g, s, p, dt);
      auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
      auto [c1, c2] = curl_of_scalar(g, m.b3);
      const double den = p.epsilon + dt;
      auto want1 = (1.0 / den) * (p.epsilon * s.e1 + dt * (c1 - w1));
      auto want2 = (1.0 / den) * (p.epsilon * s.e2 + dt * (c2 - w2));
      CHECK(max_abs_diff(m.e1, want1) <= 1e-12);
      CHECK(max_abs_diff(m.e2, want2) <= 1e-12);
      auto want_b = s.b3 - dt * curl_of_vector(g, m.e1, m.e2);
      CHECK(max_abs_diff(m.b3, want_b) <= 1e-12);
      CHECK(m.e1.walls_satisfied());
    }
  }
  SUBCASE("discrete energy identity") {
    for (int trial = 0; trial < 10; ++trial) {
      const double eps = 0.01 + 0.5 * (rnd() + 1), dt = 0.001 + 0.05 * (rnd() + 1);
      const NsmParams q = params(std::min(eps, 1.0));
      auto s = noise_state(g, rnd, 1.0);
      auto m = maxwell_substep(g, s, q, dt);
      auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
      auto energy = [&](const Fieldd& e1, const Fieldd& e2, const Fieldd& b) {
        return 0.5 * (q.epsilon * (inner_product(g, e1, e1) + inner_product(g, e2, e2)) +
                      inner_product(g, b, b));
      };
      const double lhs = energy(m.e1, m.e2, m.b3) - energy(s.e1, s.e2, s.b3);
      const double rhs =
          -dt * (inner_product(g, m.e1, m.e1) + inner_product(g, m.e2, m.e2)) -
          dt * (inner_product(g, w1, m.e1) + inner_product(g, w2, m.e2)) -
          energy(m.e1 - s.e1, m.e2 - s.e2, m.b3 - s.b3);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(energy(s.e1, s.e2, s.b3)));
    }
  }
  SUBCASE("small epsilon gives the resistive Ohm law") {
    auto s = noise_state(g, rnd, 1.0);
    auto m = maxwell_substep(g, s, params(1e-10), 1e-2);
    auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
    auto [c1, c2] = curl_of_scalar(g, m.b3);
    CHECK(max_abs_diff(m.e1, c1 - w1) <= 1e-6);
    CHECK(max_abs_diff(m.e2, c2 - w2) <= 1e-6);
  }
  SUBCASE("total b is conserved") {
    auto s = noise_state(g, rnd, 1.0);
    auto m = maxwell_substep(g, s, p, 1e-2);
    CHECK(integral(g, m.b3) == doctest::Approx(integral(g, s.b3)).epsilon(1e-13).scale(1.0));
  }
  CHECK_THROWS_AS(maxwell_substep(g, NsmState::zeros(g), params(0.1), 0.0), ParameterError);
  NsmParams bad;
  bad.epsilon = 0;
  CHECK_THROWS_AS(maxwell_substep(g, NsmState::zeros(g), bad, 1e-3), ParameterError);
}

TEST_CASE("acoustic substep") {
  Gridd g(32, 32, 2 * kPi, kPi);
  Uniform rnd(31);
  const NsmParams p = params(0.1);
  SUBCASE("kernel: div u = 0 and sigma = -theta") {
    auto s = NsmState::zeros(g);
    auto psi = smooth_field(g, C::Node, BP::Dirichlet0, rnd, 1.0);
    std::tie(s.u1, s.u2) = curl_of_scalar(g, psi);
    s.sigma = smooth_field(g, C::Center, BP::Neumann0, rnd, 1.0);
    s.theta = -s.sigma;
    auto a = acoustic_substep(g, s, p, 1e-3);
    CHECK(max_abs_diff(a.sigma, s.sigma) <= 1e-12);
    CHECK(max_abs_diff(a.theta, s.theta) <= 1e-12);
    CHECK(max_abs_diff(a.u1, s.u1) <= 1e-12);
    CHECK(max_abs_diff(a.u2, s.u2) <= 1e-12);
  }
  SUBCASE("constant sigma and theta at rest") {
    auto s = NsmState::zeros(g);
    s.sigma = Fieldd::constant(g, C::Center, BP::Neumann0, 0.3);
    s.theta = Fieldd::constant(g, C::Center, BP::Neumann0, -1.2);
    auto a = acoustic_substep(g, s, p, 1e-3);
    CHECK(max_abs_diff(a.sigma, s.sigma) <= 1e-14);
    CHECK(max_abs_diff(a.theta, s.theta) <= 1e-14);
    CHECK(max_abs(a.u1) <= 1e-12);
  }
  SUBCASE("backward-Euler residual, conservation") {
    for (double R : {1.0, 0.6}) {
      NsmParams q = p;
      q.rgas = R;
      q.cv = 2.5;
      const double dt = 1e-3, eps = q.epsilon;
      auto s = smooth_state(g, rnd, 1.0);
      auto a = acoustic_substep(g, s, q, dt);
      auto div = divergence(g, a.u1, a.u2);
      auto [gz1, gz2] = gradient(g, a.sigma + a.theta);
      double res = max_abs(a.sigma - s.sigma + (dt / eps) * div);
      res = std::max(res, max_abs(a.u1 - s.u1 + (dt * R / eps) * gz1));
      res = std::max(res, max_abs(a.u2 - s.u2 + (dt * R / eps) * gz2));
      res = std::max(res, max_abs(a.theta - s.theta + (dt * R / (q.cv * eps)) * div));
      CHECK(res <= 1e-10);
      CHECK(integral(g, a.sigma) == doctest::Approx(integral(g, s.sigma)).epsilon(1e-13).scale(1.0));
      CHECK(integral(g, a.theta) == doctest::Approx(integral(g, s.theta)).epsilon(1e-13).scale(1.0));
    }
  }
  SUBCASE("acoustic energy is dissipated") {
    // 1/2 |u|^2 + R / (2 (1 + R/cv)) |sigma + theta|^2 is conserved by the
    // frozen subsystem and cannot grow under backward Euler
    NsmParams q = p;
    q.cv = 1.0;
    auto s = smooth_state(g, rnd, 1.0);
    auto energy = [&](const Fieldd& sig, const Fieldd& u1, const Fieldd& u2, const Fieldd& th) {
      auto zeta = sig + th;
      const double gam = 1 + q.rgas / q.cv;
      return 0.5 * q.rgas / gam * inner_product(g, zeta, zeta) + 0.5 * inner_product(g, u1, u1) +
             0.5 * inner_product(g, u2, u2);
    };
    auto a = acoustic_substep(g, s, q, 1e-2);
    CHECK(energy(a.sigma, a.u1, a.u2, a.theta) <= energy(s.sigma, s.u1, s.u2, s.theta));
  }
}

TEST_CASE("diffusion substep") {
  Gridd g(32, 32, 2 * kPi, kPi);
  Uniform rnd(41);
  NsmParams p;
  SUBCASE("constants are unchanged") {
    auto s = NsmState::zeros(g);
    s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 1.5);
    s.theta = Fieldd::constant(g, C::Center, BP::Neumann0, -0.5);
    auto d = diffusion_substep(g, s, p, 1e-2);
    CHECK(max_abs_diff(d.u1, s.u1) <= 1e-14);
    CHECK(max_abs(d.u2) == 0.0);
    CHECK(max_abs_diff(d.theta, s.theta) <= 1e-14);
  }
  SUBCASE("cosine decay factor") {
    Gridd gg(128, 16, 2 * kPi, kPi);
    auto s = NsmState::zeros(gg);
    s.theta = Fieldd::sample(gg, C::Center, BP::Neumann0,
                             [](double x, double) { return std::cos(x); });
    const double dt = 1e-2;
    auto d = diffusion_substep(gg, s, p, dt);
    const double sh = std::sin(gg.hx() / 2);
    const double discrete = 1.0 / (1.0 + p.kappa * dt * 4 * sh * sh / (gg.hx() * gg.hx()));
    CHECK(max_abs_diff(d.theta, discrete * s.theta) <= 1e-14);
    const double want = 1.0 / (1.0 + p.kappa * dt);
    CHECK(max_abs_diff(d.theta, want * s.theta) <= dt * gg.hx() * gg.hx() / 12);
  }
  SUBCASE("backward-Euler residual") {
    p.lambda = 0.2;
    p.cv = 1.7;
    const double dt = 1e-3;
    auto s = smooth_state(g, rnd, 1.0);
    auto d = diffusion_substep(g, s, p, dt);
    auto [gd1, gd2] = gradient(g, divergence(g, s.u1, s.u2));
    const double lm = p.lambda + p.mu;
    double res = max_abs(d.u1 - dt * p.mu * laplacian(g, d.u1) - s.u1 - dt * lm * gd1);
    res = std::max(res, max_abs(d.u2 - dt * p.mu * laplacian(g, d.u2) - s.u2 - dt * lm * gd2));
    res = std::max(res, max_abs(d.theta - dt * p.kappa / p.cv * laplacian(g, d.theta) - s.theta));
    CHECK(res <= 1e-10);
  }
}

TEST_CASE("explicit tendency") {
  Gridd g(16, 16, 2 * kPi, kPi);
  Uniform rnd(51);
  const NsmParams p = params(0.1);
  auto all_zero = [](const Tendency& t) {
    return max_abs(t.sigma) + max_abs(t.u1) + max_abs(t.u2) + max_abs(t.theta) + max_abs(t.e1) +
               max_abs(t.e2) + max_abs(t.b3) ==
           0.0;
  };
  SUBCASE("rest state") { CHECK(all_zero(explicit_tendency(g, NsmState::zeros(g), p))); }
  SUBCASE("uniform state with constant b") {
    auto s = NsmState::zeros(g);
    s.sigma = Fieldd::constant(g, C::Center, BP::Neumann0, 0.4);
    s.theta = Fieldd::constant(g, C::Center, BP::Neumann0, -0.3);
    s.b3 = Fieldd::constant(g, C::Center, BP::Neumann0, 1.3);
    CHECK(all_zero(explicit_tendency(g, s, p)));
    CHECK(all_zero(full_tendency(g, s, p)));
  }
  SUBCASE("mass tendency against a longhand flux oracle") {
    auto s = noise_state(g, rnd, 1.0);
    auto t = explicit_tendency(g, s, p);
    const int n = g.nx(), ny = g.ny();
    auto sig = [&](int i, int j) { return s.sigma(wrap(i, n), std::clamp(j, 0, ny - 1)); };
    double err = 0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < n; ++i) {
        auto fx = [&](int ii) { return 0.5 * (sig(ii - 1, j) + sig(ii, j)) * s.u1(wrap(ii, n), j); };
        auto fy = [&](int jj) { return 0.5 * (sig(i, jj - 1) + sig(i, jj)) * s.u2(i, jj); };
        const double want = -((fx(i + 1) - fx(i)) / g.hx() + (fy(j + 1) - fy(j)) / g.hy());
        err = std::max(err, std::abs(t.sigma(i, j) - want));
      }
    CHECK(err <= 1e-12);
  }
  SUBCASE("explicit part plus the frozen implicit operators equals the full right-hand side") {
    for (double eps : {1.0, 0.1, 0.01}) {
      NsmParams q = params(eps);
      q.lambda = 0.05;
      q.cv = 1.3;
      q.rgas = 0.8;
      auto s = smooth_state(g, rnd, 0.1);
      auto te = explicit_tendency(g, s, q);
      auto tf = full_tendency(g, s, q);
      const double R = q.rgas, lm = q.lambda + q.mu;
      auto div = divergence(g, s.u1, s.u2);
      auto [gz1, gz2] = gradient(g, s.sigma + s.theta);
      auto [gd1, gd2] = gradient(g, div);
      auto lin_sigma = (-1.0 / eps) * div;
      auto lin_u1 = (-R / eps) * gz1 + q.mu * laplacian(g, s.u1) + lm * gd1;
      auto lin_u2 = (-R / eps) * gz2 + q.mu * laplacian(g, s.u2) + lm * gd2;
      auto lin_theta = (-R / (q.cv * eps)) * div + (q.kappa / q.cv) * laplacian(g, s.theta);
      const double scale = 1.0 + 1.0 / (eps * g.hx());
      CHECK(max_abs_diff(te.sigma + lin_sigma, tf.sigma) <= 1e-12 * scale);
      CHECK(max_abs_diff(te.u1 + lin_u1, tf.u1) <= 1e-12 * scale);
      CHECK(max_abs_diff(te.u2 + lin_u2, tf.u2) <= 1e-12 * scale);
      CHECK(max_abs_diff(te.theta + lin_theta, tf.theta) <= 1e-12 * scale);
    }
  }
  SUBCASE("heating switch") {
    auto s = smooth_state(g, rnd, 1.0);
    NsmParams on = p, off = p;
    off.heating = false;
    auto d = explicit_tendency(g, s, on).theta - explicit_tendency(g, s, off).theta;
    auto rho = density(s, p.epsilon);
    auto want = viscous_heating(g, s, p) + joule_heating(g, s);
    want.data() *= p.epsilon / (p.cv * rho.data());
    CHECK(max_abs_diff(d, want) <= 1e-13);
  }
  SUBCASE("nonpositive density is rejected") {
    auto s = NsmState::zeros(g);
    s.sigma(3, 3) = -20.0;
    CHECK_THROWS_AS(explicit_tendency(g, s, p), BlowUpError);
  }
}

TEST_CASE("time step limits") {
  Gridd g(32, 32, 2 * kPi, kPi);
  NsmParams p = params(0.05);
  p.t_end = 0.5;
  auto s = NsmState::zeros(g);
  const double h = std::min(g.hx(), g.hy());
  CHECK(stable_dt(g, s, p) == doctest::Approx(0.4 * h / 1e-6));
  CHECK(cfl_dt(g, s, p) == doctest::Approx(0.5));
  s.time = 0.3;
  CHECK(cfl_dt(g, s, p) == doctest::Approx(0.2));

  s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 2.0);
  const double one = stable_dt(g, s, p);
  s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 4.0);
  CHECK(stable_dt(g, s, p) == doctest::Approx(one / 2));

  p.scheme = Scheme::ExplicitRk2;
  s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 0.1);
  const double acoustic = 0.4 * 0.05 * h / std::sqrt(2.0);
  CHECK(stable_dt(g, s, p) == doctest::Approx(std::min({0.4 * h / 0.1, acoustic, 0.05})));
}

TEST_CASE("step") {
  Gridd g(16, 16, 2 * kPi, kPi);
  Uniform rnd(61);
  NsmParams p = params(0.1);
  p.dt = 1e-3;
  SUBCASE("uniform states are fixed points of both schemes") {
    for (auto scheme : {Scheme::Imex1, Scheme::ExplicitRk2}) {
      p.scheme = scheme;
      auto s = NsmState::zeros(g);
      s.sigma = Fieldd::constant(g, C::Center, BP::Neumann0, 0.5);
      s.theta = Fieldd::constant(g, C::Center, BP::Neumann0, 0.2);
      s.b3 = Fieldd::constant(g, C::Center, BP::Neumann0, -1.0);
      auto t = step(g, s, p);
      CHECK(t.time == doctest::Approx(1e-3));
      CHECK(state_distance(g, s, t) <= 1e-13);
    }
  }
  SUBCASE("mass is conserved on random data") {
    auto s = noise_state(g, rnd, 0.5);
    const double m0 = integral(g, s.sigma), b0 = integral(g, s.b3);
    const double scale = l2_norm(g, s.sigma), bscale = l2_norm(g, s.b3);
    for (int k = 0; k < 20; ++k) s = step(g, s, p);
    CHECK(std::abs(integral(g, s.sigma) - m0) <= 1e-12 * scale);
    CHECK(std::abs(integral(g, s.b3) - b0) <= 1e-12 * bscale);
  }
  SUBCASE("step-size violation") {
    auto s = NsmState::zeros(g);
    s.u1 = Fieldd::constant(g, C::FaceX, BP::Neumann0, 100.0);
    p.dt = 0.01;
    CHECK_THROWS_AS(step(g, s, p), CflError);
    try {
      step(g, s, p);
    } catch (const CflError& e) {
      CHECK(e.requested_dt == 0.01);
      CHECK(e.allowed_dt == doctest::Approx(0.4 * g.hy() / 100.0));
    }
  }
  SUBCASE("nonpositive density raises with a payload") {
    auto s = NsmState::zeros(g);
    s.sigma = Fieldd::constant(g, C::Center, BP::Neumann0, -9.0);
    s.sigma(4, 4) = -9.99;
    // a converging flow pushes the dip below -1/eps
    s.u1 = Fieldd::sample(g, C::FaceX, BP::Neumann0, [](double x, double) { return -std::sin(x); });
    p.dt = 1e-2;
    try {
      for (int k = 0; k < 200; ++k) s = step(g, s, p);
      FAIL("expected a blow-up");
    } catch (const BlowUpError& e) {
      CHECK(e.min_density <= 0.0);
      CHECK(e.field == "sigma");
      CHECK(e.time > 0.0);
    }
  }
  SUBCASE("non-finite input is reported") {
    auto s = NsmState::zeros(g);
    s.b3(2, 2) = std::nan("");
    CHECK_THROWS_AS(check_state(s, 0.1), BlowUpError);
  }
}

TEST_CASE("Imex1 and ExplicitRk2 agree at first order in dt") {
  Gridd g(32, 32, 2 * kPi, kPi);
  Uniform rnd(71);
  NsmParams p = params(0.5);
  const double T = 0.04;
  auto s0 = smooth_state(g, rnd, 0.3);
  auto run = [&](Scheme scheme, int n) {
    NsmParams q = p;
    q.scheme = scheme;
    q.dt = T / n;
    auto s = s0;
    for (int k = 0; k < n; ++k) s = step(g, s, q);
    return s;
  };
  const auto ref = run(Scheme::ExplicitRk2, 320);
  const double d1 = state_distance(g, run(Scheme::Imex1, 16), ref);
  const double d2 = state_distance(g, run(Scheme::Imex1, 32), ref);
  const double d3 = state_distance(g, run(Scheme::Imex1, 64), ref);
  MESSAGE("distances " << d1 << " " << d2 << " " << d3);
  const double p1 = std::log2(d1 / d2), p2 = std::log2(d2 / d3);
  CHECK(p1 >= 0.8);
  CHECK(p1 <= 1.25);
  CHECK(p2 >= 0.8);
  CHECK(p2 <= 1.25);
}
