#include "nsmlab/nsm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsmlab/helmholtz.hpp"

namespace nsmlab {

namespace {

using C = Centering;
using BP = BoundaryPolicy;
using Array = Fieldd::Array;

Fieldd like(const Fieldd& f, Array data) { return Fieldd(f.centering(), f.bc(), std::move(data)); }

Fieldd with_policy(Fieldd f, BP bc) {
  f.set_bc(bc);
  f.enforce_walls();
  return f;
}

void require_positive(double v, const char* name) {
  if (!(v > 0)) throw ParameterError(std::string("NsmParams: ") + name + " must be positive");
}

double min_h(const Gridd& g) { return std::min(g.hx(), g.hy()); }

}  // namespace

void NsmParams::validate() const {
  if (!(epsilon > 0 && epsilon <= 1)) throw ParameterError("NsmParams: epsilon must lie in (0, 1]");
  require_positive(mu, "mu");
  if (!(lambda + 2.0 * mu / 3.0 >= 0))
    throw ParameterError("NsmParams: lambda + 2 mu / 3 must be nonnegative");
  require_positive(kappa, "kappa");
  require_positive(cv, "cv");
  require_positive(rgas, "rgas");
  require_positive(dt, "dt");
  if (!(t_end >= 0)) throw ParameterError("NsmParams: t_end must be nonnegative");
}

double NsmParams::sound_speed() const { return std::sqrt(rgas * (1 + rgas / cv)); }

NsmState NsmState::zeros(const Gridd& g) {
  NsmState s;
  s.sigma = Fieldd::zeros(g, C::Center, BP::Neumann0);
  s.u1 = Fieldd::zeros(g, C::FaceX, BP::Neumann0);
  s.u2 = Fieldd::zeros(g, C::FaceY, BP::Dirichlet0);
  s.theta = Fieldd::zeros(g, C::Center, BP::Neumann0);
  s.e1 = Fieldd::zeros(g, C::FaceY, BP::Dirichlet0);
  s.e2 = Fieldd::zeros(g, C::FaceX, BP::Neumann0);
  s.b3 = Fieldd::zeros(g, C::Center, BP::Neumann0);
  return s;
}

Tendency Tendency::zeros(const Gridd& g) {
  auto s = NsmState::zeros(g);
  return {s.sigma, s.u1, s.u2, s.theta, s.e1, s.e2, s.b3};
}

Fieldd density(const NsmState& s, double epsilon) {
  return like(s.sigma, 1.0 + epsilon * s.sigma.data());
}

Fieldd temperature(const NsmState& s, double epsilon) {
  return like(s.theta, 1.0 + epsilon * s.theta.data());
}

Fieldd pressure(const NsmState& s, double epsilon, double rgas) {
  return like(s.sigma, rgas * (1.0 + epsilon * s.sigma.data()) * (1.0 + epsilon * s.theta.data()));
}

FieldPair<double> u_cross_b(const Gridd& g, const Fieldd& u1, const Fieldd& u2, const Fieldd& b3) {
  auto by = interpolate(g, b3, C::FaceY);
  auto bx = interpolate(g, b3, C::FaceX);
  return {with_policy(u2 * by, BP::Dirichlet0), with_policy(-(u1 * bx), BP::Neumann0)};
}

FieldPair<double> ohm_vector(const Gridd& g, const NsmState& s) {
  auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
  return {with_policy(s.e1 + w1, BP::Dirichlet0), with_policy(s.e2 + w2, BP::Neumann0)};
}

FieldPair<double> lorentz_force(const Gridd& g, const NsmState& s) {
  auto [g1, g2] = ohm_vector(g, s);
  auto bx = interpolate(g, s.b3, C::FaceX);
  auto by = interpolate(g, s.b3, C::FaceY);
  return {with_policy(g2 * bx, BP::Neumann0), with_policy(-(g1 * by), BP::Dirichlet0)};
}

Fieldd joule_heating(const Gridd& g, const NsmState& s) {
  auto [g1, g2] = ohm_vector(g, s);
  auto a = interpolate(g, g1 * g1, C::Center);
  auto b = interpolate(g, g2 * g2, C::Center);
  return with_policy(a + b, BP::Neumann0);
}

Fieldd viscous_heating(const Gridd& g, const NsmState& s, const NsmParams& p) {
  auto zx = Fieldd::zeros(g, C::FaceX, BP::Neumann0);
  auto zy = Fieldd::zeros(g, C::FaceY, BP::Dirichlet0);
  const Array d11 = divergence(g, s.u1, zy).data();
  const Array d22 = divergence(g, zx, s.u2).data();
  // curl of (-u1, u2) is du2/dx + du1/dy, i.e. twice the shear strain at nodes
  auto shear = 0.5 * curl_of_vector(g, -s.u1, s.u2);
  const Array d12sq = interpolate(g, shear * shear, C::Center).data();
  const Array div = d11 + d22;
  Array out = 2 * p.mu * (d11.square() + d22.square() + 2 * d12sq) + p.lambda * div.square();
  return Fieldd(C::Center, BP::Neumann0, std::move(out));
}

FieldPair<double> momentum_advection(const Gridd& g, const Fieldd& u1, const Fieldd& u2) {
  auto c1 = interpolate(g, u1, C::Center);
  auto c2 = interpolate(g, u2, C::Center);
  auto n12 = interpolate(g, u1, C::Node) * interpolate(g, u2, C::Node);
  auto g11 = gradient(g, c1 * c1);
  auto g22 = gradient(g, c2 * c2);
  auto g12 = gradient(g, n12);  // (FaceY, FaceX)
  auto div = divergence(g, u1, u2);
  Array a1 = g11.first.data() + g12.second.data() -
             u1.data() * interpolate(g, div, C::FaceX).data();
  Array a2 = g12.first.data() + g22.second.data() -
             u2.data() * interpolate(g, div, C::FaceY).data();
  return {Fieldd(C::FaceX, BP::Neumann0, std::move(a1)),
          with_policy(Fieldd(C::FaceY, BP::Dirichlet0, std::move(a2)), BP::Dirichlet0)};
}

MaxwellUpdate maxwell_substep(const Gridd& g, const NsmState& s, const NsmParams& p, double dt) {
  const double eps = p.epsilon;
  if (!(eps > 0)) throw ParameterError("maxwell_substep: epsilon must be positive");
  if (!(dt > 0)) throw ParameterError("maxwell_substep: dt must be positive");
  const double den = eps + dt;
  auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
  // b' = b - dt curl E' with E' = (eps E + dt (curl b' - u x b)) / (eps + dt)
  auto r1 = eps * s.e1 - dt * w1;
  auto r2 = eps * s.e2 - dt * w2;
  auto rhs = s.b3 - (dt / den) * curl_of_vector(g, r1, r2);
  auto b = helmholtz_solve(g, 1.0, dt * dt / den, rhs, BP::Neumann0);
  auto [c1, c2] = curl_of_scalar(g, b);
  auto e1 = with_policy((1.0 / den) * (eps * s.e1 + dt * (c1 - w1)), BP::Dirichlet0);
  auto e2 = with_policy((1.0 / den) * (eps * s.e2 + dt * (c2 - w2)), BP::Neumann0);
  return {std::move(e1), std::move(e2), std::move(b)};
}

AcousticUpdate acoustic_substep(const Gridd& g, const NsmState& s, const NsmParams& p, double dt) {
  const double eps = p.epsilon, R = p.rgas, gam = 1 + p.rgas / p.cv;
  if (!(eps > 0)) throw ParameterError("acoustic_substep: epsilon must be positive");
  auto zeta = s.sigma + s.theta;
  auto rhs = zeta - (dt / eps * gam) * divergence(g, s.u1, s.u2);
  auto zn = helmholtz_solve(g, 1.0, dt * dt * R * gam / (eps * eps), rhs, BP::Neumann0);
  auto [gz1, gz2] = gradient(g, zn);
  AcousticUpdate out;
  out.u1 = with_policy(s.u1 - (dt * R / eps) * gz1, BP::Neumann0);
  out.u2 = with_policy(s.u2 - (dt * R / eps) * gz2, BP::Dirichlet0);
  auto div = divergence(g, out.u1, out.u2);
  out.sigma = with_policy(s.sigma - (dt / eps) * div, BP::Neumann0);
  out.theta = with_policy(s.theta - (dt * R / (p.cv * eps)) * div, BP::Neumann0);
  return out;
}

DiffusionUpdate diffusion_substep(const Gridd& g, const NsmState& s, const NsmParams& p, double dt) {
  auto [gd1, gd2] = gradient(g, divergence(g, s.u1, s.u2));
  const double lm = p.lambda + p.mu;
  DiffusionUpdate out;
  out.u1 = helmholtz_solve(g, 1.0, dt * p.mu, s.u1 + dt * lm * gd1, BP::Neumann0);
  out.u2 = helmholtz_solve(g, 1.0, dt * p.mu, s.u2 + dt * lm * gd2, BP::Dirichlet0);
  out.theta = helmholtz_solve(g, 1.0, dt * p.kappa / p.cv, s.theta, BP::Neumann0);
  return out;
}

namespace {

// Pieces shared by the explicit and the full right-hand side.
struct Terms {
  Array rho, sx, sy;           // density at centres, sigma at faces
  Fieldd div;                  // div u
  Fieldd mass_flux_div;        // div(sigma u)
  Fieldd theta_adv;            // div(theta u) - theta div u
  FieldPair<double> adv;       // momentum advection
  FieldPair<double> grad_zeta, grad_st, grad_div, lap_u, force;
  Fieldd lap_theta, heat;
};

Terms assemble(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const double eps = p.epsilon;
  Terms t;
  t.rho = 1.0 + eps * s.sigma.data();
  if (!(t.rho.minCoeff() > 0))
    throw BlowUpError("nonpositive density in tendency evaluation", s.time, t.rho.minCoeff(),
                      "sigma");
  auto sx = interpolate(g, s.sigma, C::FaceX), sy = interpolate(g, s.sigma, C::FaceY);
  t.sx = sx.data();
  t.sy = sy.data();
  t.div = divergence(g, s.u1, s.u2);
  t.mass_flux_div = divergence(g, sx * s.u1, sy * s.u2);
  auto tx = interpolate(g, s.theta, C::FaceX), ty = interpolate(g, s.theta, C::FaceY);
  t.theta_adv = divergence(g, tx * s.u1, ty * s.u2) - s.theta * t.div;
  t.adv = momentum_advection(g, s.u1, s.u2);
  t.grad_zeta = gradient(g, s.sigma + s.theta);
  t.grad_st = gradient(g, s.sigma * s.theta);
  t.grad_div = gradient(g, t.div);
  t.lap_u = {laplacian(g, s.u1), laplacian(g, s.u2)};
  t.force = lorentz_force(g, s);
  t.lap_theta = laplacian(g, s.theta);
  t.heat = Fieldd::zeros(g, C::Center, BP::Neumann0);
  if (p.heating) t.heat = eps * (viscous_heating(g, s, p) + joule_heating(g, s));
  return t;
}

}  // namespace

Tendency explicit_tendency(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const double eps = p.epsilon, R = p.rgas, cv = p.cv, lm = p.lambda + p.mu;
  const Terms t = assemble(g, s, p);
  Tendency out = Tendency::zeros(g);

  out.sigma = with_policy(-t.mass_flux_div, BP::Neumann0);

  // 1/rho - 1 = -eps sigma / rho turns the frozen-coefficient implicit parts
  // into the full variable-density terms.
  const Array ix = (1.0 + eps * t.sx).inverse();
  const Array iy = (1.0 + eps * t.sy).inverse();
  out.u1.data() = -t.adv.first.data() + ix * (t.force.first.data() - R * t.grad_st.first.data()) +
                  (ix - 1) * (p.mu * t.lap_u.first.data() + lm * t.grad_div.first.data()) +
                  R * t.sx * ix * t.grad_zeta.first.data();
  out.u2.data() = -t.adv.second.data() +
                  iy * (t.force.second.data() - R * t.grad_st.second.data()) +
                  (iy - 1) * (p.mu * t.lap_u.second.data() + lm * t.grad_div.second.data()) +
                  R * t.sy * iy * t.grad_zeta.second.data();
  out.u2.enforce_walls();

  const Array& rho = t.rho;
  const Array& sig = s.sigma.data();
  const Array& div = t.div.data();
  out.theta.data() = -t.theta_adv.data() +
                     (-R * (rho * s.theta.data() + sig) * div + t.heat.data()) / (cv * rho) +
                     (rho.inverse() - 1) * (p.kappa / cv) * t.lap_theta.data() +
                     (sig / rho) * (R / cv) * div;
  return out;
}

Tendency full_tendency(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const double eps = p.epsilon, R = p.rgas, cv = p.cv, lm = p.lambda + p.mu;
  const Terms t = assemble(g, s, p);
  Tendency out = Tendency::zeros(g);

  out.sigma.data() = -t.mass_flux_div.data() - t.div.data() / eps;

  const Array ix = (1.0 + eps * t.sx).inverse();
  const Array iy = (1.0 + eps * t.sy).inverse();
  out.u1.data() = -t.adv.first.data() +
                  ix * (-(R / eps) * t.grad_zeta.first.data() - R * t.grad_st.first.data() +
                        p.mu * t.lap_u.first.data() + lm * t.grad_div.first.data() +
                        t.force.first.data());
  out.u2.data() = -t.adv.second.data() +
                  iy * (-(R / eps) * t.grad_zeta.second.data() - R * t.grad_st.second.data() +
                        p.mu * t.lap_u.second.data() + lm * t.grad_div.second.data() +
                        t.force.second.data());
  out.u2.enforce_walls();

  const Array& rho = t.rho;
  const Array& div = t.div.data();
  out.theta.data() = -t.theta_adv.data() +
                     (-R * (rho * s.theta.data() + s.sigma.data()) * div - (R / eps) * div +
                      p.kappa * t.lap_theta.data() + t.heat.data()) /
                         (cv * rho);

  auto [g1, g2] = ohm_vector(g, s);
  auto [cb1, cb2] = curl_of_scalar(g, s.b3);
  out.e1 = with_policy((1.0 / eps) * (cb1 - g1), BP::Dirichlet0);
  out.e2 = with_policy((1.0 / eps) * (cb2 - g2), BP::Neumann0);
  out.b3 = with_policy(-curl_of_vector(g, s.e1, s.e2), BP::Neumann0);
  return out;
}

double stable_dt(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const double h = min_h(g);
  const double umax = std::max({max_abs(s.u1), max_abs(s.u2), 1e-6});
  double dt = 0.4 * h / umax;
  if (p.scheme == Scheme::ExplicitRk2) {
    dt = std::min({dt, 0.4 * p.epsilon * h / p.sound_speed(), p.epsilon});
    // explicit viscous and thermal diffusion
    const double k2 = 4 / (g.hx() * g.hx()) + 4 / (g.hy() * g.hy());
    const double nu = std::max(2 * p.mu + p.lambda, p.kappa / p.cv);
    dt = std::min(dt, 1.5 / (nu * k2));
  }
  return dt;
}

double cfl_dt(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const double dt = stable_dt(g, s, p);
  const double left = p.t_end - s.time;
  return left > 0 ? std::min(dt, left) : dt;
}

void check_state(const NsmState& s, double epsilon) {
  const std::pair<const char*, const Fieldd*> fields[] = {
      {"sigma", &s.sigma}, {"u1", &s.u1}, {"u2", &s.u2}, {"theta", &s.theta},
      {"e1", &s.e1},       {"e2", &s.e2}, {"b3", &s.b3}};
  const double rho_min = (1.0 + epsilon * s.sigma.data()).minCoeff();
  for (const auto& [name, f] : fields)
    if (!f->all_finite())
      throw BlowUpError(std::string("non-finite values in ") + name, s.time, rho_min, name);
  if (!(rho_min > 0))
    throw BlowUpError("density 1 + eps sigma became nonpositive", s.time, rho_min, "sigma");
}

namespace {

NsmState axpy(const NsmState& s, double a, const Tendency& t) {
  NsmState out = s;
  out.sigma += a * t.sigma;
  out.u1 += a * t.u1;
  out.u2 += a * t.u2;
  out.theta += a * t.theta;
  out.e1 += a * t.e1;
  out.e2 += a * t.e2;
  out.b3 += a * t.b3;
  return out;
}

NsmState step_imex(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const double dt = p.dt;
  NsmState w = s;
  const Tendency t = explicit_tendency(g, s, p);
  w.sigma += dt * t.sigma;
  w.u1 += dt * t.u1;
  w.u2 += dt * t.u2;
  w.theta += dt * t.theta;

  auto d = diffusion_substep(g, w, p, dt);
  w.u1 = std::move(d.u1);
  w.u2 = std::move(d.u2);
  w.theta = std::move(d.theta);

  auto a = acoustic_substep(g, w, p, dt);
  w.sigma = std::move(a.sigma);
  w.u1 = std::move(a.u1);
  w.u2 = std::move(a.u2);
  w.theta = std::move(a.theta);

  auto m = maxwell_substep(g, w, p, dt);
  w.e1 = std::move(m.e1);
  w.e2 = std::move(m.e2);
  w.b3 = std::move(m.b3);
  return w;
}

NsmState step_heun(const Gridd& g, const NsmState& s, const NsmParams& p) {
  const Tendency k1 = full_tendency(g, s, p);
  NsmState mid = axpy(s, p.dt, k1);
  check_state(mid, p.epsilon);
  const Tendency k2 = full_tendency(g, mid, p);
  return axpy(axpy(s, 0.5 * p.dt, k1), 0.5 * p.dt, k2);
}

}  // namespace

NsmState step(const Gridd& g, const NsmState& s, const NsmParams& p) {
  p.validate();
  const double allowed = stable_dt(g, s, p);
  if (p.dt > allowed * (1 + 1e-12))
    throw CflError("step: dt " + std::to_string(p.dt) + " exceeds stable limit " +
                       std::to_string(allowed),
                   p.dt, allowed);
  NsmState out = p.scheme == Scheme::Imex1 ? step_imex(g, s, p) : step_heun(g, s, p);
  out.time = s.time + p.dt;
  check_state(out, p.epsilon);
  return out;
}

}  // namespace nsmlab
