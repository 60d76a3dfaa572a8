#include "nsmlab/mhd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsmlab/helmholtz.hpp"
#include "nsmlab/nsm_solver.hpp"

namespace nsmlab {

namespace {
using C = Centering;
using BP = BoundaryPolicy;
}  // namespace

MhdState MhdState::zeros(const Gridd& g) {
  MhdState s;
  s.v1 = Fieldd::zeros(g, C::FaceX, BP::Neumann0);
  s.v2 = Fieldd::zeros(g, C::FaceY, BP::Dirichlet0);
  s.bz = Fieldd::zeros(g, C::Center, BP::Neumann0);
  s.pi = Fieldd::zeros(g, C::Center, BP::Neumann0);
  return s;
}

Projection project(const Gridd& g, const Fieldd& v1, const Fieldd& v2) {
  if (!v2.walls_satisfied() || v2.bc() != BP::Dirichlet0)
    throw ContractError("project: v2 must be Dirichlet0 with zero wall samples");
  auto div = divergence(g, v1, v2);
  // the mean of div v is a telescoping sum: zero up to rounding of the velocity scale
  const double area = g.lx() * g.ly();
  const double mean = integral(g, div) / area;
  const double scale = (l2_norm(g, v1) + l2_norm(g, v2)) / std::sqrt(area) / std::min(g.hx(), g.hy());
  if (std::abs(mean) > 1e-10 * scale)
    throw ConsistencyError("project: divergence of a wall-compliant field has nonzero mean " +
                           std::to_string(mean));
  div.data() -= mean;
  // -Lap pi = -div v
  Fieldd pi = helmholtz_solve(g, 0.0, 1.0, -div, BP::Neumann0);
  auto [g1, g2] = gradient(g, pi);
  Projection out{v1 - g1, v2 - g2, std::move(pi)};
  out.v1.set_bc(BP::Neumann0);
  out.v2.set_bc(BP::Dirichlet0);
  out.v2.enforce_walls();
  return out;
}

double mhd_stable_dt(const Gridd& g, const MhdState& s) {
  const double umax = std::max({max_abs(s.v1), max_abs(s.v2), 1e-6});
  return 0.4 * std::min(g.hx(), g.hy()) / umax;
}

FieldPair<double> mhd_force(const Gridd& g, const Fieldd& bz) {
  auto [gx, gy] = gradient(g, bz);
  auto f1 = -(gx * interpolate(g, bz, C::FaceX));
  auto f2 = -(gy * interpolate(g, bz, C::FaceY));
  f1.set_bc(BP::Neumann0);
  f2.set_bc(BP::Dirichlet0);
  f2.enforce_walls();
  return {std::move(f1), std::move(f2)};
}

MhdState mhd_step(const Gridd& g, const MhdState& s, double mu, double dt) {
  if (!(mu > 0)) throw ParameterError("mhd_step: mu must be positive");
  if (!(dt > 0)) throw ParameterError("mhd_step: dt must be positive");
  const double allowed = mhd_stable_dt(g, s);
  if (dt > allowed * (1 + 1e-12))
    throw CflError("mhd_step: dt " + std::to_string(dt) + " exceeds stable limit " +
                       std::to_string(allowed),
                   dt, allowed);

  auto [a1, a2] = momentum_advection(g, s.v1, s.v2);
  auto [f1, f2] = mhd_force(g, s.bz);
  auto w1 = s.v1 + dt * (f1 - a1);
  auto w2 = s.v2 + dt * (f2 - a2);
  w1 = helmholtz_solve(g, 1.0, dt * mu, w1, BP::Neumann0);
  w2 = helmholtz_solve(g, 1.0, dt * mu, w2, BP::Dirichlet0);
  auto proj = project(g, w1, w2);

  MhdState out;
  out.v1 = std::move(proj.v1);
  out.v2 = std::move(proj.v2);
  out.pi = (1.0 / dt) * proj.pi;
  auto by = interpolate(g, s.bz, C::FaceY), bx = interpolate(g, s.bz, C::FaceX);
  auto flux = divergence(g, bx * out.v1, by * out.v2);
  out.bz = helmholtz_solve(g, 1.0, dt, s.bz - dt * flux, BP::Neumann0);
  out.time = s.time + dt;

  for (const auto* f : {&out.v1, &out.v2, &out.bz})
    if (!f->all_finite())
      throw BlowUpError("mhd_step: non-finite values", out.time, 1.0, f == &out.bz ? "bz" : "v");
  return out;
}

MhdEnergy mhd_energy(const Gridd& g, const MhdState& s, double mu) {
  MhdEnergy e;
  e.kinetic = 0.5 * (inner_product(g, s.v1, s.v1) + inner_product(g, s.v2, s.v2));
  e.magnetic = 0.5 * inner_product(g, s.bz, s.bz);
  // -<f, Lap f> is the sum of squared first differences for these wall policies
  e.dissipation_rate = -mu * (inner_product(g, s.v1, laplacian(g, s.v1)) +
                              inner_product(g, s.v2, laplacian(g, s.v2))) -
                       inner_product(g, s.bz, laplacian(g, s.bz));
  return e;
}

}  // namespace nsmlab
