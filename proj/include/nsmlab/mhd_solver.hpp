#pragma once

// Incompressible 2.5-D MHD limit system on the same staggered channel grid:
//   v_t + v.grad v + grad pi - mu Lap v = -B grad B,  div v = 0,
//   B_t + div(B v) = Lap B.

#include "nsmlab/grid.hpp"
#include "nsmlab/operators.hpp"

namespace nsmlab {

struct MhdState {
  Fieldd v1;   // FaceX, Neumann0
  Fieldd v2;   // FaceY, Dirichlet0
  Fieldd bz;   // Center, Neumann0
  Fieldd pi;   // Center, Neumann0, zero mean
  double time = 0;

  static MhdState zeros(const Gridd& g);
};

struct Projection {
  Fieldd v1, v2;
  Fieldd pi;   // solves Lap pi = div v with zero mean
};

/// Discrete Chorin projection onto div v = 0.
Projection project(const Gridd& g, const Fieldd& v1, const Fieldd& v2);

/// Advective limit 0.4 min(h) / max(|v|, 1e-6).
double mhd_stable_dt(const Gridd& g, const MhdState& s);

/// Lorentz force -B grad B on (FaceX, FaceY); an exact discrete gradient of -B^2/2.
FieldPair<double> mhd_force(const Gridd& g, const Fieldd& bz);

/// Forward-Euler advection and force, backward-Euler viscosity, projection,
/// then backward-Euler induction with the projected velocity.
MhdState mhd_step(const Gridd& g, const MhdState& s, double mu, double dt);

struct MhdEnergy {
  double kinetic = 0;
  double magnetic = 0;
  double dissipation_rate = 0;
};

MhdEnergy mhd_energy(const Gridd& g, const MhdState& s, double mu);

}  // namespace nsmlab
