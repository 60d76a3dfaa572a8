#pragma once

// Scaled compressible Navier-Stokes-Maxwell system in the 2.5-D channel:
// in-plane u and E, out-of-plane b = (0, 0, b3), density and temperature
// carried as variations sigma, theta about rho = T = 1.

#include "nsmlab/grid.hpp"
#include "nsmlab/operators.hpp"

namespace nsmlab {

enum class Scheme { Imex1, ExplicitRk2 };

struct NsmParams {
  double epsilon = 0.1;   // Mach number = dielectric constant
  double mu = 0.1;
  double lambda = 0.0;
  double kappa = 1.0;
  double cv = 1.0;
  double rgas = 1.0;
  double dt = 1e-3;
  double t_end = 0.5;
  Scheme scheme = Scheme::Imex1;
  bool heating = true;    // epsilon-weighted viscous + Joule heating in the theta equation

  /// Throws ParameterError naming the offending field.
  void validate() const;
  double sound_speed() const;
};

struct NsmState {
  Fieldd sigma;   // Center, Neumann0
  Fieldd u1;      // FaceX, Neumann0 (zero vorticity on walls)
  Fieldd u2;      // FaceY, Dirichlet0 (no penetration)
  Fieldd theta;   // Center, Neumann0
  Fieldd e1;      // FaceY, Dirichlet0 (E x n = 0)
  Fieldd e2;      // FaceX, Neumann0
  Fieldd b3;      // Center, Neumann0
  double time = 0;

  /// All-zero state with the policies above.
  static NsmState zeros(const Gridd& g);
};

/// Same layout as NsmState; one entry per prognostic field.
struct Tendency {
  Fieldd sigma, u1, u2, theta, e1, e2, b3;
  static Tendency zeros(const Gridd& g);
};

Fieldd density(const NsmState& s, double epsilon);
Fieldd temperature(const NsmState& s, double epsilon);
Fieldd pressure(const NsmState& s, double epsilon, double rgas);

/// u x b = (u2 b3, -u1 b3) on (FaceY, FaceX), b interpolated to each face.
FieldPair<double> u_cross_b(const Gridd& g, const Fieldd& u1, const Fieldd& u2, const Fieldd& b3);

/// G = E + u x b on (FaceY, FaceX).
FieldPair<double> ohm_vector(const Gridd& g, const NsmState& s);

/// (E + u x b) x b on (FaceX, FaceY).
FieldPair<double> lorentz_force(const Gridd& g, const NsmState& s);

/// |E + u x b|^2 at cell centres.
Fieldd joule_heating(const Gridd& g, const NsmState& s);

/// 2 mu |D(u)|^2 + lambda (div u)^2 at cell centres.
Fieldd viscous_heating(const Gridd& g, const NsmState& s, const NsmParams& p);

/// div(u (x) u) - u div u on the MAC grid, returned on (FaceX, FaceY).
FieldPair<double> momentum_advection(const Gridd& g, const Fieldd& u1, const Fieldd& u2);

struct MaxwellUpdate {
  Fieldd e1, e2, b3;
};

/// Implicit relaxation of the displacement-current system for one step dt.
MaxwellUpdate maxwell_substep(const Gridd& g, const NsmState& s, const NsmParams& p, double dt);

struct AcousticUpdate {
  Fieldd sigma, u1, u2, theta;
};

/// Backward Euler on the stiff 1/epsilon acoustic subsystem with rho frozen to 1.
AcousticUpdate acoustic_substep(const Gridd& g, const NsmState& s, const NsmParams& p, double dt);

struct DiffusionUpdate {
  Fieldd u1, u2, theta;
};

/// Backward Euler for mu Lap u and (kappa/cv) Lap theta; (lambda+mu) grad div u explicit.
DiffusionUpdate diffusion_substep(const Gridd& g, const NsmState& s, const NsmParams& p, double dt);

/// Non-stiff remainder treated by forward Euler in the IMEX step. The E and
/// b entries are zero (the Maxwell substep owns them).
Tendency explicit_tendency(const Gridd& g, const NsmState& s, const NsmParams& p);

/// Complete right-hand side of the system, used by the explicit scheme.
Tendency full_tendency(const Gridd& g, const NsmState& s, const NsmParams& p);

/// Largest step the scheme accepts for this state.
double stable_dt(const Gridd& g, const NsmState& s, const NsmParams& p);

/// stable_dt capped by the time left to t_end.
double cfl_dt(const Gridd& g, const NsmState& s, const NsmParams& p);

/// Advances by p.dt. Throws CflError when p.dt exceeds stable_dt and
/// BlowUpError when the result has rho <= 0 or non-finite entries.
NsmState step(const Gridd& g, const NsmState& s, const NsmParams& p);

/// Throws BlowUpError unless every field is finite and 1 + eps sigma > 0.
void check_state(const NsmState& s, double epsilon);

}  // namespace nsmlab
