#pragma once

// Discrete Sobolev norms, Ohm residual, the energy functional M(t) and the
// distance between a compressible run and its incompressible limit.

#include <map>
#include <string>
#include <vector>

#include "nsmlab/mhd_solver.hpp"
#include "nsmlab/nsm_solver.hpp"

namespace nsmlab {

/// Squared pieces of a discrete Sobolev norm: the L2 part, the sum of squared
/// first differences and the sum of squared second differences.
struct SobolevSquares {
  double l2 = 0;
  double d1 = 0;
  double d2 = 0;

  SobolevSquares& operator+=(const SobolevSquares& o) {
    l2 += o.l2;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  SobolevSquares scaled(double s) const { return {s * l2, s * d1, s * d2}; }
  double l2_norm() const;
  double h1_norm() const;
  double h2_norm() const;
};

/// Differences use stored samples only (one-sided at the walls); the
/// second y-difference on a wall row reuses its neighbour's 3-point stencil.
SobolevSquares sobolev_squares(const Gridd& g, const Fieldd& f);

struct Norms {
  double l2 = 0, h1 = 0, h2 = 0;
};

/// Per-field norms keyed "sigma", "u", "theta", "E", "b".
struct NormReport {
  std::map<std::string, Norms> fields;
  const Norms& operator[](const std::string& name) const { return fields.at(name); }
};

NormReport sobolev_norms(const Gridd& g, const NsmState& s);

/// L2 norm of E - (curl b - u x b), measured where E lives.
double ohm_residual(const Gridd& g, const NsmState& s);

/// One sample of the itemised functional.
struct MComponents {
  double state_h2 = 0;        // |(sigma, u, theta, sqrt(eps) E, b)|_H2
  double dt_h1 = 0;           // |d/dt (sigma, u, theta, sqrt(eps) E, b)|_H1
  double eps_dtt_l2 = 0;      // eps |d2/dt2 (sigma, u, theta)|_L2
  double inv_density = 0;     // |1 / (1 + eps sigma)|_inf
  double integrand = 0;       // time-integrated part, H2 standing in for H3
  double sup_block = 0;       // running sup of the four terms above
  double integral_block = 0;  // sqrt of the running trapezoid integral
};

struct MTrace {
  std::vector<double> times;
  std::vector<double> m_values;
  std::vector<MComponents> components;
};

/// Discrete M(t) over a time-ordered history (at least 3 snapshots, strictly
/// increasing times). Time derivatives come from 3-point Lagrange
/// differences, central inside and one-sided at both ends.
MTrace discrete_M(const Gridd& g, const std::vector<NsmState>& history, double epsilon);

struct DivCurl {
  double h1_norm = 0;
  double bound_sum = 0;
  double ratio = 0;
};

/// |u|_H1 against |div u| + |curl u| + |u|; ratio 0 for u = 0.
DivCurl divcurl_ratio(const Gridd& g, const Fieldd& u1, const Fieldd& u2);

struct LimitErrors {
  double err_u_l2 = 0, err_u_h1 = 0;
  double err_b_l2 = 0, err_b_h1 = 0;
  double err_sigma = 0;  // |eps sigma|_H1
  double err_theta = 0;  // |eps theta|_H1
  double ohm = 0;        // |E - (curl B - v x B)|_L2
};

LimitErrors nsm_vs_mhd_error(const Gridd& g, const NsmState& nsm, const MhdState& mhd,
                             double epsilon);

}  // namespace nsmlab
