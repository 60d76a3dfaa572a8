#pragma once

// Direct solver for (alpha - beta * Laplacian_h) phi = rhs on the channel:
// real Fourier transform in x (dense orthonormal basis), then one
// tridiagonal system in y per mode, all modes swept together.

#include <cmath>
#include <string>

#include "nsmlab/operators.hpp"

namespace nsmlab {

/// (alpha - beta * laplacian) applied to phi, honouring phi's wall policy.
template <typename Scalar>
Field<Scalar> apply_helmholtz(const Grid<Scalar>& g, Scalar alpha, Scalar beta,
                              const Field<Scalar>& phi) {
  Field<Scalar> out = alpha * phi;
  if (beta != Scalar(0)) out -= beta * laplacian(g, phi);
  out.set_bc(phi.bc());
  return out;
}

namespace detail {

/// Row layout of the unknowns in y for one centering/policy pair.
struct TridiagonalLayout {
  int first_row;      // first unknown row of the field
  int count;          // number of unknown rows
  double end_diag;    // extra diagonal weight (in units of 1/hy^2) on the two end rows
  double end_offdiag; // multiplier of the inward off-diagonal on the two end rows
};

inline TridiagonalLayout layout_for(Centering c, BoundaryPolicy bc, int ny) {
  if (!on_wall_rows(c)) {
    // ghost row one half-cell outside the wall: mirror drops one neighbour, anti-mirror adds one
    if (bc == BoundaryPolicy::Neumann0) return {0, ny, -1.0, 1.0};
    return {0, ny, +1.0, 1.0};
  }
  if (bc == BoundaryPolicy::Dirichlet0) return {1, ny - 1, 0.0, 1.0};
  // samples on the wall, mirror ghost: row 0 reads (2 phi_1 - 2 phi_0) / hy^2
  return {0, ny + 1, 0.0, 2.0};
}

}  // namespace detail

/// Solves (alpha - beta * Laplacian_h) phi = rhs with the given wall policy.
///
/// alpha = 0 with a Neumann0 Center/FaceX field is the pure-Neumann Poisson
/// problem: rhs must have zero mean (relative to its RMS, 1e-10), the mean is
/// projected out and phi is returned with zero mean.
template <typename Scalar>
Field<Scalar> helmholtz_solve(const Grid<Scalar>& g, Scalar alpha, Scalar beta,
                              const Field<Scalar>& rhs, BoundaryPolicy policy) {
  using Matrix = typename Grid<Scalar>::Matrix;
  using Column = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  detail::require_shape(g, rhs, "helmholtz_solve");
  if (!(alpha >= 0) || !(beta >= 0) || (alpha == 0 && beta == 0))
    throw ParameterError("helmholtz_solve: need alpha >= 0, beta >= 0, not both zero");
  if (policy == BoundaryPolicy::None)
    throw ContractError("helmholtz_solve: a wall policy is required");

  const Centering c = rhs.centering();
  Field<Scalar> out = Field<Scalar>::zeros(g, c, policy);
  if (beta == Scalar(0)) {
    out.data() = rhs.data() / alpha;
    out.enforce_walls();
    return out;
  }

  const bool singular = alpha == Scalar(0) && policy == BoundaryPolicy::Neumann0;
  if (singular && on_wall_rows(c))
    throw ContractError("helmholtz_solve: pure-Neumann solve supported for Center/FaceX only");
  if (singular) {
    const Scalar area = g.lx() * g.ly();
    const Scalar mean = integral(g, rhs) / area;
    const Scalar rms = l2_norm(g, rhs) / std::sqrt(area);
    if (std::abs(mean) > Scalar(1e-10) * rms)
      throw CompatibilityError("helmholtz_solve: pure-Neumann rhs has nonzero mean " +
                               std::to_string(static_cast<double>(mean)));
  }

  const auto lay = detail::layout_for(c, policy, g.ny());
  const int n = lay.count;
  const auto& xt = g.x_transform();
  const Scalar ihy2 = Scalar(1) / (g.hy() * g.hy());

  Matrix modes = xt.basis.transpose() * rhs.data().matrix().middleCols(lay.first_row, n);

  const Scalar off = -beta * ihy2;
  const Column base = alpha + beta * xt.eigenvalues + 2 * beta * ihy2;
  auto diag = [&](int j) -> Column {
    if (j == 0 || j == n - 1) return base + Scalar(lay.end_diag) * beta * ihy2;
    return base;
  };
  auto lower = [&](int j) { return j == n - 1 ? Scalar(lay.end_offdiag) * off : off; };
  auto upper = [&](int j) { return j == 0 ? Scalar(lay.end_offdiag) * off : off; };

  // Thomas sweep, vectorised over modes. Mode 0 is skipped when singular.
  const int k0 = singular ? 1 : 0;
  const int nk = g.nx() - k0;
  Matrix cprime(nk, n);
  Column denom = diag(0).tail(nk);
  cprime.col(0) = (upper(0) / denom).matrix();
  modes.col(0).tail(nk) = (modes.col(0).tail(nk).array() / denom).matrix();
  for (int j = 1; j < n; ++j) {
    denom = diag(j).tail(nk) - lower(j) * cprime.col(j - 1).array();
    if (j < n - 1) cprime.col(j) = (upper(j) / denom).matrix();
    modes.col(j).tail(nk) =
        ((modes.col(j).tail(nk).array() - lower(j) * modes.col(j - 1).tail(nk).array()) / denom)
            .matrix();
  }
  for (int j = n - 2; j >= 0; --j)
    modes.col(j).tail(nk) -= (cprime.col(j).array() * modes.col(j + 1).tail(nk).array()).matrix();

  if (singular) {
    // -beta * D_yy phi = r for the x-mean mode: integrate the flux from the wall.
    Column r = modes.row(0).transpose().array();
    r -= r.mean();
    const Scalar h = g.hy();
    Column phi(n);
    Scalar flux = 0;
    phi(0) = 0;
    for (int j = 0; j + 1 < n; ++j) {
      flux += h * (-r(j) / beta);
      phi(j + 1) = phi(j) + h * flux;
    }
    phi -= phi.mean();
    modes.row(0) = phi.transpose().matrix();
  }

  out.data().middleCols(lay.first_row, n) = (xt.basis * modes).array();
  out.enforce_walls();
  return out;
}

template <typename Scalar>
Field<Scalar> helmholtz_solve(const Grid<Scalar>& g, Scalar alpha, Scalar beta,
                              const Field<Scalar>& rhs) {
  return helmholtz_solve(g, alpha, beta, rhs, rhs.bc());
}

}  // namespace nsmlab
