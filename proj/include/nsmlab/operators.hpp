#pragma once

// Second-order staggered difference operators on the channel grid.
//
// The operators close on two interlocking complexes:
//   primal: Center --grad--> (FaceX, FaceY) --div--> Center
//   dual:   Node   --grad--> (FaceY, FaceX) --div--> Node
// and curl maps between them, so div(curl) and curl(grad) vanish structurally.

#include <string>
#include <utility>

#include "nsmlab/grid.hpp"

namespace nsmlab {

template <typename Scalar>
using FieldPair = std::pair<Field<Scalar>, Field<Scalar>>;

namespace detail {

template <typename Scalar>
void require_shape(const Grid<Scalar>& g, const Field<Scalar>& f, const char* op) {
  if (f.nx() != g.nx() || f.rows() != g.rows(f.centering()))
    throw ContractError(std::string(op) + ": field shape does not match grid");
}

template <typename Scalar>
void require_centering(const Field<Scalar>& f, Centering c, const char* op) {
  if (f.centering() != c)
    throw ContractError(std::string(op) + ": expected " + to_string(c) + ", got " +
                        to_string(f.centering()));
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace detail

/// Gradient of a Center field to (FaceX, FaceY), or of a Node field to
/// (FaceY, FaceX). Wall-face y-derivatives of a Center field come from its
/// ghost policy, so a Neumann0 input gives exact zeros there.
template <typename Scalar>
FieldPair<Scalar> gradient(const Grid<Scalar>& g, const Field<Scalar>& p) {
  detail::require_shape(g, p, "gradient");
  const int nx = g.nx();
  const Scalar ihx = Scalar(1) / g.hx(), ihy = Scalar(1) / g.hy();
  if (p.centering() == Centering::Center) {
    auto gx = Field<Scalar>::zeros(g, Centering::FaceX, p.bc());
    auto gy = Field<Scalar>::zeros(g, Centering::FaceY, dual(p.bc()));
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < nx; ++i) gx(i, j) = (p(i, j) - p(detail::wrap(i - 1, nx), j)) * ihx;
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i < nx; ++i) gy(i, j) = (p.at(i, j) - p.at(i, j - 1)) * ihy;
    return {std::move(gx), std::move(gy)};
  }
  if (p.centering() == Centering::Node) {
    auto gx = Field<Scalar>::zeros(g, Centering::FaceY, p.bc());
    auto gy = Field<Scalar>::zeros(g, Centering::FaceX, dual(p.bc()));
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i < nx; ++i) gx(i, j) = (p(detail::wrap(i + 1, nx), j) - p(i, j)) * ihx;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < nx; ++i) gy(i, j) = (p(i, j + 1) - p(i, j)) * ihy;
    return {std::move(gx), std::move(gy)};
  }
  throw ContractError(std::string("gradient: expected Center or Node, got ") +
                      to_string(p.centering()));
}

/// Conservative divergence: (FaceX, FaceY) -> Center, or (FaceY, FaceX) -> Node.
template <typename Scalar>
Field<Scalar> divergence(const Grid<Scalar>& g, const Field<Scalar>& f1, const Field<Scalar>& f2) {
  detail::require_shape(g, f1, "divergence");
  detail::require_shape(g, f2, "divergence");
  const int nx = g.nx();
  const Scalar ihx = Scalar(1) / g.hx(), ihy = Scalar(1) / g.hy();
  const BoundaryPolicy bc = dual(f2.bc()) == f1.bc() ? f1.bc() : BoundaryPolicy::None;
  if (f1.centering() == Centering::FaceX) {
    detail::require_centering(f2, Centering::FaceY, "divergence");
    auto out = Field<Scalar>::zeros(g, Centering::Center, bc);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < nx; ++i)
        out(i, j) = (f1(detail::wrap(i + 1, nx), j) - f1(i, j)) * ihx +
                    (f2(i, j + 1) - f2(i, j)) * ihy;
    return out;
  }
  if (f1.centering() == Centering::FaceY) {
    detail::require_centering(f2, Centering::FaceX, "divergence");
    auto out = Field<Scalar>::zeros(g, Centering::Node, bc);
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i < nx; ++i)
        out(i, j) = (f1(i, j) - f1(detail::wrap(i - 1, nx), j)) * ihx +
                    (f2.at(i, j) - f2.at(i, j - 1)) * ihy;
    return out;
  }
  throw ContractError(std::string("divergence: unsupported first component ") +
                      to_string(f1.centering()));
}

/// Curl of an out-of-plane scalar, (d/dy b, -d/dx b). For b at Center the
/// components land on (FaceY, FaceX); for b at Node on (FaceX, FaceY).
template <typename Scalar>
FieldPair<Scalar> curl_of_scalar(const Grid<Scalar>& g, const Field<Scalar>& b) {
  auto [gx, gy] = gradient(g, b);
  gx *= Scalar(-1);
  return {std::move(gy), std::move(gx)};
}

/// Out-of-plane component d/dx e2 - d/dy e1 of an in-plane vector.
/// (e1@FaceY, e2@FaceX) -> Center; (e1@FaceX, e2@FaceY) -> Node.
template <typename Scalar>
Field<Scalar> curl_of_vector(const Grid<Scalar>& g, const Field<Scalar>& e1,
                             const Field<Scalar>& e2) {
  detail::require_shape(g, e1, "curl_of_vector");
  detail::require_shape(g, e2, "curl_of_vector");
  const int nx = g.nx();
  const Scalar ihx = Scalar(1) / g.hx(), ihy = Scalar(1) / g.hy();
  const BoundaryPolicy bc = dual(e1.bc()) == e2.bc() ? e2.bc() : BoundaryPolicy::None;
  if (e1.centering() == Centering::FaceY) {
    detail::require_centering(e2, Centering::FaceX, "curl_of_vector");
    auto out = Field<Scalar>::zeros(g, Centering::Center, bc);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < nx; ++i)
        out(i, j) = (e2(detail::wrap(i + 1, nx), j) - e2(i, j)) * ihx -
                    (e1(i, j + 1) - e1(i, j)) * ihy;
    return out;
  }
  if (e1.centering() == Centering::FaceX) {
    detail::require_centering(e2, Centering::FaceY, "curl_of_vector");
    auto out = Field<Scalar>::zeros(g, Centering::Node, bc);
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i < nx; ++i)
        out(i, j) = (e2(i, j) - e2(detail::wrap(i - 1, nx), j)) * ihx -
                    (e1.at(i, j) - e1.at(i, j - 1)) * ihy;
    return out;
  }
  throw ContractError(std::string("curl_of_vector: unsupported first component ") +
                      to_string(e1.centering()));
}

/// 5-point Laplacian with ghost rows from the field's wall policy. Wall rows
/// of a Dirichlet0 FaceY/Node field are prescribed and map to zero.
template <typename Scalar>
Field<Scalar> laplacian(const Grid<Scalar>& g, const Field<Scalar>& f) {
  detail::require_shape(g, f, "laplacian");
  if (f.bc() == BoundaryPolicy::None)
    throw ContractError("laplacian: wall-adjacent stencil needs a boundary policy");
  if (!f.walls_satisfied())
    throw ContractError("laplacian: Dirichlet0 field has nonzero wall samples");
  const int nx = g.nx();
  const Scalar ihx2 = Scalar(1) / (g.hx() * g.hx()), ihy2 = Scalar(1) / (g.hy() * g.hy());
  auto out = Field<Scalar>::zeros(g, f.centering(), f.bc());
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < nx; ++i) {
      const Scalar c = f(i, j);
      out(i, j) = (f(detail::wrap(i + 1, nx), j) - 2 * c + f(detail::wrap(i - 1, nx), j)) * ihx2 +
                  (f.at(i, j + 1) - 2 * c + f.at(i, j - 1)) * ihy2;
    }
  out.enforce_walls();
  return out;
}

namespace detail {

template <typename Scalar>
Field<Scalar> average_x(const Grid<Scalar>& g, const Field<Scalar>& f, Centering target, int shift) {
  // shift = +1 averages (i, i+1), shift = -1 averages (i-1, i)
  const int nx = g.nx();
  auto out = Field<Scalar>::zeros(g, target, f.bc());
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < nx; ++i)
      out(i, j) = Scalar(0.5) * (f(i, j) + f(wrap(i + shift, nx), j));
  return out;
}

template <typename Scalar>
Field<Scalar> average_y(const Grid<Scalar>& g, const Field<Scalar>& f, Centering target) {
  const int nx = g.nx();
  auto out = Field<Scalar>::zeros(g, target, f.bc());
  if (on_wall_rows(target)) {
    for (int j = 0; j < out.rows(); ++j)
      for (int i = 0; i < nx; ++i) out(i, j) = Scalar(0.5) * (f.at(i, j - 1) + f.at(i, j));
  } else {
    for (int j = 0; j < out.rows(); ++j)
      for (int i = 0; i < nx; ++i) out(i, j) = Scalar(0.5) * (f(i, j) + f(i, j + 1));
  }
  return out;
}

}  // namespace detail

/// Two-point averaging along each staggered direction (four-point when both
/// directions change). The wall policy carries over unchanged.
template <typename Scalar>
Field<Scalar> interpolate(const Grid<Scalar>& g, const Field<Scalar>& f, Centering target) {
  detail::require_shape(g, f, "interpolate");
  using C = Centering;
  const C from = f.centering();
  if (from == target) return f;
  // x move: Center/FaceY have half-integer x, FaceX/Node integer x.
  const bool move_x = x_staggered(from) != x_staggered(target);
  const bool move_y = on_wall_rows(from) != on_wall_rows(target);
  Field<Scalar> cur = f;
  if (move_y) {
    const C mid = x_staggered(from) ? (on_wall_rows(target) ? C::Node : C::FaceX)
                                    : (on_wall_rows(target) ? C::FaceY : C::Center);
    cur = detail::average_y(g, cur, mid);
  }
  if (move_x) {
    // to integer x: average (i-1, i); to half-integer x: average (i, i+1)
    cur = detail::average_x(g, cur, target, x_staggered(target) ? -1 : +1);
  }
  if (cur.centering() != target)
    throw ContractError(std::string("interpolate: unsupported pair ") + to_string(from) + " -> " +
                        to_string(target));
  return cur;
}

/// Cell-volume-weighted sum, trapezoid weights on wall rows.
template <typename Scalar>
Scalar inner_product(const Grid<Scalar>& g, const Field<Scalar>& f, const Field<Scalar>& h) {
  detail::require_shape(g, f, "inner_product");
  f.require_same(h, "inner_product");
  Scalar sum = 0;
  for (int j = 0; j < f.rows(); ++j)
    sum += g.row_weight(f.centering(), j) * (f.data().col(j) * h.data().col(j)).sum();
  return sum * g.hx() * g.hy();
}

template <typename Scalar>
Scalar l2_norm(const Grid<Scalar>& g, const Field<Scalar>& f) {
  return std::sqrt(inner_product(g, f, f));
}

/// Weighted integral of a field over the channel.
template <typename Scalar>
Scalar integral(const Grid<Scalar>& g, const Field<Scalar>& f) {
  Scalar sum = 0;
  for (int j = 0; j < f.rows(); ++j) sum += g.row_weight(f.centering(), j) * f.data().col(j).sum();
  return sum * g.hx() * g.hy();
}

template <typename Scalar>
Scalar max_abs(const Field<Scalar>& f) {
  return f.data().abs().maxCoeff();
}

}  // namespace nsmlab
