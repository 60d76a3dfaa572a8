#pragma once

// Staggered channel grid: periodic in x, walls at y = 0 and y = ly.
//
// Sample layout (i is the x index, j the y index):
//   Center (i+1/2, j+1/2)   nx x ny
//   FaceX  (i,     j+1/2)   nx x ny
//   FaceY  (i+1/2, j)       nx x (ny+1), rows 0 and ny lie on the walls
//   Node   (i,     j)       nx x (ny+1), rows 0 and ny lie on the walls

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include "nsmlab/errors.hpp"

namespace nsmlab {

enum class Centering { Center, FaceX, FaceY, Node };

/// Wall treatment in y. Neumann0 mirrors across the wall, Dirichlet0
/// anti-mirrors (and pins wall-row samples of FaceY/Node fields to zero).
enum class BoundaryPolicy { Dirichlet0, Neumann0, None };

inline const char* to_string(Centering c) {
  switch (c) {
    case Centering::Center: return "Center";
    case Centering::FaceX: return "FaceX";
    case Centering::FaceY: return "FaceY";
    case Centering::Node: return "Node";
  }
  return "?";
}

inline const char* to_string(BoundaryPolicy p) {
  switch (p) {
    case BoundaryPolicy::Dirichlet0: return "Dirichlet0";
    case BoundaryPolicy::Neumann0: return "Neumann0";
    case BoundaryPolicy::None: return "None";
  }
  return "?";
}

/// Policy of the y-derivative of a field with policy p.
constexpr BoundaryPolicy dual(BoundaryPolicy p) {
  switch (p) {
    case BoundaryPolicy::Dirichlet0: return BoundaryPolicy::Neumann0;
    case BoundaryPolicy::Neumann0: return BoundaryPolicy::Dirichlet0;
    default: return BoundaryPolicy::None;
  }
}

/// True for centerings whose first and last rows sit on the walls.
constexpr bool on_wall_rows(Centering c) {
  return c == Centering::FaceY || c == Centering::Node;
}

constexpr bool x_staggered(Centering c) {
  return c == Centering::FaceX || c == Centering::Node;
}

template <typename Scalar>
class Grid {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  /// Real orthonormal basis diagonalising the periodic second difference in x.
  struct XTransform {
    Matrix basis;          // column k is the k-th real Fourier mode sampled at nx points
    Vector eigenvalues;    // eigenvalue of -D_xx on column k
  };

  Grid(int nx, int ny, Scalar lx, Scalar ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 8 || ny < 8) throw ParameterError("grid: nx and ny must be >= 8");
    if (nx % 2 != 0 || ny % 2 != 0) throw ParameterError("grid: nx and ny must be even");
    if (!(lx > 0) || !(ly > 0)) throw ParameterError("grid: lx and ly must be positive");
    hx_ = lx / nx;
    hy_ = ly / ny;
    transform_ = std::make_shared<const XTransform>(build_transform());
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Scalar lx() const { return lx_; }
  Scalar ly() const { return ly_; }
  Scalar hx() const { return hx_; }
  Scalar hy() const { return hy_; }

  int rows(Centering c) const { return on_wall_rows(c) ? ny_ + 1 : ny_; }

  Scalar x(Centering c, int i) const {
    return x_staggered(c) ? i * hx_ : (i + Scalar(0.5)) * hx_;
  }
  Scalar y(Centering c, int j) const {
    return on_wall_rows(c) ? j * hy_ : (j + Scalar(0.5)) * hy_;
  }

  /// Quadrature weight of row j relative to hx*hy (trapezoid on wall rows).
  Scalar row_weight(Centering c, int j) const {
    if (on_wall_rows(c) && (j == 0 || j == ny_)) return Scalar(0.5);
    return Scalar(1);
  }

  const XTransform& x_transform() const { return *transform_; }

  bool operator==(const Grid& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

 private:
  XTransform build_transform() const {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    XTransform t;
    t.basis.resize(nx_, nx_);
    t.eigenvalues.resize(nx_);
    const Scalar n = Scalar(nx_);
    const Scalar c0 = Scalar(1) / std::sqrt(n);
    const Scalar c1 = std::sqrt(Scalar(2) / n);
    auto lambda = [&](int m) {
      const Scalar s = std::sin(pi * m / n);
      return Scalar(4) * s * s / (hx_ * hx_);
    };
    for (int i = 0; i < nx_; ++i) {
      t.basis(i, 0) = c0;
      t.basis(i, nx_ - 1) = (i % 2 == 0) ? c0 : -c0;
      for (int m = 1; m < nx_ / 2; ++m) {
        // reduce the phase index first so large m*i stays exact
        const int phase = (m * i) % nx_;
        t.basis(i, 2 * m - 1) = c1 * std::cos(2 * pi * phase / n);
        t.basis(i, 2 * m) = c1 * std::sin(2 * pi * phase / n);
      }
    }
    t.eigenvalues(0) = 0;
    t.eigenvalues(nx_ - 1) = lambda(nx_ / 2);
    for (int m = 1; m < nx_ / 2; ++m) {
      t.eigenvalues(2 * m - 1) = lambda(m);
      t.eigenvalues(2 * m) = lambda(m);
    }
    return t;
  }

  int nx_, ny_;
  Scalar lx_, ly_, hx_{}, hy_{};
  std::shared_ptr<const XTransform> transform_;
};

/// Scalar samples at one staggering location, with a wall policy in y.
/// Storage is column-major (i, j): each column is one row of constant y.
template <typename Scalar>
class Field {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Field() = default;
  Field(Centering c, BoundaryPolicy bc, Array data)
      : centering_(c), bc_(bc), data_(std::move(data)) {}

  static Field zeros(const Grid<Scalar>& g, Centering c, BoundaryPolicy bc) {
    return Field(c, bc, Array::Zero(g.nx(), g.rows(c)));
  }

  static Field constant(const Grid<Scalar>& g, Centering c, BoundaryPolicy bc, Scalar v) {
    return Field(c, bc, Array::Constant(g.nx(), g.rows(c), v));
  }

  /// Samples f(x, y) at every location of centering c. Wall rows of a
  /// Dirichlet0 FaceY/Node field are forced to exact zero.
  template <typename F>
  static Field sample(const Grid<Scalar>& g, Centering c, BoundaryPolicy bc, F&& f) {
    Field out = zeros(g, c, bc);
    for (int j = 0; j < g.rows(c); ++j)
      for (int i = 0; i < g.nx(); ++i) out.data_(i, j) = f(g.x(c, i), g.y(c, j));
    out.enforce_walls();
    return out;
  }

  Centering centering() const { return centering_; }
  BoundaryPolicy bc() const { return bc_; }
  Field& set_bc(BoundaryPolicy bc) {
    bc_ = bc;
    return *this;
  }
  Field with_bc(BoundaryPolicy bc) const {
    Field out = *this;
    out.bc_ = bc;
    return out;
  }

  const Array& data() const { return data_; }
  Array& data() { return data_; }

  int nx() const { return static_cast<int>(data_.rows()); }
  int rows() const { return static_cast<int>(data_.cols()); }

  Scalar operator()(int i, int j) const { return data_(i, j); }
  Scalar& operator()(int i, int j) { return data_(i, j); }

  /// Sample with periodic wrap in x and ghost rows j = -1, rows() from the
  /// wall policy.
  Scalar at(int i, int j) const {
    const int n = nx();
    i = ((i % n) + n) % n;
    if (j >= 0 && j < rows()) return data_(i, j);
    if (bc_ == BoundaryPolicy::None)
      throw ContractError(std::string("ghost access on a field without wall policy (") +
                          to_string(centering_) + ")");
    const bool wall_rows = on_wall_rows(centering_);
    int mirror;
    if (j < 0)
      mirror = wall_rows ? -j : -j - 1;
    else
      mirror = wall_rows ? 2 * (rows() - 1) - j : 2 * rows() - 1 - j;
    const Scalar v = data_(i, mirror);
    return bc_ == BoundaryPolicy::Neumann0 ? v : -v;
  }

  /// Zero the wall rows of a Dirichlet0 FaceY/Node field.
  void enforce_walls() {
    if (bc_ == BoundaryPolicy::Dirichlet0 && on_wall_rows(centering_) && rows() > 0) {
      data_.col(0).setZero();
      data_.col(rows() - 1).setZero();
    }
  }

  bool walls_satisfied() const {
    if (bc_ != BoundaryPolicy::Dirichlet0 || !on_wall_rows(centering_)) return true;
    return (data_.col(0) == Scalar(0)).all() && (data_.col(rows() - 1) == Scalar(0)).all();
  }

  bool all_finite() const { return data_.isFinite().all(); }

  Field& operator+=(const Field& o) {
    require_same(o, "+=");
    data_ += o.data_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same(o, "-=");
    data_ -= o.data_;
    return *this;
  }
  Field& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }

  void require_same(const Field& o, const char* op) const {
    if (centering_ != o.centering_ || data_.rows() != o.data_.rows() ||
        data_.cols() != o.data_.cols())
      throw ContractError(std::string("centering mismatch in ") + op + ": " +
                          to_string(centering_) + " vs " + to_string(o.centering_));
  }

 private:
  Centering centering_ = Centering::Center;
  BoundaryPolicy bc_ = BoundaryPolicy::None;
  Array data_;
};

template <typename Scalar>
BoundaryPolicy merged_bc(const Field<Scalar>& a, const Field<Scalar>& b) {
  return a.bc() == b.bc() ? a.bc() : BoundaryPolicy::None;
}

template <typename Scalar>
Field<Scalar> operator+(const Field<Scalar>& a, const Field<Scalar>& b) {
  a.require_same(b, "+");
  return Field<Scalar>(a.centering(), merged_bc(a, b), a.data() + b.data());
}

template <typename Scalar>
Field<Scalar> operator-(const Field<Scalar>& a, const Field<Scalar>& b) {
  a.require_same(b, "-");
  return Field<Scalar>(a.centering(), merged_bc(a, b), a.data() - b.data());
}

template <typename Scalar>
Field<Scalar> operator-(const Field<Scalar>& a) {
  return Field<Scalar>(a.centering(), a.bc(), -a.data());
}

/// Pointwise product. A Dirichlet0 factor makes the product Dirichlet0.
template <typename Scalar>
Field<Scalar> operator*(const Field<Scalar>& a, const Field<Scalar>& b) {
  a.require_same(b, "*");
  BoundaryPolicy bc = BoundaryPolicy::None;
  if (a.bc() == b.bc())
    bc = BoundaryPolicy::Neumann0;
  else if (a.bc() != BoundaryPolicy::None && b.bc() != BoundaryPolicy::None)
    bc = BoundaryPolicy::Dirichlet0;
  if (a.bc() == BoundaryPolicy::None || b.bc() == BoundaryPolicy::None) bc = BoundaryPolicy::None;
  return Field<Scalar>(a.centering(), bc, a.data() * b.data());
}

template <typename Scalar>
Field<Scalar> operator*(Scalar s, const Field<Scalar>& a) {
  return Field<Scalar>(a.centering(), a.bc(), s * a.data());
}

template <typename Scalar>
Field<Scalar> operator*(const Field<Scalar>& a, Scalar s) {
  return s * a;
}

using Gridd = Grid<double>;
using Fieldd = Field<double>;

}  // namespace nsmlab
