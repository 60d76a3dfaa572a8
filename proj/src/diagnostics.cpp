#include "nsmlab/diagnostics.hpp"

#include <cmath>
#include <string>

namespace nsmlab {

namespace {

using Array = Fieldd::Array;

// out(i, j) = a(i + k mod n, j)
Array shift_x(const Array& a, int k) {
  const int n = static_cast<int>(a.rows());
  Array out(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) out.row(i) = a.row(((i + k) % n + n) % n);
  return out;
}

double weighted_sq(const Gridd& g, Centering c, const Array& a) {
  double s = 0;
  for (int j = 0; j < a.cols(); ++j) s += g.row_weight(c, j) * a.col(j).square().sum();
  return s;
}

// Combination sum_m w[m] * s[m] of three states, field by field.
NsmState combine(const NsmState& a, const NsmState& b, const NsmState& c, const double w[3]) {
  NsmState out = a;
  auto mix = [&](Fieldd NsmState::*f) {
    (out.*f).data() = w[0] * (a.*f).data() + w[1] * (b.*f).data() + w[2] * (c.*f).data();
  };
  for (auto f : {&NsmState::sigma, &NsmState::u1, &NsmState::u2, &NsmState::theta, &NsmState::e1,
                 &NsmState::e2, &NsmState::b3})
    mix(f);
  return out;
}

struct Squares {
  SobolevSquares sigma, u, theta, e, b;
};

Squares squares_of(const Gridd& g, const NsmState& s) {
  Squares q;
  q.sigma = sobolev_squares(g, s.sigma);
  q.u = sobolev_squares(g, s.u1);
  q.u += sobolev_squares(g, s.u2);
  q.theta = sobolev_squares(g, s.theta);
  q.e = sobolev_squares(g, s.e1);
  q.e += sobolev_squares(g, s.e2);
  q.b = sobolev_squares(g, s.b3);
  return q;
}

double h2sq(const SobolevSquares& s) { return s.l2 + s.d1 + s.d2; }
double h1sq(const SobolevSquares& s) { return s.l2 + s.d1; }

// Weights of the derivative of the quadratic through (t0, t1, t2), at t.
void lagrange_weights(const double t[3], double at, double d1[3], double d2[3]) {
  for (int m = 0; m < 3; ++m) {
    const int a = (m + 1) % 3, b = (m + 2) % 3;
    const double den = (t[m] - t[a]) * (t[m] - t[b]);
    d1[m] = (2 * at - t[a] - t[b]) / den;
    d2[m] = 2 / den;
  }
}

}  // namespace

double SobolevSquares::l2_norm() const { return std::sqrt(l2); }
double SobolevSquares::h1_norm() const { return std::sqrt(l2 + d1); }
double SobolevSquares::h2_norm() const { return std::sqrt(l2 + d1 + d2); }

SobolevSquares sobolev_squares(const Gridd& g, const Fieldd& f) {
  const Array& a = f.data();
  const int rows = f.rows();
  const Centering c = f.centering();
  const double hx = g.hx(), hy = g.hy();
  SobolevSquares s;
  s.l2 = weighted_sq(g, c, a);

  const Array right = shift_x(a, 1), left = shift_x(a, -1);
  const Array dx = (right - a) / hx;
  const Array dxx = (right - 2 * a + left) / (hx * hx);
  const Array dy = (a.rightCols(rows - 1) - a.leftCols(rows - 1)) / hy;
  Array dyy(a.rows(), rows);
  dyy.middleCols(1, rows - 2) =
      (a.rightCols(rows - 2) - 2 * a.middleCols(1, rows - 2) + a.leftCols(rows - 2)) / (hy * hy);
  dyy.col(0) = dyy.col(1);
  dyy.col(rows - 1) = dyy.col(rows - 2);
  const Array dxy = (dx.rightCols(rows - 1) - dx.leftCols(rows - 1)) / hy;

  const double cell = hx * hy;
  s.l2 *= cell;
  s.d1 = (weighted_sq(g, c, dx) + dy.square().sum()) * cell;
  s.d2 = (weighted_sq(g, c, dxx) + weighted_sq(g, c, dyy) + 2 * dxy.square().sum()) * cell;
  return s;
}

NormReport sobolev_norms(const Gridd& g, const NsmState& s) {
  const Squares q = squares_of(g, s);
  NormReport r;
  auto put = [&](const char* name, const SobolevSquares& x) {
    r.fields[name] = {x.l2_norm(), x.h1_norm(), x.h2_norm()};
  };
  put("sigma", q.sigma);
  put("u", q.u);
  put("theta", q.theta);
  put("E", q.e);
  put("b", q.b);
  return r;
}

double ohm_residual(const Gridd& g, const NsmState& s) {
  auto [c1, c2] = curl_of_scalar(g, s.b3);
  auto [w1, w2] = u_cross_b(g, s.u1, s.u2, s.b3);
  auto r1 = s.e1 - c1 + w1;
  auto r2 = s.e2 - c2 + w2;
  return std::sqrt(inner_product(g, r1, r1) + inner_product(g, r2, r2));
}

MTrace discrete_M(const Gridd& g, const std::vector<NsmState>& history, double epsilon) {
  const int n = static_cast<int>(history.size());
  if (n < 3)
    throw InsufficientDataError("discrete_M: need at least 3 snapshots, got " + std::to_string(n));
  for (int k = 1; k < n; ++k)
    if (!(history[k].time > history[k - 1].time))
      throw ParameterError("discrete_M: snapshot times must be strictly increasing");

  const double eps = epsilon;
  MTrace trace;
  double sup = 0, integral = 0, prev_integrand = 0;
  for (int k = 0; k < n; ++k) {
    const int base = std::min(std::max(k - 1, 0), n - 3);
    const double t[3] = {history[base].time, history[base + 1].time, history[base + 2].time};
    double w1[3], w2[3];
    lagrange_weights(t, history[k].time, w1, w2);
    const NsmState& s = history[k];
    const NsmState d1 = combine(history[base], history[base + 1], history[base + 2], w1);
    const NsmState d2 = combine(history[base], history[base + 1], history[base + 2], w2);

    const Squares q = squares_of(g, s), q1 = squares_of(g, d1), q2 = squares_of(g, d2);
    MComponents m;
    m.state_h2 = std::sqrt(h2sq(q.sigma) + h2sq(q.u) + h2sq(q.theta) + eps * h2sq(q.e) + h2sq(q.b));
    m.dt_h1 = std::sqrt(h1sq(q1.sigma) + h1sq(q1.u) + h1sq(q1.theta) + eps * h1sq(q1.e) + h1sq(q1.b));
    m.eps_dtt_l2 = eps * std::sqrt(q2.sigma.l2 + q2.u.l2 + q2.theta.l2);
    m.inv_density = (1.0 / (1.0 + eps * s.sigma.data())).abs().maxCoeff();
    m.integrand = h2sq(q.u) + h2sq(q.theta) + h2sq(q1.u) + h2sq(q1.theta) +
                  eps * eps * (h1sq(q2.sigma) + h1sq(q2.u) + h1sq(q2.theta)) + h2sq(q.e) +
                  h1sq(q1.e) + h1sq(q1.b);

    sup = std::max(sup, m.state_h2 + m.dt_h1 + m.eps_dtt_l2 + m.inv_density);
    if (k > 0) integral += 0.5 * (s.time - history[k - 1].time) * (prev_integrand + m.integrand);
    prev_integrand = m.integrand;
    m.sup_block = sup;
    m.integral_block = std::sqrt(integral);

    trace.times.push_back(s.time);
    trace.m_values.push_back(m.sup_block + m.integral_block);
    trace.components.push_back(m);
  }
  return trace;
}

DivCurl divcurl_ratio(const Gridd& g, const Fieldd& u1, const Fieldd& u2) {
  SobolevSquares q = sobolev_squares(g, u1);
  q += sobolev_squares(g, u2);
  DivCurl out;
  out.h1_norm = q.h1_norm();
  out.bound_sum = l2_norm(g, divergence(g, u1, u2)) + l2_norm(g, curl_of_vector(g, u1, u2)) +
                  q.l2_norm();
  out.ratio = out.bound_sum > 0 ? out.h1_norm / out.bound_sum : 0.0;
  return out;
}

LimitErrors nsm_vs_mhd_error(const Gridd& g, const NsmState& nsm, const MhdState& mhd,
                             double epsilon) {
  for (const Fieldd* f : {&nsm.sigma, &nsm.u1, &nsm.u2, &nsm.e1, &mhd.v1, &mhd.v2, &mhd.bz})
    detail::require_shape(g, *f, "nsm_vs_mhd_error");
  LimitErrors e;
  SobolevSquares du = sobolev_squares(g, nsm.u1 - mhd.v1);
  du += sobolev_squares(g, nsm.u2 - mhd.v2);
  e.err_u_l2 = du.l2_norm();
  e.err_u_h1 = du.h1_norm();
  const SobolevSquares db = sobolev_squares(g, nsm.b3 - mhd.bz);
  e.err_b_l2 = db.l2_norm();
  e.err_b_h1 = db.h1_norm();
  e.err_sigma = sobolev_squares(g, nsm.sigma).scaled(epsilon * epsilon).h1_norm();
  e.err_theta = sobolev_squares(g, nsm.theta).scaled(epsilon * epsilon).h1_norm();
  auto [c1, c2] = curl_of_scalar(g, mhd.bz);
  auto [w1, w2] = u_cross_b(g, mhd.v1, mhd.v2, mhd.bz);
  auto r1 = nsm.e1 - c1 + w1;
  auto r2 = nsm.e2 - c2 + w2;
  e.ohm = std::sqrt(inner_product(g, r1, r1) + inner_product(g, r2, r2));
  return e;
}

}  // namespace nsmlab
