#pragma once

// Pointwise convex calculus in a boundary tangent frame (d = 2 or 3): the
// subdifferential of the tangential norm, normal cones to the unit ball of the
// tangent plane, the second-order epi-derivative of a weighted tangential norm,
// second-order difference quotients, and the matching proximal map.
//
// Set-valued results are returned as tagged descriptions rather than point
// samples. Extended-real values use IEEE +infinity explicitly.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace tresca {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Component of v orthogonal to the unit normal n.
template <int D>
Vec<D> tangential_part(const Vec<D>& v, const Vec<D>& n) {
  return v - v.dot(n) * n;
}

namespace detail {

template <int D>
void require_unit_normal(const Vec<D>& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("tangent frame normal must be a unit vector");
}

// A vector whose tangential part is this small (relative to the vector itself)
// is treated as purely normal. Keeps x - (x.n)n roundoff out of the branches.
template <int D>
bool tangentially_zero(const Vec<D>& x_tau, const Vec<D>& x) {
  return x_tau.norm() <= 1e-12 * std::max(1.0, x.norm());
}

}  // namespace detail

// Subdifferential of x -> ||x_tau|| at x. Away from x_tau = 0 it is the unit
// vector x_tau/||x_tau||; at x_tau = 0 it is the closed unit ball of the
// tangent plane, described by the plane normal.
template <int D>
struct SubdiffDescription {
  enum class Kind { Singleton, BallCap } kind;
  Vec<D> point;   // Singleton: the unique subgradient
  Vec<D> normal;  // BallCap: the set is {w : w.n = 0, ||w|| <= 1}

  bool contains(const Vec<D>& v, double tol = 1e-10) const {
    if (kind == Kind::Singleton) return (v - point).norm() <= tol;
    return std::abs(v.dot(normal)) <= tol && v.norm() <= 1.0 + tol;
  }
};

template <int D>
SubdiffDescription<D> subdiff_tangential_norm(const Vec<D>& x, const Vec<D>& n) {
  detail::require_unit_normal(n);
  const Vec<D> x_tau = tangential_part(x, n);
  if (detail::tangentially_zero(x_tau, x))
    return {SubdiffDescription<D>::Kind::BallCap, Vec<D>::Zero(), n};
  return {SubdiffDescription<D>::Kind::Singleton, (x_tau / x_tau.norm()).eval(), n};
}

// Normal cone to B = {w : w.n = 0, ||w|| <= 1} at a point y of B. In the
// interior of B the cone is the line spanned by n; on the relative boundary it
// gains the outward ray through y.
template <int D>
struct NormalConeDescription {
  enum class Kind { LineNormal, LinePlusRay } kind;
  Vec<D> normal;
  Vec<D> ray;  // LinePlusRay only: unit tangential direction of the added ray

  // Distance from z to the cone (exact: the pieces are orthogonal).
  double distance(const Vec<D>& z) const {
    Vec<D> proj = z.dot(normal) * normal;
    if (kind == Kind::LinePlusRay) proj += std::max(0.0, z.dot(ray)) * ray;
    return (z - proj).norm();
  }
  bool contains(const Vec<D>& z, double tol = 1e-10) const { return distance(z) <= tol; }
};

template <int D>
NormalConeDescription<D> normal_cone_ball_cap(const Vec<D>& y, const Vec<D>& n,
                                              double boundary_tol = 1e-10) {
  detail::require_unit_normal(n);
  const double r = y.norm();
  if (std::abs(y.dot(n)) > 1e-10 * std::max(1.0, r) || r > 1.0 + 1e-10)
    throw std::invalid_argument("normal_cone_ball_cap: point is not in the ball cap");
  if (r >= 1.0 - boundary_tol)
    return {NormalConeDescription<D>::Kind::LinePlusRay, n, (y / r).eval()};
  return {NormalConeDescription<D>::Kind::LineNormal, n, Vec<D>::Zero()};
}

// Second-order epi-derivative of G(w) = g0 ||w_tau|| with bound rate g0p,
// evaluated at x with base subgradient y in g0 * subdiff(||._tau||)(x), in
// direction z. Finite where the quadratic formula applies; +infinity outside
// the normal cone in the degenerate branch.
template <int D>
double epi2_G(const Vec<D>& x, const Vec<D>& y, const Vec<D>& z, const Vec<D>& n,
              double g0, double g0p) {
  detail::require_unit_normal(n);
  if (!(g0 > 0.0)) throw std::invalid_argument("epi2_G: g0 must be positive");

  const Vec<D> x_tau = tangential_part(x, n);
  if (detail::tangentially_zero(x_tau, x)) {
    const Vec<D> y_scaled = y / g0;
    // y/g0 must lie in the tangent-plane unit ball, checked inside.
    const auto cone = normal_cone_ball_cap(y_scaled, n);
    if (!cone.contains(z, 1e-10 * std::max(1.0, z.norm()))) return kInf;
    return g0p * y_scaled.dot(z);
  }

  const Vec<D> dir = x_tau / x_tau.norm();
  if ((y - g0 * dir).norm() > 1e-10 * std::max(1.0, g0))
    throw std::invalid_argument("epi2_G: y is not the subgradient of g0*||._tau|| at x");
  const Vec<D> z_tau = tangential_part(z, n);
  const double across = z_tau.dot(dir);
  return g0 / (2.0 * x_tau.norm()) * (z_tau.squaredNorm() - across * across) +
         g0p * dir.dot(z);
}

// Parameterized second-order difference quotient
//   (phi(t, x + t z) - phi(t, x) - t <y, z>) / t^2,   t > 0.
template <int D>
double second_order_quotient(const std::function<double(double, const Vec<D>&)>& phi,
                             double t, const Vec<D>& x, const Vec<D>& y, const Vec<D>& z) {
  if (!(t > 0.0)) throw std::invalid_argument("second_order_quotient: t must be positive");
  return (phi(t, x + t * z) - phi(t, x) - t * y.dot(z)) / (t * t);
}

// Proximal map of w -> weight * ||w_tau|| at x: the normal component passes
// through, the tangential component shrinks toward zero by the weight.
template <int D>
Vec<D> prox_tangential_shrink(const Vec<D>& x, const Vec<D>& n, double weight) {
  detail::require_unit_normal(n);
  if (weight < 0.0) throw std::invalid_argument("prox_tangential_shrink: weight must be >= 0");
  const Vec<D> x_tau = tangential_part(x, n);
  const Vec<D> x_n = x - x_tau;
  const double r = x_tau.norm();
  if (r <= weight) return x_n;
  return x_n + (1.0 - weight / r) * x_tau;
}

}  // namespace tresca
