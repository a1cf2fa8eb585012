// Pointwise convex calculus: hand-computed values, convergence of the
// second-order difference quotient to the epi-derivative, divergence outside
// the normal cone, and the prox characterization.

#include "tresca/convexlocal.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace tresca;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

using V2 = Vec<2>;
using V3 = Vec<3>;

TEST_CASE("tangential_part splits off the normal component") {
  const V2 n(0.0, 1.0);
  REQUIRE(tangential_part<2>(V2(3.0, 4.0), n).isApprox(V2(3.0, 0.0)));
  const V3 m = V3(1.0, 2.0, 2.0).normalized();
  const V3 v(0.3, -1.1, 0.7);
  const V3 vt = tangential_part<3>(v, m);
  REQUIRE_THAT(vt.dot(m), WithinAbs(0.0, 1e-15));
  REQUIRE((vt + v.dot(m) * m - v).norm() < 1e-15);
}

TEST_CASE("subdifferential of the tangential norm") {
  const V3 n(0.0, 0.0, 1.0);

  SECTION("away from the kink it is the unit tangential direction") {
    const auto s = subdiff_tangential_norm<3>(V3(3.0, 4.0, 7.0), n);
    REQUIRE(s.kind == SubdiffDescription<3>::Kind::Singleton);
    REQUIRE(s.point.isApprox(V3(0.6, 0.8, 0.0)));
    REQUIRE(s.contains(V3(0.6, 0.8, 0.0)));
    REQUIRE_FALSE(s.contains(V3(0.6, 0.8, 0.1)));
  }

  SECTION("at the kink it is the tangent-plane unit ball") {
    const auto s = subdiff_tangential_norm<3>(V3(0.0, 0.0, 7.0), n);
    REQUIRE(s.kind == SubdiffDescription<3>::Kind::BallCap);
    REQUIRE(s.contains(V3(0.3, -0.4, 0.0)));
    REQUIRE(s.contains(V3(0.6, 0.8, 0.0)));
    REQUIRE_FALSE(s.contains(V3(0.3, -0.4, 0.1)));
    REQUIRE_FALSE(s.contains(V3(0.9, 0.9, 0.0)));
  }

  SECTION("normal must be unit") {
    REQUIRE_THROWS_AS(subdiff_tangential_norm<3>(V3(1.0, 0.0, 0.0), V3(0.0, 0.0, 2.0)),
                      std::invalid_argument);
  }
}

TEST_CASE("normal cone to the tangent-plane unit ball") {
  const V3 n(0.0, 0.0, 1.0);

  SECTION("interior point: the cone is the normal line") {
    const auto c = normal_cone_ball_cap<3>(V3(0.3, 0.0, 0.0), n);
    REQUIRE(c.kind == NormalConeDescription<3>::Kind::LineNormal);
    REQUIRE(c.contains(V3(0.0, 0.0, 5.0)));
    REQUIRE(c.contains(V3(0.0, 0.0, -5.0)));
    REQUIRE_FALSE(c.contains(V3(0.01, 0.0, 5.0)));
    REQUIRE_THAT(c.distance(V3(0.01, 0.0, 5.0)), WithinAbs(0.01, 1e-15));
  }

  SECTION("boundary point: the outward ray is added") {
    const auto c = normal_cone_ball_cap<3>(V3(0.0, 1.0, 0.0), n);
    REQUIRE(c.kind == NormalConeDescription<3>::Kind::LinePlusRay);
    REQUIRE(c.contains(V3(0.0, 3.0, -2.0)));
    REQUIRE_FALSE(c.contains(V3(0.0, -3.0, -2.0)));
    REQUIRE_THAT(c.distance(V3(0.0, -3.0, -2.0)), WithinAbs(3.0, 1e-15));
  }

  SECTION("points outside the ball cap are rejected") {
    REQUIRE_THROWS_AS(normal_cone_ball_cap<3>(V3(0.0, 0.0, 0.5), n), std::invalid_argument);
    REQUIRE_THROWS_AS(normal_cone_ball_cap<3>(V3(1.5, 0.0, 0.0), n), std::invalid_argument);
  }

  SECTION("200 random probes agree with a direct projection oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const auto boundary = normal_cone_ball_cap<3>(V3(1.0, 0.0, 0.0), n);
    const auto interior = normal_cone_ball_cap<3>(V3(0.2, 0.1, 0.0), n);
    for (int i = 0; i < 200; ++i) {
      const V3 z(unif(rng), unif(rng), unif(rng));
      // Oracle distances assembled from scratch: the line part keeps z.n, the
      // ray part keeps the positive multiple of e1.
      const double d_int = std::hypot(z.x(), z.y());
      const double d_bnd = std::hypot(std::min(z.x(), 0.0), z.y());
      REQUIRE_THAT(interior.distance(z), WithinAbs(d_int, 1e-13));
      REQUIRE_THAT(boundary.distance(z), WithinAbs(d_bnd, 1e-13));
    }
  }
}

TEST_CASE("second-order epi-derivative of the weighted tangential norm") {
  const V3 n(0.0, 0.0, 1.0);

  SECTION("regular point, hand value") {
    // x_tau = (1,0,0), z_tau = (0,2,0): curvature term 1/(2*1) * (4 - 0) = 2.
    const double v = epi2_G<3>(V3(1.0, 0.0, 2.0), V3(1.0, 0.0, 0.0), V3(0.0, 2.0, 5.0), n,
                               1.0, 0.0);
    REQUIRE_THAT(v, WithinRel(2.0, 1e-14));
  }

  SECTION("bound-rate term adds g0p * <dir, z>") {
    const double v = epi2_G<3>(V3(1.0, 0.0, 2.0), V3(1.0, 0.0, 0.0), V3(3.0, 2.0, 5.0), n,
                               1.0, 0.25);
    REQUIRE_THAT(v, WithinRel(2.0 + 0.25 * 3.0, 1e-14));
  }

  SECTION("in two dimensions the curvature term vanishes exactly") {
    const V2 n2(0.0, 1.0);
    const double v = epi2_G<2>(V2(2.0, 5.0), V2(1.5, 0.0), V2(3.0, 7.0), n2, 1.5, 0.25);
    REQUIRE(v == 0.25 * 3.0);  // exact: ||z_tau||^2 - (z_tau.dir)^2 is 9 - 9
  }

  SECTION("degenerate point, interior subgradient: finite only along the normal") {
    const V3 x(0.0, 0.0, 2.0);
    const V3 y(1.0, 0.0, 0.0);  // y/g0 = (0.5,0,0), interior of the cap
    REQUIRE_THAT(epi2_G<3>(x, y, V3(0.0, 0.0, 4.0), n, 2.0, 0.7), WithinAbs(0.0, 1e-15));
    REQUIRE(epi2_G<3>(x, y, V3(0.1, 0.0, 4.0), n, 2.0, 0.7) == kInf);
  }

  SECTION("degenerate point, boundary subgradient: the slip ray opens up") {
    const V3 x(0.0, 0.0, 2.0);
    const V3 y(2.0, 0.0, 0.0);  // y/g0 on the cap boundary
    const double v = epi2_G<3>(x, y, V3(0.7, 0.0, -3.0), n, 2.0, 0.4);
    REQUIRE_THAT(v, WithinRel(0.4 * 0.7, 1e-14));
    REQUIRE(epi2_G<3>(x, y, V3(-0.7, 0.0, -3.0), n, 2.0, 0.4) == kInf);
  }

  SECTION("mismatched base subgradient is rejected") {
    REQUIRE_THROWS_AS(
        epi2_G<3>(V3(1.0, 0.0, 2.0), V3(0.5, 0.0, 0.0), V3(0.0, 2.0, 5.0), n, 1.0, 0.0),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        epi2_G<3>(V3(1.0, 0.0, 2.0), V3(1.0, 0.0, 0.0), V3(0.0, 2.0, 5.0), n, 0.0, 0.0),
        std::invalid_argument);
  }
}

namespace {

// The parameterized functional whose second-order expansion epi2_G encodes:
// phi(t, w) = (g0 + t g0p) ||w_tau||.
std::function<double(double, const V3&)> weighted_norm(const V3& n, double g0, double g0p) {
  return [n, g0, g0p](double t, const V3& w) {
    return (g0 + t * g0p) * tangential_part<3>(w, n).norm();
  };
}

}  // namespace

TEST_CASE("difference quotients converge to the epi-derivative at rate t") {
  const V3 n = V3(1.0, 2.0, 2.0).normalized();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  for (int trial = 0; trial < 20; ++trial) {
    V3 x(unif(rng), unif(rng), unif(rng));
    // Keep a safe distance from the kink so the curvature constant is tame.
    V3 x_tau = tangential_part<3>(x, n);
    if (x_tau.norm() < 0.3) {
      x += (0.5 / std::max(x_tau.norm(), 1e-12)) * x_tau;
      x_tau = tangential_part<3>(x, n);
    }
    const V3 z = V3(unif(rng), unif(rng), unif(rng)) * 2.0;
    const double g0 = 0.5 + 1.5 * std::abs(unif(rng));
    const double g0p = unif(rng);
    const V3 y = g0 * x_tau.normalized();
    const double exact = epi2_G<3>(x, y, z, n, g0, g0p);
    const auto phi = weighted_norm(n, g0, g0p);

    const double C = 100.0 * (g0 + std::abs(g0p)) * std::pow(1.0 + z.norm(), 3) /
                     std::pow(std::min(x_tau.norm(), 1.0), 3);
    for (double t : {1e-2, 1e-3, 1e-4}) {
      const double q = second_order_quotient<3>(phi, t, x, y, z);
      REQUIRE(std::abs(q - exact) <= C * t);
    }
  }
}

TEST_CASE("difference quotients blow up like 1/t outside the cone") {
  const V3 n(0.0, 0.0, 1.0);
  const V3 x(0.0, 0.0, 2.0);
  const double g0 = 1.0, g0p = 0.3;
  const V3 y(0.5, 0.0, 0.0);  // interior subgradient
  const V3 z(1.0, 1.0, 0.0);  // tangential direction: outside the normal line
  REQUIRE(epi2_G<3>(x, y, z, n, g0, g0p) == kInf);

  // q(t) = A/t + B with A = g0 ||z_tau|| - <y, z> > 0.
  const double A = g0 * std::sqrt(2.0) - y.dot(z);
  const auto phi = weighted_norm(n, g0, g0p);
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const double q = second_order_quotient<3>(phi, t, x, y, z);
    REQUIRE(q > 0.0);
    REQUIRE_THAT(q * t, WithinAbs(A, std::abs(g0p) * z.norm() * t * 2.0));
  }
  const double q2 = second_order_quotient<3>(phi, 1e-2, x, y, z);
  const double q4 = second_order_quotient<3>(phi, 1e-4, x, y, z);
  REQUIRE(q4 > 50.0 * q2);  // ~100x for a clean 1/t
}

TEST_CASE("second_order_quotient validates t and reproduces quadratics exactly") {
  const auto quad = [](double, const V2& w) { return 0.5 * w.squaredNorm(); };
  const V2 x(0.4, -1.2), z(0.9, 0.3);
  for (double t : {1e-1, 1e-2, 1e-4})
    REQUIRE_THAT(second_order_quotient<2>(quad, t, x, x, z),
                 WithinRel(0.5 * z.squaredNorm(), 1e-6));
  REQUIRE_THROWS_AS(second_order_quotient<2>(quad, 0.0, x, x, z), std::invalid_argument);
  REQUIRE_THROWS_AS(second_order_quotient<2>(quad, -1.0, x, x, z), std::invalid_argument);
}

TEST_CASE("prox of the weighted tangential norm") {
  const V2 n(0.0, 1.0);

  SECTION("hand values") {
    REQUIRE(prox_tangential_shrink<2>(V2(3.0, 4.0), n, 1.0).isApprox(V2(2.0, 4.0)));
    REQUIRE(prox_tangential_shrink<2>(V2(3.0, 4.0), n, 5.0).isApprox(V2(0.0, 4.0)));
    REQUIRE(prox_tangential_shrink<2>(V2(3.0, 4.0), n, 0.0).isApprox(V2(3.0, 4.0)));
    REQUIRE(prox_tangential_shrink<2>(V2(-3.0, 4.0), n, 1.0).isApprox(V2(-2.0, 4.0)));
    REQUIRE_THROWS_AS(prox_tangential_shrink<2>(V2(3.0, 4.0), n, -0.1), std::invalid_argument);
  }

  SECTION("firm nonexpansiveness over random pairs") {
    const V3 m = V3(2.0, -1.0, 2.0).normalized();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
      const V3 a(unif(rng), unif(rng), unif(rng));
      const V3 b(unif(rng), unif(rng), unif(rng));
      const double w = std::abs(unif(rng));
      const V3 pa = prox_tangential_shrink<3>(a, m, w);
      const V3 pb = prox_tangential_shrink<3>(b, m, w);
      const double lhs = (pa - pb).squaredNorm();
      const double rhs = (pa - pb).dot(a - b);
      REQUIRE(lhs <= rhs + 1e-12 * (1.0 + lhs));
    }
  }

  SECTION("prox point satisfies the subgradient optimality inclusion") {
    // x - prox(x) must be w * (a subgradient at prox(x)).
    const V3 m(0.0, 0.0, 1.0);
    const V3 x(0.6, -0.8, 2.0);
    for (double w : {0.4, 1.0, 3.0}) {
      const V3 p = prox_tangential_shrink<3>(x, m, w);
      const auto sd = subdiff_tangential_norm<3>(p, m);
      if (w > 0.0) REQUIRE(sd.contains(((x - p) / w).eval(), 1e-10));
    }
  }
}
