// Assembly and the linear solve: exact energies of affine fields, load totals
// against an independent quadrature, the traction patch test, and the checked
// residual contract.

#include "tresca/assembly.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace tresca;
using namespace testsupport;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = 3.14159265358979323846;

VectorField interpolate(const TriMesh& mesh, const VectorFn& f) {
  VectorField u(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) u.set(v, f(mesh.vertices[v]));
  return u;
}
}  // namespace

TEST_CASE("energy of affine displacement fields is exact") {
  const auto f = make_rect_fixture(8, 8, "L", ElasticMaterial{1.0, 1.0});

  SECTION("uniaxial stretch u = (x, 0): energy 2 mu + lambda = 3") {
    const VectorField u = interpolate(f->mesh, [](const Eigen::Vector2d& p) {
      return Eigen::Vector2d(p.x(), 0.0);
    });
    REQUIRE_THAT(energy_inner(f->sys, u, u), WithinRel(3.0, 1e-12));
    REQUIRE_THAT(energy_norm(f->sys, u), WithinRel(std::sqrt(3.0), 1e-12));
  }

  SECTION("rigid rotation u = (-y, x) carries no strain energy") {
    const VectorField u = interpolate(f->mesh, [](const Eigen::Vector2d& p) {
      return Eigen::Vector2d(-p.y(), p.x());
    });
    REQUIRE_THAT(energy_inner(f->sys, u, u), WithinAbs(0.0, 1e-12));
  }

  SECTION("the energy inner product is symmetric") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    VectorField a(f->mesh.num_vertices()), b(f->mesh.num_vertices());
    for (int i = 0; i < a.dofs.size(); ++i) {
      a.dofs[i] = unif(rng);
      b.dofs[i] = unif(rng);
    }
    REQUIRE_THAT(energy_inner(f->sys, a, b), WithinRel(energy_inner(f->sys, b, a), 1e-12));
  }
}

TEST_CASE("body load totals match an independent quadrature") {
  const TriMesh mesh = generate_disk_mesh(64);
  const VectorFn f = [](const Eigen::Vector2d& p) {
    const double v = (5.0 - p.x() * p.x() - p.y() * p.y() + p.x() * p.y()) / 4.0;
    return Eigen::Vector2d(v, v);
  };
  const Eigen::VectorXd b = assemble_body_load(mesh, f);

  double sx = 0.0, sy = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    sx += b[2 * v];
    sy += b[2 * v + 1];
  }

  // Independent 6-point rule, also exact for quadratics: the two integrals of
  // f over the meshed polygon must agree to roundoff.
  const TriQuadrature quad;
  double exact = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int q = 0; q < TriQuadrature::n; ++q) {
      const Eigen::Vector2d x = quad.l1[q] * mesh.vertices[tri[1]] +
                                quad.l2[q] * mesh.vertices[tri[2]] +
                                (1.0 - quad.l1[q] - quad.l2[q]) * mesh.vertices[tri[0]];
      exact += quad.w[q] * mesh.triangle_area(t) * f(x).x();
    }
  }
  REQUIRE_THAT(sx, WithinRel(exact, 1e-13));
  REQUIRE_THAT(sy, WithinRel(exact, 1e-13));
  // And the polygon integral approximates the disk value (5 pi - pi/2) / 4.
  REQUIRE_THAT(sx, WithinRel((5.0 * kPi - kPi / 2.0) / 4.0, 5e-3));

  REQUIRE(assemble_body_load(mesh, nullptr).norm() == 0.0);
}

TEST_CASE("normal boundary load resultant over a half circle") {
  // Dirichlet arc wrapped through zero leaves the left half circle Neumann;
  // the resultant of unit normal traction there is the integral of n, (-2, 0).
  const TriMesh mesh = generate_disk_mesh(64, 1.5 * kPi, 2.5 * kPi);
  const BoundaryTopology topo = build_boundary_topology(mesh);
  const Eigen::VectorXd b = assemble_boundary_normal_load(topo, BoundaryField::constant(topo, 1.0));

  double sx = 0.0, sy = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    sx += b[2 * v];
    sy += b[2 * v + 1];
  }
  REQUIRE_THAT(sx, WithinRel(-2.0, 2e-2));
  REQUIRE_THAT(sy, WithinAbs(0.0, 1e-12));  // symmetric node placement cancels y

  SECTION("h n through the vector-load path gives the identical vector") {
    BoundaryVectorField z(topo.num_neumann());
    for (int i = 0; i < topo.num_neumann(); ++i) z.values[i] = topo.normal[topo.neumann_nodes[i]];
    const Eigen::VectorXd b2 = assemble_boundary_vector_load(topo, z);
    REQUIRE((b - b2).lpNorm<Eigen::Infinity>() <= 1e-15);
  }
}

TEST_CASE("traction recovery passes the constant-stress patch test") {
  // u = (x, 0) with lambda = 0, mu = 1 has sigma = diag(2, 0): the right edge
  // carries traction (2, 0), top and bottom are traction free.
  const int n = 8;
  const auto f = make_rect_fixture(n, n, "L", ElasticMaterial{1.0, 0.0});
  const VectorField u = interpolate(f->mesh, [](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(p.x(), 0.0);
  });
  const BoundaryTraction tr =
      recover_boundary_traction(f->sys, u, Eigen::VectorXd::Zero(u.dofs.size()));

  for (int i = 0; i < f->topo.num_neumann(); ++i) {
    const int v = f->topo.neumann_nodes[i];
    const Eigen::Vector2d p = f->mesh.vertices[v];
    const bool corner = (std::abs(p.x() - 1.0) < 1e-14) &&
                        (std::abs(p.y()) < 1e-14 || std::abs(p.y() - 1.0) < 1e-14);
    if (corner) {
      // Lumping averages the two adjacent sides: sigma (n_b + n_r) / 2.
      REQUIRE_THAT(tr.t.values[i].x(), WithinAbs(1.0, 1e-8));
      REQUIRE_THAT(tr.t.values[i].y(), WithinAbs(0.0, 1e-8));
    } else if (std::abs(p.x() - 1.0) < 1e-14) {
      REQUIRE_THAT(tr.t.values[i].x(), WithinAbs(2.0, 1e-8));
      REQUIRE_THAT(tr.t.values[i].y(), WithinAbs(0.0, 1e-8));
    } else {
      REQUIRE_THAT(tr.t.values[i].norm(), WithinAbs(0.0, 1e-8));
    }
    // Normal/tangential split always reconstructs the vector.
    const Eigen::Vector2d rebuilt =
        tr.sigma_n[i] * f->topo.normal[v] + tr.sigma_tau.values[i];
    REQUIRE((rebuilt - tr.t.values[i]).norm() <= 1e-14 * (1.0 + tr.t.values[i].norm()));
    REQUIRE_THAT(tr.sigma_tau.values[i].dot(f->topo.normal[v]), WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("traction of the zero field is minus the load density") {
  const auto f = make_disk_fixture(48, reference_material());
  const Eigen::VectorXd b = assemble_body_load(f->mesh, lookup_vector_function("paper-f"));
  const BoundaryTraction tr =
      recover_boundary_traction(f->sys, VectorField(f->mesh.num_vertices()), b);
  for (int i = 0; i < f->topo.num_neumann(); ++i) {
    const int v = f->topo.neumann_nodes[i];
    const Eigen::Vector2d expected(-b[2 * v] / f->topo.node_weight[v],
                                   -b[2 * v + 1] / f->topo.node_weight[v]);
    REQUIRE((tr.t.values[i] - expected).norm() <= 1e-13 * (1.0 + expected.norm()));
  }
}

TEST_CASE("the reduced solve clamps Dirichlet dofs and meets its residual bound") {
  const auto f = make_disk_fixture(32, reference_material());
  const Eigen::VectorXd load = assemble_body_load(f->mesh, lookup_vector_function("paper-f"));
  const VectorField u = solve_dirichlet_neumann(f->sys, load);

  for (int v = 0; v < f->mesh.num_vertices(); ++v)
    if (f->topo.node_class[v] == NodeClass::Dirichlet ||
        f->topo.node_class[v] == NodeClass::Interface)
      REQUIRE(u.at(v).norm() == 0.0);

  Eigen::VectorXd r = f->sys.K_full * u.dofs - load;
  double rnorm2 = 0.0, bnorm2 = 0.0;
  for (int dof : f->sys.free_dofs) {
    rnorm2 += r[dof] * r[dof];
    bnorm2 += load[dof] * load[dof];
  }
  REQUIRE(std::sqrt(rnorm2) <= kSolveRtol * std::sqrt(bnorm2));
  REQUIRE(energy_norm(f->sys, u) > 0.0);

  SECTION("recovered traction reproduces an applied boundary load") {
    const BoundaryField h = BoundaryField::constant(f->topo, -0.5);
    const Eigen::VectorXd total = load + assemble_boundary_normal_load(f->topo, h);
    const VectorField uh = solve_dirichlet_neumann(f->sys, total);
    const BoundaryTraction tr = recover_boundary_traction(f->sys, uh, load);
    for (int i = 0; i < f->topo.num_neumann(); ++i) {
      const int v = f->topo.neumann_nodes[i];
      REQUIRE((tr.t.values[i] - (-0.5) * f->topo.normal[v]).norm() <= 1e-8);
    }
  }
}

TEST_CASE("a mesh without Dirichlet constraints is rejected") {
  const TriMesh mesh = generate_rectangle_mesh(4, 4, "");
  const BoundaryTopology topo = build_boundary_topology(mesh);
  REQUIRE_THROWS_AS(assemble_stiffness(mesh, topo, ElasticMaterial{}), SolveError);
}
