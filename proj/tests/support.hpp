#pragma once

// Shared test fixtures and independent oracles. The oracle solver here
// deliberately avoids the library's reduction machinery: it builds an explicit
// dense basis of the constrained space and solves with dense Cholesky, so
// agreement with the sparse path is a genuine cross-check.

#include "tresca/assembly.hpp"
#include "tresca/mesh.hpp"
#include "tresca/registry.hpp"
#include "tresca/vi.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <memory>
#include <random>

namespace testsupport {

using namespace tresca;

struct Fixture {
  TriMesh mesh;
  BoundaryTopology topo;
  StiffnessSystem sys;
};

// Address-stable bundle (StiffnessSystem keeps pointers to mesh and topology).
inline std::unique_ptr<Fixture> make_disk_fixture(int n_boundary, const ElasticMaterial& mat) {
  auto f = std::make_unique<Fixture>();
  f->mesh = generate_disk_mesh(n_boundary);
  f->topo = build_boundary_topology(f->mesh);
  f->sys = assemble_stiffness(f->mesh, f->topo, mat);
  return f;
}

inline std::unique_ptr<Fixture> make_rect_fixture(int nx, int ny, const std::string& dsides,
                                                  const ElasticMaterial& mat) {
  auto f = std::make_unique<Fixture>();
  f->mesh = generate_rectangle_mesh(nx, ny, dsides);
  f->topo = build_boundary_topology(f->mesh);
  f->sys = assemble_stiffness(f->mesh, f->topo, mat);
  return f;
}

// Reference configuration: unit disk, diagonal body pull, zero normal load,
// friction bound g1 + z g2 evaluated at the boundary nodes.
inline TrescaProblemSpec reference_problem(const Fixture& f, const BoundaryField& z) {
  TrescaProblemSpec p;
  p.mesh = &f.mesh;
  p.topo = &f.topo;
  p.material = reference_material();
  p.body_force = lookup_vector_function("paper-f");
  p.normal_load = BoundaryField::from_function(f.mesh, f.topo, lookup_scalar_function("paper-h"));
  const BoundaryField g1 = BoundaryField::from_function(f.mesh, f.topo, lookup_scalar_function("paper-g1"));
  const BoundaryField g2 = BoundaryField::from_function(f.mesh, f.topo, lookup_scalar_function("paper-g2"));
  BoundaryField g(f.topo.num_neumann());
  for (int i = 0; i < g.size(); ++i) g[i] = g1[i] + z[i] * g2[i];
  p.friction_bound = g;
  return p;
}

inline BoundaryField reference_z0(const Fixture& f) {
  return BoundaryField::from_function(f.mesh, f.topo, lookup_scalar_function("paper-z0"));
}

// Dense-basis oracle: solve the elasticity system with zero Dirichlet values,
// the tangential dof of selected Neumann nodes pinned, and optional tangential
// springs (already weight-scaled) on the others.
inline VectorField oracle_constrained_solve(const Fixture& f, const Eigen::VectorXd& load,
                                            const std::vector<char>& pin_tangential,
                                            const std::vector<double>& tang_spring = {}) {
  const int ndof = 2 * f.mesh.num_vertices();
  std::vector<Eigen::VectorXd> cols;
  std::vector<int> spring_col(f.topo.num_neumann(), -1);
  for (int v = 0; v < f.mesh.num_vertices(); ++v) {
    const NodeClass c = f.topo.node_class[v];
    if (c == NodeClass::Dirichlet || c == NodeClass::Interface) continue;
    if (c == NodeClass::Interior) {
      for (int d = 0; d < 2; ++d) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(ndof);
        e[2 * v + d] = 1.0;
        cols.push_back(e);
      }
      continue;
    }
    const int slot = f.topo.neumann_index[v];
    Eigen::VectorXd en = Eigen::VectorXd::Zero(ndof);
    en[2 * v] = f.topo.normal[v].x();
    en[2 * v + 1] = f.topo.normal[v].y();
    cols.push_back(en);
    if (!pin_tangential[slot]) {
      Eigen::VectorXd et = Eigen::VectorXd::Zero(ndof);
      et[2 * v] = f.topo.tangent[v].x();
      et[2 * v + 1] = f.topo.tangent[v].y();
      spring_col[slot] = static_cast<int>(cols.size());
      cols.push_back(et);
    }
  }

  const int m = static_cast<int>(cols.size());
  Eigen::MatrixXd B(ndof, m);
  for (int j = 0; j < m; ++j) B.col(j) = cols[j];

  Eigen::MatrixXd K_red = B.transpose() * f.sys.K_full * B;
  if (!tang_spring.empty())
    for (int i = 0; i < f.topo.num_neumann(); ++i)
      if (spring_col[i] >= 0) K_red(spring_col[i], spring_col[i]) += tang_spring[i];
  const Eigen::VectorXd y = Eigen::LLT<Eigen::MatrixXd>(K_red).solve(B.transpose() * load);
  return VectorField(Eigen::VectorXd(B * y));
}

// Fully stuck configuration: every Neumann tangential dof pinned.
inline VectorField oracle_stick_solve(const Fixture& f, const Eigen::VectorXd& load) {
  return oracle_constrained_solve(f, load, std::vector<char>(f.topo.num_neumann(), 1));
}

// Strength-4 triangle rule (6 points), exact for our quartic error integrands.
struct TriQuadrature {
  static constexpr int n = 6;
  double w[n];
  double l1[n], l2[n];
  TriQuadrature() {
    const double wa = 0.223381589678011, a = 0.445948490915965;
    const double wb = 0.109951743655322, b = 0.091576213509771;
    const double ws[n] = {wa, wa, wa, wb, wb, wb};
    const double p1[n] = {a, 1 - 2 * a, a, b, 1 - 2 * b, b};
    const double p2[n] = {a, a, 1 - 2 * a, b, b, 1 - 2 * b};
    for (int i = 0; i < n; ++i) {
      w[i] = ws[i];
      l1[i] = p1[i];
      l2[i] = p2[i];
    }
  }
};

// Energy-norm distance between a P1 field and an exact solution given by its
// strain field: integrates (e_h - e*) : A : (e_h - e*) with the 6-point rule.
inline double energy_error_vs_exact(
    const TriMesh& mesh, const ElasticMaterial& mat, const VectorField& u_h,
    const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& exact_strain) {
  static const TriQuadrature quad;
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]],
                          p2 = mesh.vertices[tri[2]];
    const double area = mesh.triangle_area(t);
    const double inv2A = 1.0 / (2.0 * area);
    Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(u_h), constant
    const Eigen::Vector2d gphi[3] = {
        Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) * inv2A,
        Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) * inv2A,
        Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) * inv2A};
    for (int i = 0; i < 3; ++i) grad += u_h.at(tri[i]) * gphi[i].transpose();
    const Eigen::Matrix2d e_h = 0.5 * (grad + grad.transpose());

    for (int q = 0; q < TriQuadrature::n; ++q) {
      const Eigen::Vector2d x =
          quad.l1[q] * p1 + quad.l2[q] * p2 + (1.0 - quad.l1[q] - quad.l2[q]) * p0;
      const Eigen::Matrix2d d = e_h - exact_strain(x);
      const double density =
          2.0 * mat.mu * d.squaredNorm() + mat.lambda * d.trace() * d.trace();
      total += quad.w[q] * area * density;
    }
  }
  return std::sqrt(total);
}

inline BoundaryField random_admissible_z(const Fixture& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  BoundaryField z(f.topo.num_neumann());
  for (int i = 0; i < z.size(); ++i) z[i] = unif(rng);
  return z;
}

class WallTimer {
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
};

}  // namespace testsupport
