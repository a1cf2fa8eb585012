#include "tresca/assembly.hpp"

#include <cmath>
#include <vector>

namespace tresca {

BoundaryField BoundaryField::constant(const BoundaryTopology& topo, double c) {
  BoundaryField f(topo.num_neumann());
  f.values.setConstant(c);
  return f;
}

BoundaryField BoundaryField::from_function(const TriMesh& mesh, const BoundaryTopology& topo,
                                           const ScalarFn& fn) {
  BoundaryField f(topo.num_neumann());
  for (int i = 0; i < topo.num_neumann(); ++i) f[i] = fn(mesh.vertices[topo.neumann_nodes[i]]);
  return f;
}

namespace {

// Constant-strain operator of a P1 triangle: rows (e11, e22, 2 e12) against the
// six nodal dofs, plus the area.
struct ElementGeometry {
  Eigen::Matrix<double, 3, 6> B;
  double area;
};

ElementGeometry element_geometry(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Eigen::Vector2d p0 = mesh.vertices[tri[0]];
  const Eigen::Vector2d p1 = mesh.vertices[tri[1]];
  const Eigen::Vector2d p2 = mesh.vertices[tri[2]];

  ElementGeometry g;
  g.area = 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x()));
  const double inv2A = 1.0 / (2.0 * g.area);
  const double b[3] = {(p1.y() - p2.y()) * inv2A, (p2.y() - p0.y()) * inv2A,
                       (p0.y() - p1.y()) * inv2A};
  const double c[3] = {(p2.x() - p1.x()) * inv2A, (p0.x() - p2.x()) * inv2A,
                       (p1.x() - p0.x()) * inv2A};
  g.B.setZero();
  for (int i = 0; i < 3; ++i) {
    g.B(0, 2 * i) = b[i];
    g.B(1, 2 * i + 1) = c[i];
    g.B(2, 2 * i) = c[i];
    g.B(2, 2 * i + 1) = b[i];
  }
  return g;
}

}  // namespace

StiffnessSystem assemble_stiffness(const TriMesh& mesh, const BoundaryTopology& topo,
                                   const ElasticMaterial& material) {
  const int ndof = 2 * mesh.num_vertices();

  Eigen::Matrix3d D;
  D << 2.0 * material.mu + material.lambda, material.lambda, 0.0,  //
      material.lambda, 2.0 * material.mu + material.lambda, 0.0,   //
      0.0, 0.0, material.mu;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::Matrix<double, 6, 6> Ke = g.area * g.B.transpose() * D * g.B;
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        trips.emplace_back(2 * tri[i / 2] + i % 2, 2 * tri[j / 2] + j % 2, Ke(i, j));
  }

  StiffnessSystem sys;
  sys.mesh = &mesh;
  sys.topo = &topo;
  sys.material = material;
  sys.K_full.resize(ndof, ndof);
  sys.K_full.setFromTriplets(trips.begin(), trips.end());

  sys.full_to_free.assign(ndof, -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const NodeClass c = topo.node_class[v];
    if (c == NodeClass::Dirichlet || c == NodeClass::Interface) continue;
    for (int d = 0; d < 2; ++d) {
      sys.full_to_free[2 * v + d] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(2 * v + d);
    }
  }

  std::vector<Eigen::Triplet<double>> reduced;
  reduced.reserve(trips.size());
  for (int col = 0; col < sys.K_full.outerSize(); ++col)
    for (SpMat::InnerIterator it(sys.K_full, col); it; ++it) {
      const int i = sys.full_to_free[it.row()], j = sys.full_to_free[it.col()];
      if (i >= 0 && j >= 0) reduced.emplace_back(i, j, it.value());
    }
  SpMat K_ff(static_cast<int>(sys.free_dofs.size()), static_cast<int>(sys.free_dofs.size()));
  K_ff.setFromTriplets(reduced.begin(), reduced.end());

  sys.ldlt = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
  sys.ldlt->compute(K_ff);
  if (sys.ldlt->info() != Eigen::Success)
    throw SolveError("assemble_stiffness: factorization failed (mesh without Dirichlet part?)");
  // LDLT happily factors a singular matrix; rigid-body modes show up as pivots
  // that are zero to roundoff. Reject them here rather than at solve time.
  if (K_ff.rows() > 0) {
    const Eigen::VectorXd d = sys.ldlt->vectorD();
    if (d.minCoeff() <= 1e-14 * d.maxCoeff())
      throw SolveError("assemble_stiffness: stiffness is singular (no Dirichlet constraints?)");
  }
  return sys;
}

Eigen::VectorXd assemble_body_load(const TriMesh& mesh, const VectorFn& f) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * mesh.num_vertices());
  if (!f) return b;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double scale = mesh.triangle_area(t) / 3.0;
    Eigen::Vector2d fm[3];
    for (int k = 0; k < 3; ++k)  // midpoint opposite vertex k
      fm[k] = f(0.5 * (mesh.vertices[tri[(k + 1) % 3]] + mesh.vertices[tri[(k + 2) % 3]]));
    for (int i = 0; i < 3; ++i) {
      // phi_i is 1/2 at the two midpoints not opposite vertex i, 0 at the third.
      const Eigen::Vector2d contrib = scale * 0.5 * (fm[(i + 1) % 3] + fm[(i + 2) % 3]);
      b[2 * tri[i]] += contrib.x();
      b[2 * tri[i] + 1] += contrib.y();
    }
  }
  return b;
}

Eigen::VectorXd assemble_boundary_normal_load(const BoundaryTopology& topo,
                                              const BoundaryField& h) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * topo.node_class.size());
  for (int i = 0; i < topo.num_neumann(); ++i) {
    const int v = topo.neumann_nodes[i];
    const Eigen::Vector2d load = topo.node_weight[v] * h[i] * topo.normal[v];
    b[2 * v] += load.x();
    b[2 * v + 1] += load.y();
  }
  return b;
}

Eigen::VectorXd assemble_boundary_vector_load(const BoundaryTopology& topo,
                                              const BoundaryVectorField& z) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * topo.node_class.size());
  for (int i = 0; i < topo.num_neumann(); ++i) {
    const int v = topo.neumann_nodes[i];
    const Eigen::Vector2d load = topo.node_weight[v] * z.values[i];
    b[2 * v] += load.x();
    b[2 * v + 1] += load.y();
  }
  return b;
}

VectorField solve_dirichlet_neumann(const StiffnessSystem& sys, const Eigen::VectorXd& load) {
  const int nfree = static_cast<int>(sys.free_dofs.size());
  Eigen::VectorXd b(nfree);
  for (int i = 0; i < nfree; ++i) b[i] = load[sys.free_dofs[i]];

  const Eigen::VectorXd x = sys.ldlt->solve(b);
  if (sys.ldlt->info() != Eigen::Success) throw SolveError("solve_dirichlet_neumann: solve failed");

  VectorField u(static_cast<int>(load.size()) / 2);
  for (int i = 0; i < nfree; ++i) u.dofs[sys.free_dofs[i]] = x[i];

  Eigen::VectorXd residual = sys.K_full * u.dofs - load;
  for (int dof = 0; dof < static_cast<int>(load.size()); ++dof)
    if (sys.full_to_free[dof] < 0) residual[dof] = 0.0;  // reactions, not residuals
  if (residual.norm() > kSolveRtol * std::max(b.norm(), 1e-300))
    throw SolveError("solve_dirichlet_neumann: residual exceeds tolerance");
  return u;
}

BoundaryTraction recover_boundary_traction(const StiffnessSystem& sys, const VectorField& u,
                                           const Eigen::VectorXd& body_load) {
  const BoundaryTopology& topo = *sys.topo;
  const Eigen::VectorXd r = sys.K_full * u.dofs - body_load;

  BoundaryTraction out;
  out.t = BoundaryVectorField(topo.num_neumann());
  out.sigma_n = BoundaryField(topo.num_neumann());
  out.sigma_tau = BoundaryVectorField(topo.num_neumann());
  for (int i = 0; i < topo.num_neumann(); ++i) {
    const int v = topo.neumann_nodes[i];
    const Eigen::Vector2d t(r[2 * v] / topo.node_weight[v], r[2 * v + 1] / topo.node_weight[v]);
    out.t.values[i] = t;
    out.sigma_n[i] = t.dot(topo.normal[v]);
    out.sigma_tau.values[i] = t - out.sigma_n[i] * topo.normal[v];
  }
  return out;
}

double energy_inner(const StiffnessSystem& sys, const VectorField& a, const VectorField& b) {
  return a.dofs.dot(sys.K_full * b.dofs);
}

double energy_norm(const StiffnessSystem& sys, const VectorField& a) {
  return std::sqrt(std::max(0.0, energy_inner(sys, a, a)));
}

}  // namespace tresca
