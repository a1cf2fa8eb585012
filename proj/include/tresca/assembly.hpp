#pragma once

// P1 vector elasticity on tagged triangle meshes: stiffness and load assembly,
// the Dirichlet-reduced linear solve, consistent boundary traction recovery,
// and the energy inner product.
//
// Quadrature is fixed throughout: the 3-midpoint rule on cells (exact for
// quadratics) and single-node lumping on boundary edges (a boundary node
// carries half the length of its adjacent boundary edges).

#include "tresca/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <stdexcept>

namespace tresca {

using SpMat = Eigen::SparseMatrix<double>;
using VectorFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;
using ScalarFn = std::function<double(const Eigen::Vector2d&)>;

struct ElasticMaterial {
  double mu = 1.0;      // shear modulus
  double lambda = 1.0;  // first Lame parameter
};

// Nodal vector field; dofs are flattened as (2i, 2i+1) = (x, y) at vertex i.
struct VectorField {
  Eigen::VectorXd dofs;

  VectorField() = default;
  explicit VectorField(int num_nodes) : dofs(Eigen::VectorXd::Zero(2 * num_nodes)) {}
  explicit VectorField(Eigen::VectorXd d) : dofs(std::move(d)) {}

  int num_nodes() const { return static_cast<int>(dofs.size()) / 2; }
  Eigen::Vector2d at(int node) const { return {dofs[2 * node], dofs[2 * node + 1]}; }
  void set(int node, const Eigen::Vector2d& v) {
    dofs[2 * node] = v.x();
    dofs[2 * node + 1] = v.y();
  }
};

// Scalar values on the Neumann nodes, aligned with BoundaryTopology::neumann_nodes.
struct BoundaryField {
  Eigen::VectorXd values;

  BoundaryField() = default;
  explicit BoundaryField(int num_neumann) : values(Eigen::VectorXd::Zero(num_neumann)) {}

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }

  static BoundaryField constant(const BoundaryTopology& topo, double c);
  static BoundaryField from_function(const TriMesh& mesh, const BoundaryTopology& topo,
                                     const ScalarFn& f);
};

// Vector values on the Neumann nodes, same alignment.
struct BoundaryVectorField {
  std::vector<Eigen::Vector2d> values;

  BoundaryVectorField() = default;
  explicit BoundaryVectorField(int num_neumann)
      : values(num_neumann, Eigen::Vector2d::Zero()) {}

  int size() const { return static_cast<int>(values.size()); }
};

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Assembled bilinear form plus the Dirichlet reduction. K_full is the
// unconstrained operator (used for energies and traction recovery); the
// factorization acts on the free dofs only. Dirichlet and Interface nodes are
// clamped to zero.
struct StiffnessSystem {
  const TriMesh* mesh = nullptr;
  const BoundaryTopology* topo = nullptr;
  ElasticMaterial material;
  SpMat K_full;
  std::vector<int> free_dofs;     // Cartesian dof ids kept in the reduced solve
  std::vector<int> full_to_free;  // dof id -> reduced index, or -1
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;  // of the reduced matrix
};

// Relative residual each linear solve must meet (checked, not assumed).
inline constexpr double kSolveRtol = 1e-10;

StiffnessSystem assemble_stiffness(const TriMesh& mesh, const BoundaryTopology& topo,
                                   const ElasticMaterial& material);

Eigen::VectorXd assemble_body_load(const TriMesh& mesh, const VectorFn& f);

// Load of z = h n on the Neumann boundary (lumped): node j receives w_j h_j n_j.
Eigen::VectorXd assemble_boundary_normal_load(const BoundaryTopology& topo,
                                              const BoundaryField& h);

// Load of a general boundary traction z: node j receives w_j z_j.
Eigen::VectorXd assemble_boundary_vector_load(const BoundaryTopology& topo,
                                              const BoundaryVectorField& z);

// Solve K u = load with Dirichlet dofs clamped to zero. Throws SolveError if
// the reduced residual exceeds kSolveRtol * ||load||.
VectorField solve_dirichlet_neumann(const StiffnessSystem& sys, const Eigen::VectorXd& load);

struct BoundaryTraction {
  BoundaryVectorField t;        // full traction vector per Neumann node
  BoundaryField sigma_n;        // t . normal
  BoundaryVectorField sigma_tau;  // t - (t.n) n
};

// Residual-based traction: t_j = (K_full u - body_load)_j / w_j at Neumann
// nodes. Consistent with the discrete problem: at an unconstrained dof this
// reproduces the applied boundary load exactly.
BoundaryTraction recover_boundary_traction(const StiffnessSystem& sys, const VectorField& u,
                                           const Eigen::VectorXd& body_load);

double energy_inner(const StiffnessSystem& sys, const VectorField& a, const VectorField& b);
double energy_norm(const StiffnessSystem& sys, const VectorField& a);

}  // namespace tresca
