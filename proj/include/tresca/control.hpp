#pragma once

// Projected-gradient optimal control of the friction bound. The control z
// lives on the Neumann nodes inside the box [-1, 1] and sets the bound
// l(z) = g1 + z g2. The cost couples the elastic energy of the friction
// solution with the L2 weight of the bound; its directional derivative has a
// closed form on the R/T/S partition, no adjoint solve involved.

#include "tresca/vi.hpp"

#include <vector>

namespace tresca {

struct ControlProblem {
  const TriMesh* mesh = nullptr;
  const BoundaryTopology* topo = nullptr;
  ElasticMaterial material;
  VectorFn body_force;        // f, fixed
  BoundaryField normal_load;  // h, fixed
  BoundaryField g1, g2;       // friction bound l(z) = g1 + z * g2 (pointwise)
  double beta = 1.0;          // weight of the L2 term of the cost
  TrescaTolerances tol;
};

struct ControlConfig {
  double eta = -1.0;             // step size; <0 means 1/(beta * max g1^2)
  int max_iters = 400;
  double stop_threshold = -1.0;  // <0 means 1e-6 * J(z0)
  int stop_window = 20;          // cost compared every stop_window iterations
  double box_lo = -1.0, box_hi = 1.0;
};

BoundaryField friction_bound_of(const ControlProblem& problem, const BoundaryField& z);

struct CostBreakdown {
  double compliance = 0.0;  // 1/2 ||u||_E^2
  double penalty = 0.0;     // beta/2 sum_j l_j^2 w_j
};

// J(z) = 1/2 ||u(l(z))||_E^2 + beta/2 sum_j l_j^2 w_j. Optionally returns the
// friction solution it computed and the two cost terms.
double cost_J(const ControlProblem& problem, const StiffnessSystem& sys,
              const BoundaryField& z, TrescaSolution* solution_out = nullptr,
              CostBreakdown* breakdown_out = nullptr);

// Directional derivative of J at z0 in direction dir, from the closed form on
// the partition of the solution at z0 (lumped):
//   sum_R dir g2 (beta l0 - |u_tau|) w_j + sum_{T,S} beta dir g2 l0 w_j.
double gateaux_dJ(const ControlProblem& problem, const TrescaSolution& at_z0,
                  const BoundaryPartition& partition, const BoundaryField& z0,
                  const BoundaryField& dir);

// The direction that makes gateaux_dJ a negative sum of squares:
//   -g2 (beta l0 - |u_tau|) on R,  -beta g2 l0 on T and S.
BoundaryField descent_direction(const ControlProblem& problem, const TrescaSolution& at_z0,
                                const BoundaryPartition& partition, const BoundaryField& z0);

BoundaryField project_U(const BoundaryField& z, double lo = -1.0, double hi = 1.0);

struct ControlHistoryRow {
  int iter = 0;            // 0 is the initial control
  double J = 0.0;
  double compliance = 0.0;
  double penalty = 0.0;
  int switches = 0;  // active-set iterations of the friction solve at this iterate
  double dJ_descent = 0.0;  // gateaux_dJ along the descent direction here, always <= 0
};

struct ControlResult {
  BoundaryField z;
  std::vector<double> cost_history;       // J at every iterate, including z0
  std::vector<ControlHistoryRow> history;  // same iterates with the cost split out
  int iterations = 0;
  bool stopped_by_window = false;  // false: hit max_iters
  TrescaSolution final_solution;
  BoundaryPartition final_partition;
};

// Projected gradient loop: z <- proj_U(z + eta * descent), partition recomputed
// from a fresh friction solve every iteration; stops when the cost moved less
// than stop_threshold over the last stop_window iterations. Requires an
// admissible bound family, min g1 > max |g2|, so l(z) stays positive on the
// whole box; throws std::invalid_argument otherwise. A friction solve that
// exhausts its budget raises ConvergenceError naming the iteration.
ControlResult optimize(const ControlProblem& problem, const StiffnessSystem& sys,
                       const BoundaryField& z0, const ControlConfig& config);

}  // namespace tresca
