#pragma once

// Boundary variational inequality solvers built on the elasticity core:
//
//  * the friction problem with a pointwise bound g on the tangential traction
//    (solved by iterative stick/slip switching),
//  * the induced R/T/S partition of the Neumann boundary (slipping, strictly
//    sticking, borderline),
//  * the tangential Signorini problem on that partition, which characterizes
//    the derivative of the friction solution with respect to the data,
//  * a posteriori residuals of the friction law and of the governing weak
//    inequality.

#include "tresca/assembly.hpp"

#include <cstdint>
#include <vector>

namespace tresca {

struct TrescaTolerances {
  double tol_slip = -1.0;     // R-detection: |u_tau| > tol_slip; <0 means 1e-8 * mesh diameter
  double tol_rev = -1.0;      // slip reversal: u_tau.d < -tol_rev; <0 means 1e-12 * mesh diameter
  double tol_switch = 1e-10;  // stick release: |sigma_tau| > g (1 + tol_switch)
  double tol_law = 1e-6;      // verification tolerance for the friction law
  double tol_crit = 1e-3;     // borderline-stick detection: |sigma_tau| >= (1 - tol_crit) g
  int max_outer = 200;

  double slip_tol(const TriMesh& mesh) const;
  double reversal_tol(const TriMesh& mesh) const;
};

enum class ContactState : std::uint8_t { Stick, Slip };

struct TrescaProblemSpec {
  const TriMesh* mesh = nullptr;
  const BoundaryTopology* topo = nullptr;
  ElasticMaterial material;
  VectorFn body_force;           // may be null (zero)
  BoundaryField normal_load;     // h, applied as h n on the Neumann boundary
  BoundaryField friction_bound;  // g >= 0; g_j = 0 frees the node tangentially
  TrescaTolerances tol;
};

struct TrescaSolution {
  VectorField u;
  std::vector<ContactState> state;  // per Neumann node
  std::vector<double> u_tau;        // u . tangent
  std::vector<double> sigma_tau;    // recovered tangential traction, t . tangent
  BoundaryField sigma_n;            // recovered normal traction
  Eigen::VectorXd body_load;        // assembled body load (reused by residual checks)
  int outer_iters = 0;
  bool converged = false;
  int frozen_nodes = 0;  // nodes parked by the anti-cycling rule at exit
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative switching solve. The system must be assembled on the same mesh,
// topology and material as the problem spec. If the active set still changes
// after tol.max_outer iterations the result carries converged = false; callers
// that need a converged solution raise ConvergenceError themselves.
TrescaSolution solve_tresca(const TrescaProblemSpec& problem, const StiffnessSystem& sys);
TrescaSolution solve_tresca(const TrescaProblemSpec& problem);  // assembles internally

enum class Region : std::uint8_t { R, T, S };

// Per-Neumann-node partition of the friction solution. Directions are stored
// as signs times the node tangent so that unit slip directions are exact.
struct BoundaryPartition {
  std::vector<Region> region;
  std::vector<double> slip_sign;  // R: sign(u_tau), else 0
  std::vector<double> ray_sign;   // S: sign(sigma_tau), else 0
  std::vector<double> k;          // R: g/|u_tau| capped at kSlipStiffnessCap, else 0
  int count_R = 0, count_T = 0, count_S = 0;
};

inline constexpr double kSlipStiffnessCap = 1e12;

BoundaryPartition compute_boundary_partition(const TriMesh& mesh, const TrescaSolution& sol,
                                             const BoundaryField& g,
                                             const TrescaTolerances& tol);

// Data of the tangential Signorini problem on a fixed partition. For the
// derivative of the friction solution: rates (fp, hp, gp) of the data family,
// slip directions and stiffness k taken from the base partition.
//
// slip_dir_scale generalizes the R-side direction to v = scale * tangent with
// |scale| <= 1; when empty it defaults to the partition's slip_sign (the
// derivative instantiation, |scale| = 1, where the quadratic slip term
// vanishes identically in 2D).
struct TangentialSignoriniSpec {
  VectorFn body_force_rate;       // f', may be null
  BoundaryField normal_load_rate; // h'
  BoundaryField friction_rate;    // g'
  const BoundaryPartition* partition = nullptr;
  std::vector<double> slip_dir_scale;  // optional, per Neumann node
  TrescaTolerances tol;
};

struct TangentialSignoriniSolution {
  VectorField u;
  std::vector<std::uint8_t> s_blocked;  // per Neumann node: 1 if an S node is pinned at zero
  std::vector<double> u_tau;
  std::vector<double> sigma_tau;  // recovered, includes reaction at pinned nodes
  Eigen::VectorXd body_load;
  int outer_iters = 0;
  bool converged = false;
};

TangentialSignoriniSolution solve_tangential_signorini(const TrescaProblemSpec& base,
                                                       const TangentialSignoriniSpec& spec,
                                                       const StiffnessSystem& sys);

// Scaled a posteriori residuals of a friction solution. law_max and comp_max
// are maxima over Neumann nodes; vi_gap_min is the most negative value of
//   <u, w-u> + sum g|w_tau| w_j - sum g|u_tau| w_j - (f, w-u) - sum h (w-u).n w_j
// over num_samples random discrete test fields (negative values violate the
// governing weak inequality). Each residual is reported relative to its scale.
struct TrescaResiduals {
  double law_max = 0.0;     // max(0, |sigma_tau| - g) / max g
  double comp_max = 0.0;    // |u_tau sigma_tau + g |u_tau|| / (g max(|u_tau|, h_mesh))
  double vi_gap_min = 0.0;  // most negative sampled gap / its scale
};

TrescaResiduals tresca_residuals(const TrescaProblemSpec& problem, const StiffnessSystem& sys,
                                 const TrescaSolution& sol, int num_samples,
                                 std::uint64_t seed);

}  // namespace tresca
