#include "tresca/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tresca {

namespace {

void check_control(const ControlProblem& p, const BoundaryField& z) {
  const int nn = p.topo->num_neumann();
  if (p.g1.size() != nn || p.g2.size() != nn || p.normal_load.size() != nn)
    throw std::invalid_argument("control: boundary field sizes disagree");
  if (z.size() != nn) throw std::invalid_argument("control: control field size disagrees");
  if (!(p.beta > 0.0)) throw std::invalid_argument("control: beta must be positive");
}

}  // namespace

BoundaryField friction_bound_of(const ControlProblem& problem, const BoundaryField& z) {
  check_control(problem, z);
  BoundaryField l(problem.topo->num_neumann());
  for (int i = 0; i < l.size(); ++i) l[i] = problem.g1[i] + z[i] * problem.g2[i];
  return l;
}

double cost_J(const ControlProblem& problem, const StiffnessSystem& sys, const BoundaryField& z,
              TrescaSolution* solution_out, CostBreakdown* breakdown_out) {
  const BoundaryField l = friction_bound_of(problem, z);

  TrescaProblemSpec friction;
  friction.mesh = problem.mesh;
  friction.topo = problem.topo;
  friction.material = problem.material;
  friction.body_force = problem.body_force;
  friction.normal_load = problem.normal_load;
  friction.friction_bound = l;
  friction.tol = problem.tol;

  TrescaSolution sol = solve_tresca(friction, sys);
  if (!sol.converged) throw ConvergenceError("cost_J: friction solve did not converge");

  double bound_term = 0.0;
  for (int i = 0; i < l.size(); ++i)
    bound_term += l[i] * l[i] * problem.topo->node_weight[problem.topo->neumann_nodes[i]];
  CostBreakdown parts;
  parts.compliance = 0.5 * energy_inner(sys, sol.u, sol.u);
  parts.penalty = 0.5 * problem.beta * bound_term;
  if (breakdown_out) *breakdown_out = parts;
  if (solution_out) *solution_out = std::move(sol);
  return parts.compliance + parts.penalty;
}

double gateaux_dJ(const ControlProblem& problem, const TrescaSolution& at_z0,
                  const BoundaryPartition& partition, const BoundaryField& z0,
                  const BoundaryField& dir) {
  check_control(problem, z0);
  if (dir.size() != z0.size()) throw std::invalid_argument("gateaux_dJ: direction size disagrees");

  double value = 0.0;
  for (int i = 0; i < z0.size(); ++i) {
    const double w = problem.topo->node_weight[problem.topo->neumann_nodes[i]];
    const double l0 = problem.g1[i] + z0[i] * problem.g2[i];
    if (partition.region[i] == Region::R)
      value += dir[i] * problem.g2[i] * (problem.beta * l0 - std::abs(at_z0.u_tau[i])) * w;
    else
      value += problem.beta * dir[i] * problem.g2[i] * l0 * w;
  }
  return value;
}

BoundaryField descent_direction(const ControlProblem& problem, const TrescaSolution& at_z0,
                                const BoundaryPartition& partition, const BoundaryField& z0) {
  check_control(problem, z0);
  BoundaryField zd(z0.size());
  for (int i = 0; i < z0.size(); ++i) {
    const double l0 = problem.g1[i] + z0[i] * problem.g2[i];
    if (partition.region[i] == Region::R)
      zd[i] = -problem.g2[i] * (problem.beta * l0 - std::abs(at_z0.u_tau[i]));
    else
      zd[i] = -problem.beta * problem.g2[i] * l0;
  }
  return zd;
}

BoundaryField project_U(const BoundaryField& z, double lo, double hi) {
  BoundaryField out = z;
  for (int i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo, hi);
  return out;
}

ControlResult optimize(const ControlProblem& problem, const StiffnessSystem& sys,
                       const BoundaryField& z0, const ControlConfig& config) {
  check_control(problem, z0);
  if (config.stop_window < 1 || config.max_iters < 1)
    throw std::invalid_argument("optimize: bad iteration limits");

  // The bound l(z) = g1 + z g2 must stay positive over the whole box, which is
  // the smallness condition min g1 > max |g2|. Checking it once here covers
  // every iterate the projection can produce.
  double g1_min = std::numeric_limits<double>::infinity();
  double g2_max = 0.0;
  for (int i = 0; i < problem.g1.size(); ++i) {
    g1_min = std::min(g1_min, problem.g1[i]);
    g2_max = std::max(g2_max, std::abs(problem.g2[i]));
  }
  const double box_reach = std::max(std::abs(config.box_lo), std::abs(config.box_hi));
  if (!(g1_min > 0.0) || !(g1_min > g2_max * box_reach))
    throw std::invalid_argument("optimize: need min g1 > max |g2| so the bound stays positive");

  double eta = config.eta;
  if (eta < 0.0) {
    double g1_max_sq = 0.0;
    for (int i = 0; i < problem.g1.size(); ++i)
      g1_max_sq = std::max(g1_max_sq, problem.g1[i] * problem.g1[i]);
    eta = 1.0 / (problem.beta * g1_max_sq);
  }

  ControlResult res;
  res.z = project_U(z0, config.box_lo, config.box_hi);

  const auto evaluate = [&](int iter) {
    CostBreakdown parts;
    double J;
    try {
      J = cost_J(problem, sys, res.z, &res.final_solution, &parts);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("optimize: iteration " + std::to_string(iter) + ": " +
                             std::string(e.what()));
    }
    res.final_partition = compute_boundary_partition(
        *problem.mesh, res.final_solution, friction_bound_of(problem, res.z), problem.tol);
    res.cost_history.push_back(J);
    ControlHistoryRow row;
    row.iter = iter;
    row.J = J;
    row.compliance = parts.compliance;
    row.penalty = parts.penalty;
    row.switches = res.final_solution.outer_iters;
    const BoundaryField zd =
        descent_direction(problem, res.final_solution, res.final_partition, res.z);
    row.dJ_descent = gateaux_dJ(problem, res.final_solution, res.final_partition, res.z, zd);
    res.history.push_back(row);
    return J;
  };

  double J = evaluate(0);
  const double threshold = config.stop_threshold >= 0.0 ? config.stop_threshold : 1e-6 * J;
  double window_J = J;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    const BoundaryField zd =
        descent_direction(problem, res.final_solution, res.final_partition, res.z);
    BoundaryField z_next(res.z.size());
    for (int i = 0; i < res.z.size(); ++i) z_next[i] = res.z[i] + eta * zd[i];
    res.z = project_U(z_next, config.box_lo, config.box_hi);

    J = evaluate(iter);
    res.iterations = iter;

    if (iter % config.stop_window == 0) {
      if (std::abs(J - window_J) < threshold) {
        res.stopped_by_window = true;
        break;
      }
      window_J = J;
    }
  }
  return res;
}

}  // namespace tresca
