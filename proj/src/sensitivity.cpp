#include "tresca/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tresca {

namespace {

VectorFn shifted(const VectorFn& base, const VectorFn& rate, double t) {
  if (!rate) return base;
  if (!base) return [rate, t](const Eigen::Vector2d& x) { return (t * rate(x)).eval(); };
  return [base, rate, t](const Eigen::Vector2d& x) { return (base(x) + t * rate(x)).eval(); };
}

BoundaryField shifted(const BoundaryField& base, const BoundaryField& rate, double t) {
  BoundaryField out = base;
  out.values += t * rate.values;
  return out;
}

}  // namespace

ConvergenceReport derivative_convergence(const TrescaProblemSpec& base,
                                         const PerturbationFamily& family,
                                         const std::vector<double>& ts,
                                         const StiffnessSystem& sys) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0))
      throw std::invalid_argument("derivative_convergence: quotients are one-sided, need t > 0");
    if (i > 0 && !(ts[i] < ts[i - 1]))
      throw std::invalid_argument("derivative_convergence: t list must be strictly decreasing");
  }
  const int nn = base.topo->num_neumann();
  if (family.hp.size() != nn || family.gp.size() != nn)
    throw std::invalid_argument("derivative_convergence: rate field sizes disagree");

  ConvergenceReport report;
  report.base = solve_tresca(base, sys);
  if (!report.base.converged)
    throw ConvergenceError("derivative_convergence: base solve did not converge");
  report.partition =
      compute_boundary_partition(*base.mesh, report.base, base.friction_bound, base.tol);

  TangentialSignoriniSpec dspec;
  dspec.body_force_rate = family.fp;
  dspec.normal_load_rate = family.hp;
  dspec.friction_rate = family.gp;
  dspec.partition = &report.partition;
  dspec.tol = base.tol;
  const TangentialSignoriniSolution der = solve_tangential_signorini(base, dspec, sys);
  if (!der.converged)
    throw ConvergenceError("derivative_convergence: derivative solve did not converge");
  report.derivative = der.u;
  report.deriv_norm = energy_norm(sys, der.u);

  for (double t : ts) {
    TrescaProblemSpec pert = base;
    pert.body_force = shifted(base.body_force, family.fp, t);
    pert.normal_load = shifted(base.normal_load, family.hp, t);
    pert.friction_bound = shifted(base.friction_bound, family.gp, t);
    for (int i = 0; i < nn; ++i)
      if (pert.friction_bound[i] < 0.0)
        throw std::invalid_argument("derivative_convergence: perturbed bound went negative");

    ConvergenceRow row;
    row.t = t;
    const TrescaSolution sol_t = solve_tresca(pert, sys);
    if (!sol_t.converged) {
      row.converged = false;
      row.err_rel = row.q_norm = row.du_norm = std::nan("");
      report.rows.push_back(row);
      report.complete = false;
      continue;
    }

    const VectorField q(Eigen::VectorXd((sol_t.u.dofs - report.base.u.dofs) / t));
    const VectorField diff(Eigen::VectorXd(q.dofs - report.derivative.dofs));
    row.q_norm = energy_norm(sys, q);
    row.du_norm = energy_norm(sys, VectorField(Eigen::VectorXd(sol_t.u.dofs - report.base.u.dofs)));
    row.err_rel = energy_norm(sys, diff) / std::max(report.deriv_norm, 1e-30);
    report.rows.push_back(row);

    // The list is decreasing, so the last converged row leaves the cone
    // residual evaluated at the smallest usable t.
    double worst = 0.0;
    for (int i = 0; i < nn; ++i) {
      if (report.partition.region[i] != Region::T) continue;
      const int v = base.topo->neumann_nodes[i];
      worst = std::max(worst, std::abs(q.at(v).dot(base.topo->tangent[v])));
    }
    report.t_cone_max = worst;
  }
  return report;
}

std::vector<GateauxRow> gateaux_check(const ControlProblem& problem, const StiffnessSystem& sys,
                                      const BoundaryField& z0, const BoundaryField& dir,
                                      const std::vector<double>& ts) {
  for (double t : ts)
    if (!(t > 0.0)) throw std::invalid_argument("gateaux_check: need t > 0");

  TrescaSolution sol0;
  const double J0 = cost_J(problem, sys, z0, &sol0);
  const BoundaryPartition part = compute_boundary_partition(
      *problem.mesh, sol0, friction_bound_of(problem, z0), problem.tol);
  const double dJ = gateaux_dJ(problem, sol0, part, z0, dir);

  std::vector<GateauxRow> rows;
  for (double t : ts) {
    BoundaryField z_t = z0;
    z_t.values += t * dir.values;
    const double J_t = cost_J(problem, sys, z_t, nullptr);
    GateauxRow row;
    row.t = t;
    row.fd = (J_t - J0) / t;
    row.dJ = dJ;
    row.rel_err = std::abs(row.fd - dJ) / std::max(std::abs(dJ), 1e-30);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tresca
