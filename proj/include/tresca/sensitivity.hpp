#pragma once

// Finite-difference verification of the derivative machinery: difference
// quotients of the friction solution along a linear data family against the
// tangential Signorini solution, and difference quotients of the control cost
// against its closed-form directional derivative.

#include "tresca/control.hpp"
#include "tresca/vi.hpp"

#include <vector>

namespace tresca {

// Linear data family: f_t = f + t fp, h_t = h + t hp, g_t = g + t gp.
struct PerturbationFamily {
  VectorFn fp;  // may be null (zero)
  BoundaryField hp;
  BoundaryField gp;
};

struct ConvergenceRow {
  double t;
  double err_rel;   // ||q_t - u'|| / max(||u'||, 1e-30), energy norm
  double q_norm;    // ||q_t||, q_t = (u_t - u_0)/t
  double du_norm;   // ||u_t - u_0||
  bool converged = true;  // false: the solve at this t hit its budget, values are NaN
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // in the order of the requested t values
  double deriv_norm = 0.0;           // ||u'|| energy norm
  VectorField derivative;            // tangential Signorini solution u'
  TrescaSolution base;               // friction solution at t = 0
  BoundaryPartition partition;
  double t_cone_max = 0.0;  // max over T nodes of |(q_t)_tau| at the smallest converged t
  bool complete = true;     // every row converged
};

// One-sided quotients; the t list must be positive and strictly decreasing.
// Throws std::invalid_argument on a bad t list and ConvergenceError if the
// base or derivative solve fails. A failed solve at an individual t does not
// abort the run: the row is kept with converged = false and NaN values, so a
// partial table is still reported.
ConvergenceReport derivative_convergence(const TrescaProblemSpec& base,
                                         const PerturbationFamily& family,
                                         const std::vector<double>& ts,
                                         const StiffnessSystem& sys);

struct GateauxRow {
  double t;
  double fd;       // (J(z0 + t dir) - J(z0)) / t
  double dJ;       // closed-form directional derivative at z0
  double rel_err;  // |fd - dJ| / max(|dJ|, 1e-30)
};

std::vector<GateauxRow> gateaux_check(const ControlProblem& problem, const StiffnessSystem& sys,
                                      const BoundaryField& z0, const BoundaryField& dir,
                                      const std::vector<double>& ts);

}  // namespace tresca
