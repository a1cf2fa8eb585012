#include "tresca/vi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace tresca {

double TrescaTolerances::slip_tol(const TriMesh& mesh) const {
  return tol_slip >= 0.0 ? tol_slip : 1e-8 * mesh.diameter();
}

double TrescaTolerances::reversal_tol(const TriMesh& mesh) const {
  return tol_rev >= 0.0 ? tol_rev : 1e-12 * mesh.diameter();
}

namespace {

// Change of basis that swaps the Cartesian dof pair of every Neumann node for
// (normal, tangential) components. Columns of the node block are [n | t], so
// K_rot = T^T K T and u = T u_rot. Orthogonal, hence energies are preserved.
struct RotatedOperator {
  SpMat T;
  SpMat K_rot;
};

RotatedOperator make_rotated(const StiffnessSystem& sys) {
  const BoundaryTopology& topo = *sys.topo;
  const int ndof = static_cast<int>(sys.K_full.rows());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(ndof) + 2 * topo.neumann_nodes.size());
  std::vector<bool> rotated(ndof / 2, false);
  for (int v : topo.neumann_nodes) rotated[v] = true;
  for (int v = 0; v < ndof / 2; ++v) {
    if (!rotated[v]) {
      trips.emplace_back(2 * v, 2 * v, 1.0);
      trips.emplace_back(2 * v + 1, 2 * v + 1, 1.0);
      continue;
    }
    const Eigen::Vector2d n = topo.normal[v], t = topo.tangent[v];
    trips.emplace_back(2 * v, 2 * v, n.x());
    trips.emplace_back(2 * v + 1, 2 * v, n.y());
    trips.emplace_back(2 * v, 2 * v + 1, t.x());
    trips.emplace_back(2 * v + 1, 2 * v + 1, t.y());
  }

  RotatedOperator rot;
  rot.T.resize(ndof, ndof);
  rot.T.setFromTriplets(trips.begin(), trips.end());
  rot.K_rot = SpMat(rot.T.transpose() * sys.K_full * rot.T).pruned();
  return rot;
}

struct ActiveSolve {
  VectorField u;          // Cartesian
  Eigen::VectorXd u_rot;  // rotated dofs, full length
};

// Solve with the tangential dof of selected Neumann nodes pinned to zero and
// optional nonnegative springs on the remaining tangential dofs. tang_fixed
// and tang_spring are indexed by Neumann slot; load is the Cartesian full-size
// load vector.
ActiveSolve solve_active(const StiffnessSystem& sys, const RotatedOperator& rot,
                         const std::vector<char>& tang_fixed,
                         const std::vector<double>& tang_spring, const Eigen::VectorXd& load) {
  const BoundaryTopology& topo = *sys.topo;
  const int ndof = static_cast<int>(sys.K_full.rows());

  std::vector<int> full_to_red(ndof, -1);
  std::vector<int> red_to_full;
  red_to_full.reserve(ndof);
  for (int v = 0; v < ndof / 2; ++v) {
    const NodeClass c = topo.node_class[v];
    if (c == NodeClass::Dirichlet || c == NodeClass::Interface) continue;
    const int slot = topo.neumann_index[v];
    const bool keep_tang = slot < 0 || !tang_fixed[slot];
    for (int d = 0; d < 2; ++d) {
      if (d == 1 && !keep_tang) continue;
      full_to_red[2 * v + d] = static_cast<int>(red_to_full.size());
      red_to_full.push_back(2 * v + d);
    }
  }
  const int nred = static_cast<int>(red_to_full.size());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(rot.K_rot.nonZeros()));
  for (int col = 0; col < rot.K_rot.outerSize(); ++col)
    for (SpMat::InnerIterator it(rot.K_rot, col); it; ++it) {
      const int i = full_to_red[it.row()], j = full_to_red[it.col()];
      if (i >= 0 && j >= 0) trips.emplace_back(i, j, it.value());
    }
  for (size_t slot = 0; slot < tang_spring.size(); ++slot) {
    if (tang_spring[slot] == 0.0) continue;
    const int dof = 2 * topo.neumann_nodes[slot] + 1;
    if (full_to_red[dof] >= 0)
      trips.emplace_back(full_to_red[dof], full_to_red[dof], tang_spring[slot]);
  }

  SpMat K_red(nred, nred);
  K_red.setFromTriplets(trips.begin(), trips.end());

  const Eigen::VectorXd load_rot = rot.T.transpose() * load;
  Eigen::VectorXd b(nred);
  for (int i = 0; i < nred; ++i) b[i] = load_rot[red_to_full[i]];

  Eigen::SimplicialLDLT<SpMat> ldlt(K_red);
  if (ldlt.info() != Eigen::Success)
    throw SolveError("boundary VI solve: factorization failed");
  const Eigen::VectorXd x = ldlt.solve(b);
  if ((K_red * x - b).norm() > kSolveRtol * std::max(b.norm(), 1e-300))
    throw SolveError("boundary VI solve: residual exceeds tolerance");

  ActiveSolve out;
  out.u_rot = Eigen::VectorXd::Zero(ndof);
  for (int i = 0; i < nred; ++i) out.u_rot[red_to_full[i]] = x[i];
  out.u = VectorField(Eigen::VectorXd(rot.T * out.u_rot));
  return out;
}

// Tangential traction at every Neumann node: (K u - body load) has the
// boundary virtual work on Neumann dofs, so dividing the rotated tangential
// component by the node weight recovers sigma_tau pointwise.
std::vector<double> tangential_traction(const StiffnessSystem& sys, const RotatedOperator& rot,
                                        const VectorField& u, const Eigen::VectorXd& body_load) {
  const BoundaryTopology& topo = *sys.topo;
  const Eigen::VectorXd r = rot.T.transpose() * Eigen::VectorXd(sys.K_full * u.dofs - body_load);
  std::vector<double> sig(topo.num_neumann());
  for (int i = 0; i < topo.num_neumann(); ++i)
    sig[i] = r[2 * topo.neumann_nodes[i] + 1] / topo.node_weight[topo.neumann_nodes[i]];
  return sig;
}

double sign_or_plus(double v) { return v < 0.0 ? -1.0 : 1.0; }

void check_problem(const TrescaProblemSpec& p, const StiffnessSystem& sys) {
  if (!p.mesh || !p.topo || sys.mesh != p.mesh || sys.topo != p.topo)
    throw std::invalid_argument("friction solve: problem and system disagree");
  const int nn = p.topo->num_neumann();
  if (p.normal_load.size() != nn || p.friction_bound.size() != nn)
    throw std::invalid_argument("friction solve: boundary field sizes disagree");
  for (int i = 0; i < nn; ++i)
    if (!(p.friction_bound[i] >= 0.0))
      throw std::invalid_argument("friction solve: friction bound must be >= 0");
}

}  // namespace

TrescaSolution solve_tresca(const TrescaProblemSpec& problem, const StiffnessSystem& sys) {
  check_problem(problem, sys);
  const TriMesh& mesh = *problem.mesh;
  const BoundaryTopology& topo = *problem.topo;
  const int nn = topo.num_neumann();
  const BoundaryField& g = problem.friction_bound;

  const RotatedOperator rot = make_rotated(sys);
  const Eigen::VectorXd b_body = assemble_body_load(mesh, problem.body_force);
  const Eigen::VectorXd b_fixed = b_body + assemble_boundary_normal_load(topo, problem.normal_load);

  const std::vector<char> none_fixed(nn, 0);
  const std::vector<double> no_springs(nn, 0.0);

  // Frictionless pass fixes the initial slip directions.
  const ActiveSolve frictionless = solve_active(sys, rot, none_fixed, no_springs, b_fixed);
  std::vector<double> d(nn);  // slip direction sign: slip displacement along d * tangent
  for (int i = 0; i < nn; ++i) d[i] = sign_or_plus(frictionless.u_rot[2 * topo.neumann_nodes[i] + 1]);

  std::vector<ContactState> state(nn, ContactState::Slip);
  const double tol_rev = problem.tol.reversal_tol(mesh);

  // Anti-cycling: a node that completed two full stick/slip round trips is
  // parked as stick for a few iterations; a repeat offender is parked for good.
  std::vector<int> to_stick(nn, 0), to_slip(nn, 0), frozen_until(nn, -1);
  std::vector<char> froze_once(nn, 0);
  int frozen_permanently = 0;

  TrescaSolution sol;
  sol.body_load = b_body;
  sol.state.assign(nn, ContactState::Slip);

  ActiveSolve current;
  Eigen::VectorXd load;
  for (int outer = 1; outer <= problem.tol.max_outer; ++outer) {
    BoundaryVectorField slip_load(nn);
    std::vector<char> fixed(nn, 0);
    for (int i = 0; i < nn; ++i) {
      if (state[i] == ContactState::Stick)
        fixed[i] = 1;
      else
        slip_load.values[i] = -g[i] * d[i] * topo.tangent[topo.neumann_nodes[i]];
    }
    load = b_fixed + assemble_boundary_vector_load(topo, slip_load);
    current = solve_active(sys, rot, fixed, no_springs, load);
    sol.state = state;  // the set this solve used; switches below shape the next one
    const std::vector<double> sig = tangential_traction(sys, rot, current.u, b_body);

    int switches = 0;
    for (int i = 0; i < nn; ++i) {
      if (g[i] == 0.0) continue;           // permanently traction-free
      if (outer <= frozen_until[i]) continue;
      if (state[i] == ContactState::Slip) {
        const double ut = current.u_rot[2 * topo.neumann_nodes[i] + 1];
        if (ut * d[i] < -tol_rev) {
          state[i] = ContactState::Stick;
          ++to_stick[i];
          ++switches;
        }
      } else if (std::abs(sig[i]) > g[i] * (1.0 + problem.tol.tol_switch)) {
        state[i] = ContactState::Slip;
        d[i] = -sign_or_plus(sig[i]);  // released node slides against the held reaction
        ++to_slip[i];
        ++switches;
      }
      if (to_stick[i] >= 2 && to_slip[i] >= 2) {
        if (state[i] != ContactState::Stick) {
          state[i] = ContactState::Stick;
          ++switches;
        }
        if (froze_once[i]) {
          frozen_until[i] = std::numeric_limits<int>::max();
          ++frozen_permanently;
        } else {
          frozen_until[i] = outer + 5;
          froze_once[i] = 1;
        }
        to_stick[i] = to_slip[i] = 0;
      }
    }

    sol.outer_iters = outer;
    if (switches == 0) {
      sol.converged = true;
      break;
    }
  }

  const std::vector<double> sig = tangential_traction(sys, rot, current.u, b_body);
  const BoundaryTraction tr = recover_boundary_traction(sys, current.u, b_body);
  sol.u = current.u;
  sol.frozen_nodes = frozen_permanently;
  sol.u_tau.resize(nn);
  sol.sigma_tau = sig;
  sol.sigma_n = tr.sigma_n;
  for (int i = 0; i < nn; ++i) sol.u_tau[i] = current.u_rot[2 * topo.neumann_nodes[i] + 1];
  return sol;
}

TrescaSolution solve_tresca(const TrescaProblemSpec& problem) {
  const StiffnessSystem sys =
      assemble_stiffness(*problem.mesh, *problem.topo, problem.material);
  return solve_tresca(problem, sys);
}

BoundaryPartition compute_boundary_partition(const TriMesh& mesh, const TrescaSolution& sol,
                                             const BoundaryField& g,
                                             const TrescaTolerances& tol) {
  const int nn = static_cast<int>(sol.u_tau.size());
  const double tol_slip = tol.slip_tol(mesh);

  BoundaryPartition part;
  part.region.assign(nn, Region::T);
  part.slip_sign.assign(nn, 0.0);
  part.ray_sign.assign(nn, 0.0);
  part.k.assign(nn, 0.0);
  for (int i = 0; i < nn; ++i) {
    if (std::abs(sol.u_tau[i]) > tol_slip) {
      part.region[i] = Region::R;
      part.slip_sign[i] = sign_or_plus(sol.u_tau[i]);
      part.k[i] = std::min(g[i] / std::abs(sol.u_tau[i]), kSlipStiffnessCap);
      ++part.count_R;
    } else if (g[i] > 0.0 && std::abs(sol.sigma_tau[i]) >= (1.0 - tol.tol_crit) * g[i]) {
      part.region[i] = Region::S;
      part.ray_sign[i] = sign_or_plus(sol.sigma_tau[i]);
      ++part.count_S;
    } else {
      ++part.count_T;
    }
  }
  return part;
}

TangentialSignoriniSolution solve_tangential_signorini(const TrescaProblemSpec& base,
                                                       const TangentialSignoriniSpec& spec,
                                                       const StiffnessSystem& sys) {
  check_problem(base, sys);
  const TriMesh& mesh = *base.mesh;
  const BoundaryTopology& topo = *base.topo;
  const int nn = topo.num_neumann();
  const BoundaryPartition& part = *spec.partition;
  if (static_cast<int>(part.region.size()) != nn ||
      spec.normal_load_rate.size() != nn || spec.friction_rate.size() != nn)
    throw std::invalid_argument("derivative solve: field sizes disagree with partition");
  if (!spec.slip_dir_scale.empty() && static_cast<int>(spec.slip_dir_scale.size()) != nn)
    throw std::invalid_argument("derivative solve: slip_dir_scale size mismatch");

  const RotatedOperator rot = make_rotated(sys);
  const Eigen::VectorXd b_body = assemble_body_load(mesh, spec.body_force_rate);

  // Tangential boundary data: on R the rate -gp acts along v = scale * tangent
  // together with the slip spring k (1 - scale^2); on S the rate +gp acts along
  // the ray direction. With |scale| = 1 (the derivative instantiation) the
  // spring vanishes identically, 2D tangent spaces being one-dimensional.
  BoundaryVectorField tang_load(nn);
  std::vector<double> springs(nn, 0.0);
  for (int i = 0; i < nn; ++i) {
    const int v = topo.neumann_nodes[i];
    if (part.region[i] == Region::R) {
      const double scale = spec.slip_dir_scale.empty() ? part.slip_sign[i] : spec.slip_dir_scale[i];
      if (std::abs(scale) > 1.0)
        throw std::invalid_argument("derivative solve: slip direction scale must be in [-1,1]");
      tang_load.values[i] = -spec.friction_rate[i] * scale * topo.tangent[v];
      springs[i] = part.k[i] * (1.0 - scale * scale) * topo.node_weight[v];
      if (std::abs(scale) == 1.0 && springs[i] != 0.0)
        throw std::logic_error("derivative solve: slip spring must vanish for unit directions");
    } else if (part.region[i] == Region::S) {
      tang_load.values[i] = spec.friction_rate[i] * part.ray_sign[i] * topo.tangent[v];
    }
  }

  const Eigen::VectorXd load = b_body +
                               assemble_boundary_normal_load(topo, spec.normal_load_rate) +
                               assemble_boundary_vector_load(topo, tang_load);

  // Active set over the S nodes: pinned at zero (feasible start) or free along
  // the admissible ray. T nodes stay pinned throughout.
  std::vector<char> blocked(nn, 0);
  for (int i = 0; i < nn; ++i) blocked[i] = part.region[i] != Region::R ? 1 : 0;

  TangentialSignoriniSolution out;
  out.body_load = b_body;
  const double tol_rev = base.tol.reversal_tol(mesh);

  ActiveSolve current;
  for (int outer = 1; outer <= base.tol.max_outer; ++outer) {
    current = solve_active(sys, rot, blocked, springs, load);
    const std::vector<double> sig = tangential_traction(sys, rot, current.u, b_body);

    int switches = 0;
    for (int i = 0; i < nn; ++i) {
      if (part.region[i] != Region::S) continue;
      const double gp = spec.friction_rate[i];
      const double ray = part.ray_sign[i];
      if (blocked[i]) {
        // Multiplier condition: (sigma_tau - gp * ray) . ray <= 0.
        if (sig[i] * ray > gp + base.tol.tol_switch * (1.0 + std::abs(gp))) {
          blocked[i] = 0;
          ++switches;
        }
      } else {
        const double ut = current.u_rot[2 * topo.neumann_nodes[i] + 1];
        if (ut * ray > tol_rev) {  // left the admissible ray
          blocked[i] = 1;
          ++switches;
        }
      }
    }
    out.outer_iters = outer;
    if (switches == 0) {
      out.converged = true;
      break;
    }
  }

  const std::vector<double> sig = tangential_traction(sys, rot, current.u, b_body);
  out.u = current.u;
  out.s_blocked.assign(nn, 0);
  out.u_tau.resize(nn);
  out.sigma_tau = sig;
  for (int i = 0; i < nn; ++i) {
    out.s_blocked[i] = part.region[i] == Region::S && blocked[i] ? 1 : 0;
    out.u_tau[i] = current.u_rot[2 * topo.neumann_nodes[i] + 1];
  }
  return out;
}

TrescaResiduals tresca_residuals(const TrescaProblemSpec& problem, const StiffnessSystem& sys,
                                 const TrescaSolution& sol, int num_samples, std::uint64_t seed) {
  const BoundaryTopology& topo = *problem.topo;
  const TriMesh& mesh = *problem.mesh;
  const int nn = topo.num_neumann();
  const BoundaryField& g = problem.friction_bound;

  double g_max = 0.0;
  for (int i = 0; i < nn; ++i) g_max = std::max(g_max, g[i]);
  const double g_scale = g_max > 0.0 ? g_max : 1.0;

  double edge_total = 0.0;
  for (const auto& e : mesh.boundary_edges)
    edge_total += (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
  const double h_mesh = edge_total / static_cast<double>(mesh.boundary_edges.size());

  TrescaResiduals res;
  for (int i = 0; i < nn; ++i) {
    res.law_max = std::max(res.law_max, std::max(0.0, std::abs(sol.sigma_tau[i]) - g[i]) / g_scale);
    if (g[i] > 0.0) {
      const double comp = std::abs(sol.u_tau[i] * sol.sigma_tau[i] + g[i] * std::abs(sol.u_tau[i]));
      res.comp_max = std::max(res.comp_max, comp / (g[i] * std::max(std::abs(sol.u_tau[i]), h_mesh)));
    }
  }

  // Sampled weak inequality: for the converged solution and any test field w,
  //   <u, w-u> + Phi(w) - Phi(u) - L(w-u) >= 0
  // with Phi the lumped friction weight and L the body plus normal loads.
  const Eigen::VectorXd b =
      sol.body_load + assemble_boundary_normal_load(topo, problem.normal_load);
  const auto phi = [&](const VectorField& w) {
    double s = 0.0;
    for (int i = 0; i < nn; ++i) {
      const int v = topo.neumann_nodes[i];
      s += g[i] * topo.node_weight[v] * std::abs(w.at(v).dot(topo.tangent[v]));
    }
    return s;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double phi_u = phi(sol.u);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < num_samples; ++s) {
    VectorField w(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const NodeClass c = topo.node_class[v];
      const bool fixed = c == NodeClass::Dirichlet || c == NodeClass::Interface;
      w.set(v, fixed ? Eigen::Vector2d::Zero() : Eigen::Vector2d(unif(rng), unif(rng)));
    }
    const Eigen::VectorXd diff = w.dofs - sol.u.dofs;
    const double a_term = sol.u.dofs.dot(sys.K_full * diff);
    const double phi_w = phi(w);
    const double l_term = b.dot(diff);
    const double gap = a_term + phi_w - phi_u - l_term;
    const double scale = std::abs(a_term) + phi_w + phi_u + std::abs(l_term) + 1e-300;
    worst = std::min(worst, gap / scale);
  }
  res.vi_gap_min = num_samples > 0 ? worst : 0.0;
  return res;
}

}  // namespace tresca
