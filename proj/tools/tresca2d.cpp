// Command-line front end: mesh generation, the frictionless and friction
// solvers, the derivative problem, finite-difference verification harnesses,
// and the projected-gradient control loop. Every run writes its artifacts into
// --out and is deterministic for a fixed config and seed.
//
// Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
// 4 output I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tresca/control.hpp"
#include "tresca/io.hpp"
#include "tresca/mesh.hpp"
#include "tresca/registry.hpp"
#include "tresca/sensitivity.hpp"
#include "tresca/vi.hpp"

namespace {

using nlohmann::ordered_json;
using namespace tresca;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every solver-backed command.
struct CommonOptions {
  std::string out_dir;
  std::string config_path;
  std::string mesh_path;  // empty: generate a disk
  int n_boundary = 64;
  double arc_begin = 0.0;
  double arc_end = 1.5707963267948966;
  std::uint64_t seed = 20260816;

  std::string f = "paper-f";
  std::string h = "paper-h";
  std::string g1 = "paper-g1";
  std::string g2 = "paper-g2";
  std::string z = "paper-z0";

  TrescaTolerances tol;
};

// Maps JSON config keys onto the same variables the flags are bound to. The
// config is applied before parsing, so flags win over the file.
class ConfigBinder {
 public:
  void bind(const std::string& key, std::string* target) {
    setters_[key] = [target](const ordered_json& v) { *target = v.get<std::string>(); };
  }
  void bind(const std::string& key, double* target) {
    setters_[key] = [target](const ordered_json& v) { *target = v.get<double>(); };
  }
  void bind(const std::string& key, int* target) {
    setters_[key] = [target](const ordered_json& v) { *target = v.get<int>(); };
  }
  void bind(const std::string& key, std::uint64_t* target) {
    setters_[key] = [target](const ordered_json& v) { *target = v.get<std::uint64_t>(); };
  }

  void apply(const ordered_json& config) const {
    if (!config.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : config.items()) {
      auto it = setters_.find(key);
      if (it == setters_.end()) throw ConfigError("unknown config key '" + key + "'");
      try {
        it->second(value);
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
      }
    }
  }

 private:
  std::map<std::string, std::function<void(const ordered_json&)>> setters_;
};

void add_common_options(CLI::App* cmd, CommonOptions* opt, ConfigBinder* binder) {
  // The data flag --h would collide with the automatic -h short help.
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("--out", opt->out_dir, "Output directory (created if missing)")->required();
  cmd->add_option("--config", opt->config_path, "JSON config file; flags override its keys");
  cmd->add_option("--mesh", opt->mesh_path, "Mesh file (TMESH); omit to generate a disk");
  cmd->add_option("--n-boundary", opt->n_boundary, "Boundary vertex count of the generated disk");
  cmd->add_option("--arc-begin", opt->arc_begin, "Start angle of the clamped arc");
  cmd->add_option("--arc-end", opt->arc_end, "End angle of the clamped arc");
  cmd->add_option("--seed", opt->seed, "Seed for randomized residual sampling");
  cmd->add_option("--tol-slip", opt->tol.tol_slip, "Slip detection threshold");
  cmd->add_option("--tol-rev", opt->tol.tol_rev, "Slip reversal threshold");
  cmd->add_option("--tol-switch", opt->tol.tol_switch, "Stick release threshold");
  cmd->add_option("--tol-crit", opt->tol.tol_crit, "Borderline-stick threshold");
  cmd->add_option("--tol-law", opt->tol.tol_law, "Friction-law verification tolerance");
  cmd->add_option("--max-outer", opt->tol.max_outer, "Switching iteration budget");
  binder->bind("out", &opt->out_dir);
  binder->bind("mesh", &opt->mesh_path);
  binder->bind("n-boundary", &opt->n_boundary);
  binder->bind("arc-begin", &opt->arc_begin);
  binder->bind("arc-end", &opt->arc_end);
  binder->bind("seed", &opt->seed);
  binder->bind("tol-slip", &opt->tol.tol_slip);
  binder->bind("tol-rev", &opt->tol.tol_rev);
  binder->bind("tol-switch", &opt->tol.tol_switch);
  binder->bind("tol-crit", &opt->tol.tol_crit);
  binder->bind("tol-law", &opt->tol.tol_law);
  binder->bind("max-outer", &opt->tol.max_outer);
}

void add_data_options(CLI::App* cmd, CommonOptions* opt, ConfigBinder* binder,
                      std::string* preset) {
  cmd->add_option("--f", opt->f, "Body force (registry key)");
  cmd->add_option("--h", opt->h, "Normal boundary load (registry key)");
  cmd->add_option("--g1", opt->g1, "Bound offset g1 (registry key)");
  cmd->add_option("--g2", opt->g2, "Bound slope g2 (registry key)");
  cmd->add_option("--z", opt->z, "Control field z (registry key)");
  cmd->add_option("--preset", *preset, "Named data set ('paper-3.3.2')");
  binder->bind("f", &opt->f);
  binder->bind("h", &opt->h);
  binder->bind("g1", &opt->g1);
  binder->bind("g2", &opt->g2);
  binder->bind("z", &opt->z);
  binder->bind("preset", preset);
}

void apply_preset(const std::string& preset, CommonOptions* opt, double* beta) {
  if (preset.empty()) return;
  if (preset != "paper-3.3.2") throw ConfigError("unknown preset '" + preset + "'");
  opt->f = "paper-f";
  opt->h = "paper-h";
  opt->g1 = "paper-g1";
  opt->g2 = "paper-g2";
  opt->z = "paper-z0";
  if (beta) *beta = 1.0;
}

// Pre-scan for --config so the file can seed the defaults before CLI11 parses
// the real flags.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

ordered_json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
}

// Loaded or generated mesh with its topology and factored stiffness.
struct Problem {
  TriMesh mesh;
  BoundaryTopology topo;
  StiffnessSystem sys;
};

std::unique_ptr<Problem> build_problem(const CommonOptions& opt) {
  auto p = std::make_unique<Problem>();
  if (!opt.mesh_path.empty()) {
    try {
      p->mesh = load_mesh(opt.mesh_path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("mesh load failed: ") + e.what());
    }
  } else {
    p->mesh = generate_disk_mesh(opt.n_boundary, opt.arc_begin, opt.arc_end);
  }
  p->topo = build_boundary_topology(p->mesh);
  p->sys = assemble_stiffness(p->mesh, p->topo, reference_material());
  return p;
}

TrescaProblemSpec friction_spec(const Problem& p, const CommonOptions& opt) {
  TrescaProblemSpec spec;
  spec.mesh = &p.mesh;
  spec.topo = &p.topo;
  spec.material = reference_material();
  spec.body_force = lookup_vector_function(opt.f);
  spec.normal_load = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.h));
  const BoundaryField g1 = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.g1));
  const BoundaryField g2 = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.g2));
  const BoundaryField z = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.z));
  BoundaryField g(p.topo.num_neumann());
  for (int i = 0; i < g.size(); ++i) g[i] = g1[i] + z[i] * g2[i];
  for (int i = 0; i < g.size(); ++i)
    if (g[i] < 0.0) throw ConfigError("friction bound g1 + z g2 is negative at a node");
  spec.friction_bound = g;
  spec.tol = opt.tol;
  return spec;
}

ControlProblem control_spec(const Problem& p, const CommonOptions& opt, double beta) {
  ControlProblem c;
  c.mesh = &p.mesh;
  c.topo = &p.topo;
  c.material = reference_material();
  c.body_force = lookup_vector_function(opt.f);
  c.normal_load = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.h));
  c.g1 = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.g1));
  c.g2 = BoundaryField::from_function(p.mesh, p.topo, lookup_scalar_function(opt.g2));
  c.beta = beta;
  c.tol = opt.tol;
  return c;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return std::filesystem::path(dir);
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  write_text_file(path.string(), j.dump(2) + "\n");
}

// NaN is not representable in JSON; report it as null.
ordered_json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string csv_cell(double v) { return format_double(v); }

std::vector<double> parse_t_list(const std::string& ts) {
  std::vector<double> out;
  std::stringstream ss(ts);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad --ts entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--ts must name at least one step");
  return out;
}

// mesh: generate (or convert) a mesh and report its shape.
int cmd_mesh(const CommonOptions& opt, const std::string& rect_sides, int nx, int ny) {
  auto out = prepare_out_dir(opt.out_dir);
  TriMesh mesh;
  if (!opt.mesh_path.empty()) {
    try {
      mesh = load_mesh(opt.mesh_path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("mesh load failed: ") + e.what());
    }
  } else if (nx > 0 || ny > 0) {
    mesh = generate_rectangle_mesh(nx, ny, rect_sides);
  } else {
    mesh = generate_disk_mesh(opt.n_boundary, opt.arc_begin, opt.arc_end);
  }
  const BoundaryTopology topo = build_boundary_topology(mesh);
  save_mesh(mesh, (out / "mesh.tmesh").string());

  int nd = 0, ni = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (topo.node_class[v] == NodeClass::Dirichlet) ++nd;
    if (topo.node_class[v] == NodeClass::Interface) ++ni;
  }
  ordered_json j;
  j["vertices"] = mesh.num_vertices();
  j["triangles"] = mesh.num_triangles();
  j["dirichlet_nodes"] = nd;
  j["interface_nodes"] = ni;
  j["neumann_nodes"] = topo.num_neumann();
  j["diameter"] = mesh.diameter();
  write_json(out / "summary.json", j);
  return 0;
}

int cmd_solve_dn(const CommonOptions& opt) {
  auto out = prepare_out_dir(opt.out_dir);
  auto p = build_problem(opt);

  Eigen::VectorXd load = assemble_body_load(p->mesh, lookup_vector_function(opt.f));
  const BoundaryField h =
      BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(opt.h));
  load += assemble_boundary_normal_load(p->topo, h);
  const VectorField u = solve_dirichlet_neumann(p->sys, load);
  const BoundaryTraction tr = recover_boundary_traction(
      p->sys, u, assemble_body_load(p->mesh, lookup_vector_function(opt.f)));

  VtkPointData fields;
  fields.vectors.push_back({"u", u});
  export_vtk(p->mesh, fields, (out / "solution.vtk").string());

  const int nn = p->topo.num_neumann();
  Eigen::VectorXd u_n(nn), u_t(nn), t_n(nn), t_t(nn);
  for (int i = 0; i < nn; ++i) {
    const int v = p->topo.neumann_nodes[i];
    u_n[i] = u.at(v).dot(p->topo.normal[v]);
    u_t[i] = u.at(v).dot(p->topo.tangent[v]);
    t_n[i] = tr.sigma_n[i];
    t_t[i] = tr.t.values[i].dot(p->topo.tangent[v]);
  }
  export_boundary_csv(p->mesh, p->topo,
                      {{"u_n", u_n}, {"u_t", u_t}, {"t_n", t_n}, {"t_t", t_t}},
                      (out / "boundary.csv").string());

  ordered_json j;
  j["dofs"] = 2 * p->mesh.num_vertices();
  j["energy_norm"] = energy_norm(p->sys, u);
  write_json(out / "summary.json", j);
  return 0;
}

int cmd_solve_tresca(const CommonOptions& opt) {
  auto out = prepare_out_dir(opt.out_dir);
  auto p = build_problem(opt);
  const TrescaProblemSpec spec = friction_spec(*p, opt);

  const TrescaSolution sol = solve_tresca(spec, p->sys);
  if (!sol.converged)
    throw ConvergenceError("friction solve did not converge within the iteration budget");
  const TrescaResiduals res = tresca_residuals(spec, p->sys, sol, 50, opt.seed);
  const BoundaryPartition part =
      compute_boundary_partition(p->mesh, sol, spec.friction_bound, spec.tol);

  VtkPointData fields;
  fields.vectors.push_back({"u", sol.u});
  export_vtk(p->mesh, fields, (out / "solution.vtk").string());

  const int nn = p->topo.num_neumann();
  Eigen::VectorXd g_col(nn), ut(nn), st(nn), state(nn), region(nn);
  for (int i = 0; i < nn; ++i) {
    g_col[i] = spec.friction_bound[i];
    ut[i] = sol.u_tau[i];
    st[i] = sol.sigma_tau[i];
    state[i] = sol.state[i] == ContactState::Slip ? 1.0 : 0.0;
    region[i] = part.region[i] == Region::R ? 0.0 : (part.region[i] == Region::T ? 1.0 : 2.0);
  }
  export_boundary_csv(p->mesh, p->topo,
                      {{"g", g_col}, {"u_tau", ut}, {"sigma_tau", st}, {"slip", state},
                       {"region", region}},
                      (out / "boundary.csv").string());

  ordered_json j;
  j["converged"] = sol.converged;
  j["outer_iters"] = sol.outer_iters;
  j["frozen_nodes"] = sol.frozen_nodes;
  j["energy_norm"] = energy_norm(p->sys, sol.u);
  j["law_max"] = res.law_max;
  j["complementarity_max"] = res.comp_max;
  j["vi_gap_min"] = res.vi_gap_min;
  j["count_R"] = part.count_R;
  j["count_T"] = part.count_T;
  j["count_S"] = part.count_S;
  write_json(out / "summary.json", j);
  return 0;
}

int cmd_solve_signorini(const CommonOptions& opt, const std::string& fp, const std::string& hp,
                        const std::string& gp) {
  auto out = prepare_out_dir(opt.out_dir);
  auto p = build_problem(opt);
  const TrescaProblemSpec spec = friction_spec(*p, opt);

  const TrescaSolution base = solve_tresca(spec, p->sys);
  if (!base.converged)
    throw ConvergenceError("base friction solve did not converge within the iteration budget");
  const BoundaryPartition part =
      compute_boundary_partition(p->mesh, base, spec.friction_bound, spec.tol);

  TangentialSignoriniSpec dspec;
  dspec.body_force_rate = lookup_vector_function(fp);
  dspec.normal_load_rate =
      BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(hp));
  dspec.friction_rate = BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(gp));
  dspec.partition = &part;
  dspec.tol = opt.tol;
  const TangentialSignoriniSolution der = solve_tangential_signorini(spec, dspec, p->sys);
  if (!der.converged) throw ConvergenceError("derivative solve did not converge");

  VtkPointData fields;
  fields.vectors.push_back({"uprime", der.u});
  export_vtk(p->mesh, fields, (out / "solution.vtk").string());

  const int nn = p->topo.num_neumann();
  Eigen::VectorXd region(nn), blocked(nn), ut(nn), st(nn);
  for (int i = 0; i < nn; ++i) {
    region[i] = part.region[i] == Region::R ? 0.0 : (part.region[i] == Region::T ? 1.0 : 2.0);
    blocked[i] = der.s_blocked[i] ? 1.0 : 0.0;
    ut[i] = der.u_tau[i];
    st[i] = der.sigma_tau[i];
  }
  export_boundary_csv(p->mesh, p->topo,
                      {{"region", region}, {"s_blocked", blocked}, {"uprime_tau", ut},
                       {"sigmaprime_tau", st}},
                      (out / "boundary.csv").string());

  ordered_json j;
  j["energy_norm"] = energy_norm(p->sys, der.u);
  j["outer_iters"] = der.outer_iters;
  j["count_R"] = part.count_R;
  j["count_T"] = part.count_T;
  j["count_S"] = part.count_S;
  write_json(out / "summary.json", j);
  return 0;
}

int cmd_verify_sensitivity(const CommonOptions& opt, const std::string& fp, const std::string& hp,
                           const std::string& gp, double fp_scale, const std::string& ts) {
  auto out = prepare_out_dir(opt.out_dir);
  auto p = build_problem(opt);
  const TrescaProblemSpec spec = friction_spec(*p, opt);

  PerturbationFamily fam;
  VectorFn fp_fn = lookup_vector_function(fp);
  if (fp_fn && fp_scale != 1.0) {
    fam.fp = [fp_fn, fp_scale](const Eigen::Vector2d& x) { return (fp_scale * fp_fn(x)).eval(); };
  } else {
    fam.fp = fp_fn;
  }
  fam.hp = BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(hp));
  fam.gp = BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(gp));

  const std::vector<double> t_list = parse_t_list(ts);
  const ConvergenceReport rep = derivative_convergence(spec, fam, t_list, p->sys);

  std::string csv = "t,err\n";
  for (const auto& row : rep.rows)
    csv += csv_cell(row.t) + "," + csv_cell(row.err_rel) + "\n";
  write_text_file((out / "convergence.csv").string(), csv);

  ordered_json j;
  j["deriv_norm"] = rep.deriv_norm;
  j["t_cone_max"] = rep.t_cone_max;
  j["complete"] = rep.complete;
  j["count_R"] = rep.partition.count_R;
  j["count_T"] = rep.partition.count_T;
  j["count_S"] = rep.partition.count_S;
  ordered_json rows = ordered_json::array();
  for (const auto& row : rep.rows) {
    ordered_json r;
    r["t"] = row.t;
    r["err"] = json_number(row.err_rel);
    r["q_norm"] = json_number(row.q_norm);
    r["du_norm"] = json_number(row.du_norm);
    r["converged"] = row.converged;
    rows.push_back(r);
  }
  j["rows"] = rows;
  ordered_json slopes = ordered_json::array();
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i];
    const auto& b = rep.rows[i + 1];
    if (!a.converged || !b.converged || a.err_rel <= 0.0 || b.err_rel <= 0.0) {
      slopes.push_back(nullptr);
    } else {
      slopes.push_back(std::log(a.err_rel / b.err_rel) / std::log(a.t / b.t));
    }
  }
  j["slopes"] = slopes;
  write_json(out / "summary.json", j);

  if (!rep.complete) throw ConvergenceError("a perturbed solve did not converge; table is partial");
  return 0;
}

int cmd_gradcheck(const CommonOptions& opt, double beta, const std::string& dir_key,
                  const std::string& ts) {
  auto out = prepare_out_dir(opt.out_dir);
  auto p = build_problem(opt);
  const ControlProblem c = control_spec(*p, opt, beta);
  const BoundaryField z0 =
      BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(opt.z));
  const BoundaryField dir =
      BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(dir_key));

  const auto rows = gateaux_check(c, p->sys, z0, dir, parse_t_list(ts));

  std::string csv = "t,fd,dJ,rel_err\n";
  for (const auto& row : rows)
    csv += csv_cell(row.t) + "," + csv_cell(row.fd) + "," + csv_cell(row.dJ) + "," +
           csv_cell(row.rel_err) + "\n";
  write_text_file((out / "gradcheck.csv").string(), csv);

  ordered_json j;
  j["dJ"] = rows.empty() ? 0.0 : rows.front().dJ;
  ordered_json rws = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["t"] = row.t;
    r["fd"] = row.fd;
    r["rel_err"] = row.rel_err;
    rws.push_back(r);
  }
  j["rows"] = rws;
  write_json(out / "summary.json", j);
  return 0;
}

int cmd_optimize(const CommonOptions& opt, double beta, const ControlConfig& cfg) {
  auto out = prepare_out_dir(opt.out_dir);
  auto p = build_problem(opt);
  const ControlProblem c = control_spec(*p, opt, beta);
  const BoundaryField z0 =
      BoundaryField::from_function(p->mesh, p->topo, lookup_scalar_function(opt.z));

  const ControlResult res = optimize(c, p->sys, z0, cfg);

  std::string hist = "iter,J,compliance,penalty,switches\n";
  for (const auto& row : res.history)
    hist += std::to_string(row.iter) + "," + csv_cell(row.J) + "," + csv_cell(row.compliance) +
            "," + csv_cell(row.penalty) + "," + std::to_string(row.switches) + "\n";
  write_text_file((out / "history.csv").string(), hist);

  std::string control = "theta,z\n";
  for (int i = 0; i < p->topo.num_neumann(); ++i) {
    const int v = p->topo.neumann_nodes[i];
    const double theta = std::atan2(p->mesh.vertices[v].y(), p->mesh.vertices[v].x());
    control += csv_cell(theta) + "," + csv_cell(res.z[i]) + "\n";
  }
  write_text_file((out / "control.csv").string(), control);

  VtkPointData fields;
  fields.vectors.push_back({"u", res.final_solution.u});
  export_vtk(p->mesh, fields, (out / "solution.vtk").string());

  int bang = 0;
  for (int i = 0; i < res.z.size(); ++i)
    if (std::abs(std::abs(res.z[i]) - 1.0) <= 1e-2) ++bang;

  ordered_json j;
  j["iterations"] = res.iterations;
  j["stopped_by_window"] = res.stopped_by_window;
  j["J_initial"] = res.cost_history.front();
  j["J_final"] = res.cost_history.back();
  j["bang_nodes"] = bang;
  j["neumann_nodes"] = p->topo.num_neumann();
  j["count_R"] = res.final_partition.count_R;
  j["count_T"] = res.final_partition.count_T;
  j["count_S"] = res.final_partition.count_S;
  write_json(out / "summary.json", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-dimensional friction-contact toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string preset;
  std::string rect_sides;
  int rect_nx = 0, rect_ny = 0;
  std::string fp = "zero", hp = "zero", gp = "zero";
  double fp_scale = 1.0;
  std::string ts = "1e-2,1e-3,1e-4";
  std::string dir_key = "probe-z";
  double beta = 1.0;
  ControlConfig ccfg;

  ConfigBinder binder;

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "Generate or convert a mesh");
  add_common_options(mesh_cmd, &opt, &binder);
  mesh_cmd->add_option("--rect-nx", rect_nx, "Rectangle cells in x (0: disk)");
  mesh_cmd->add_option("--rect-ny", rect_ny, "Rectangle cells in y");
  mesh_cmd->add_option("--dirichlet-sides", rect_sides, "Clamped rectangle sides (of L, R, B, T)");
  binder.bind("rect-nx", &rect_nx);
  binder.bind("rect-ny", &rect_ny);
  binder.bind("dirichlet-sides", &rect_sides);

  CLI::App* dn_cmd = app.add_subcommand("solve-dn", "Frictionless solve");
  add_common_options(dn_cmd, &opt, &binder);
  add_data_options(dn_cmd, &opt, &binder, &preset);

  CLI::App* tresca_cmd = app.add_subcommand("solve-tresca", "Friction solve");
  add_common_options(tresca_cmd, &opt, &binder);
  add_data_options(tresca_cmd, &opt, &binder, &preset);

  CLI::App* sig_cmd = app.add_subcommand("solve-signorini", "Derivative problem solve");
  add_common_options(sig_cmd, &opt, &binder);
  add_data_options(sig_cmd, &opt, &binder, &preset);
  sig_cmd->add_option("--fp", fp, "Body force rate (registry key)");
  sig_cmd->add_option("--hp", hp, "Normal load rate (registry key)");
  sig_cmd->add_option("--gp", gp, "Bound rate (registry key)");

  CLI::App* verify_cmd = app.add_subcommand("verify-sensitivity", "Quotient convergence table");
  add_common_options(verify_cmd, &opt, &binder);
  add_data_options(verify_cmd, &opt, &binder, &preset);
  verify_cmd->add_option("--fp", fp, "Body force rate (registry key)");
  verify_cmd->add_option("--hp", hp, "Normal load rate (registry key)");
  verify_cmd->add_option("--gp", gp, "Bound rate (registry key)");
  verify_cmd->add_option("--fp-scale", fp_scale, "Scale factor applied to --fp");
  verify_cmd->add_option("--ts", ts, "Comma-separated decreasing step sizes");
  binder.bind("fp", &fp);
  binder.bind("hp", &hp);
  binder.bind("gp", &gp);
  binder.bind("fp-scale", &fp_scale);
  binder.bind("ts", &ts);

  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "Cost derivative vs quotients");
  add_common_options(grad_cmd, &opt, &binder);
  add_data_options(grad_cmd, &opt, &binder, &preset);
  grad_cmd->add_option("--beta", beta, "Weight of the bound term");
  grad_cmd->add_option("--dir", dir_key, "Direction field (registry key)");
  grad_cmd->add_option("--ts", ts, "Comma-separated decreasing step sizes");
  binder.bind("beta", &beta);
  binder.bind("dir", &dir_key);

  CLI::App* optim_cmd = app.add_subcommand("optimize", "Projected-gradient control loop");
  add_common_options(optim_cmd, &opt, &binder);
  add_data_options(optim_cmd, &opt, &binder, &preset);
  optim_cmd->add_option("--beta", beta, "Weight of the bound term");
  optim_cmd->add_option("--eta", ccfg.eta, "Step size (negative: 1/(beta max g1^2))");
  optim_cmd->add_option("--max-iters", ccfg.max_iters, "Iteration budget");
  optim_cmd->add_option("--stop-window", ccfg.stop_window, "Cost comparison window");
  optim_cmd->add_option("--stop-threshold", ccfg.stop_threshold,
                        "Window stop threshold (negative: 1e-6 J0)");
  binder.bind("eta", &ccfg.eta);
  binder.bind("max-iters", &ccfg.max_iters);
  binder.bind("stop-window", &ccfg.stop_window);
  binder.bind("stop-threshold", &ccfg.stop_threshold);

  const auto fail = [](int code, const std::string& message) {
    ordered_json j;
    j["error"] = message;
    j["exit"] = code;
    std::printf("%s\n", j.dump(2).c_str());
    return code;
  };

  try {
    const std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) binder.apply(load_config(config_path));
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::printf("%s\n", ordered_json({{"error", e.what()}, {"exit", 2}}).dump(2).c_str());
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    return fail(2, e.what());
  }

  try {
    apply_preset(preset, &opt, &beta);
    if (mesh_cmd->parsed()) return cmd_mesh(opt, rect_sides, rect_nx, rect_ny);
    if (dn_cmd->parsed()) return cmd_solve_dn(opt);
    if (tresca_cmd->parsed()) return cmd_solve_tresca(opt);
    if (sig_cmd->parsed()) return cmd_solve_signorini(opt, fp, hp, gp);
    if (verify_cmd->parsed()) return cmd_verify_sensitivity(opt, fp, hp, gp, fp_scale, ts);
    if (grad_cmd->parsed()) return cmd_gradcheck(opt, beta, dir_key, ts);
    if (optim_cmd->parsed()) return cmd_optimize(opt, beta, ccfg);
    return fail(2, "no command selected");
  } catch (const ConvergenceError& e) {
    return fail(3, e.what());
  } catch (const IoError& e) {
    return fail(4, e.what());
  } catch (const ConfigError& e) {
    return fail(2, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(2, e.what());
  }
}
