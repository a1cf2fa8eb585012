#pragma once

// Triangle meshes with a tagged boundary (Dirichlet / Neumann parts) and the
// derived boundary topology the solvers work with: node classification,
// averaged outward normals, CCW tangents, and lumped node weights.

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace tresca {

struct BoundaryEdge {
  int a = -1, b = -1;  // vertex ids, ordered so the domain lies on the left
  char tag = 'N';      // 'D' (clamped) or 'N' (traction / friction)
};

struct TriMesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double diameter() const;  // bounding-box diagonal
};

enum class NodeClass { Interior, Dirichlet, Neumann, Interface };

// Per-vertex boundary data. Interface nodes (touching both edge tags) count as
// Dirichlet for constraint purposes and are excluded from neumann_nodes.
struct BoundaryTopology {
  std::vector<NodeClass> node_class;
  std::vector<Eigen::Vector2d> normal;   // unit outward, length-weighted edge average; zero off the boundary
  std::vector<Eigen::Vector2d> tangent;  // normal rotated +90 degrees
  std::vector<double> node_weight;       // half the total length of adjacent boundary edges
  std::vector<int> neumann_nodes;        // ascending vertex ids classified Neumann
  std::vector<int> neumann_index;        // vertex id -> slot in neumann_nodes, or -1

  int num_neumann() const { return static_cast<int>(neumann_nodes.size()); }
};

// Structured disk mesh: concentric vertex rings stitched into triangle strips,
// boundary vertices exactly on the unit circle. Boundary edges whose midpoint
// angle falls inside [dirichlet_begin, dirichlet_end] are tagged 'D'.
TriMesh generate_disk_mesh(int n_boundary, double dirichlet_begin = 0.0,
                           double dirichlet_end = 1.5707963267948966);

// Structured mesh of [0,1]^2, nx-by-ny cells split into right triangles.
// dirichlet_sides selects clamped sides by letter: L, R, B, T (e.g. "LB").
TriMesh generate_rectangle_mesh(int nx, int ny, const std::string& dirichlet_sides);

BoundaryTopology build_boundary_topology(const TriMesh& mesh);

// Plain-text mesh files ("TMESH 1"). Throws std::runtime_error on malformed
// input or I/O failure.
void save_mesh(const TriMesh& mesh, const std::string& path);
TriMesh load_mesh(const std::string& path);

}  // namespace tresca
