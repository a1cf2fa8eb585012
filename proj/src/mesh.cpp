#include "tresca/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tresca {

namespace {

constexpr double kPi = 3.14159265358979323846;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross2(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

double TriMesh::diameter() const {
  Eigen::Vector2d lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

namespace {

// Triangulate the annulus between two concentric CCW vertex rings by walking
// both rings at once and always advancing the ring whose next vertex comes
// first in angle. Integer comparison keeps the choice exact: vertex a+1 of the
// outer ring (p vertices) precedes vertex b+1 of the inner ring (q vertices)
// iff (a+1) q <= (b+1) p.
void stitch_rings(const std::vector<int>& outer, const std::vector<int>& inner,
                  std::vector<std::array<int, 3>>& triangles) {
  const int p = static_cast<int>(outer.size());
  const int q = static_cast<int>(inner.size());
  int a = 0, b = 0;
  while (a < p || b < q) {
    const bool advance_outer =
        a < p && (b == q || static_cast<long>(a + 1) * q <= static_cast<long>(b + 1) * p);
    if (advance_outer) {
      triangles.push_back({outer[a % p], outer[(a + 1) % p], inner[b % q]});
      ++a;
    } else {
      triangles.push_back({outer[a % p], inner[(b + 1) % q], inner[b % q]});
      ++b;
    }
  }
}

}  // namespace

TriMesh generate_disk_mesh(int n_boundary, double dirichlet_begin, double dirichlet_end) {
  if (n_boundary < 8)
    throw std::invalid_argument("generate_disk_mesh: need at least 8 boundary vertices");
  const double span = dirichlet_end - dirichlet_begin;
  if (!(span > 0.0) || !(span < 2.0 * kPi))
    throw std::invalid_argument("generate_disk_mesh: Dirichlet arc must span (0, 2*pi)");

  // Ring spacing chosen so radial and angular steps match: ~n_boundary/6 rings.
  const int rings = std::max(1, static_cast<int>(std::lround(n_boundary / 6.0)));

  TriMesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);  // center, id 0

  std::vector<std::vector<int>> ring_ids(rings + 1);
  for (int j = 1; j <= rings; ++j) {
    const int count =
        j == rings ? n_boundary
                   : std::max(4, static_cast<int>(std::lround(
                                     n_boundary * static_cast<double>(j) / rings)));
    const double r = static_cast<double>(j) / rings;
    ring_ids[j].reserve(count);
    for (int k = 0; k < count; ++k) {
      const double theta = 2.0 * kPi * k / count;
      ring_ids[j].push_back(mesh.num_vertices());
      mesh.vertices.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }

  // Center fan, then one strip per ring pair.
  const auto& first = ring_ids[1];
  for (int k = 0; k < static_cast<int>(first.size()); ++k)
    mesh.triangles.push_back({first[k], first[(k + 1) % first.size()], 0});
  for (int j = 2; j <= rings; ++j) stitch_rings(ring_ids[j], ring_ids[j - 1], mesh.triangles);

  const auto& rim = ring_ids[rings];
  const int nb = static_cast<int>(rim.size());
  for (int k = 0; k < nb; ++k) {
    const int a = rim[k], b = rim[(k + 1) % nb];
    const Eigen::Vector2d mid = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    double theta = std::atan2(mid.y(), mid.x());
    const double rel = std::fmod(theta - dirichlet_begin + 4.0 * kPi, 2.0 * kPi);
    const char tag = rel <= span + 1e-14 ? 'D' : 'N';
    mesh.boundary_edges.push_back({a, b, tag});
  }
  return mesh;
}

TriMesh generate_rectangle_mesh(int nx, int ny, const std::string& dirichlet_sides) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("generate_rectangle_mesh: need nx, ny >= 1");
  for (char c : dirichlet_sides)
    if (c != 'L' && c != 'R' && c != 'B' && c != 'T')
      throw std::invalid_argument("generate_rectangle_mesh: sides must be from LRBT");

  TriMesh mesh;
  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(static_cast<double>(i) / nx, static_cast<double>(j) / ny);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }

  const auto tag_of = [&](char side) {
    return dirichlet_sides.find(side) != std::string::npos ? 'D' : 'N';
  };
  for (int i = 0; i < nx; ++i)  // bottom, left to right
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), tag_of('B')});
  for (int j = 0; j < ny; ++j)  // right, upward
    mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), tag_of('R')});
  for (int i = nx; i > 0; --i)  // top, right to left
    mesh.boundary_edges.push_back({vid(i, ny), vid(i - 1, ny), tag_of('T')});
  for (int j = ny; j > 0; --j)  // left, downward
    mesh.boundary_edges.push_back({vid(0, j), vid(0, j - 1), tag_of('L')});
  return mesh;
}

BoundaryTopology build_boundary_topology(const TriMesh& mesh) {
  const int nv = mesh.num_vertices();

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int c : mesh.triangles[t])
      if (c < 0 || c >= nv) throw std::runtime_error("mesh: triangle vertex id out of range");
    if (!(mesh.triangle_area(t) > 0.0))
      throw std::runtime_error("mesh: triangle with nonpositive area (orientation?)");
  }

  // Every boundary edge must be a directed edge of exactly one triangle, which
  // is what puts the domain on its left.
  std::set<std::pair<int, int>> tri_edges;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) tri_edges.insert({tri[e], tri[(e + 1) % 3]});

  BoundaryTopology topo;
  topo.node_class.assign(nv, NodeClass::Interior);
  topo.normal.assign(nv, Eigen::Vector2d::Zero());
  topo.tangent.assign(nv, Eigen::Vector2d::Zero());
  topo.node_weight.assign(nv, 0.0);
  topo.neumann_index.assign(nv, -1);

  std::vector<bool> touches_d(nv, false), touches_n(nv, false);
  for (const auto& edge : mesh.boundary_edges) {
    if (edge.a < 0 || edge.a >= nv || edge.b < 0 || edge.b >= nv || edge.a == edge.b)
      throw std::runtime_error("mesh: boundary edge vertex ids invalid");
    if (edge.tag != 'D' && edge.tag != 'N')
      throw std::runtime_error("mesh: boundary edge tag must be D or N");
    if (!tri_edges.count({edge.a, edge.b}))
      throw std::runtime_error("mesh: boundary edge is not a CCW triangle edge");

    const Eigen::Vector2d d = mesh.vertices[edge.b] - mesh.vertices[edge.a];
    const double len = d.norm();
    const Eigen::Vector2d n_edge(d.y() / len, -d.x() / len);  // outward for domain-on-left
    for (int v : {edge.a, edge.b}) {
      topo.normal[v] += len * n_edge;
      topo.node_weight[v] += 0.5 * len;
      (edge.tag == 'D' ? touches_d : touches_n)[v] = true;
    }
  }

  for (int v = 0; v < nv; ++v) {
    if (!touches_d[v] && !touches_n[v]) continue;
    const double norm = topo.normal[v].norm();
    if (norm <= 0.0) throw std::runtime_error("mesh: degenerate boundary normal");
    topo.normal[v] /= norm;
    topo.tangent[v] = Eigen::Vector2d(-topo.normal[v].y(), topo.normal[v].x());
    if (touches_d[v] && touches_n[v])
      topo.node_class[v] = NodeClass::Interface;
    else if (touches_d[v])
      topo.node_class[v] = NodeClass::Dirichlet;
    else
      topo.node_class[v] = NodeClass::Neumann;
  }

  for (int v = 0; v < nv; ++v)
    if (topo.node_class[v] == NodeClass::Neumann) {
      topo.neumann_index[v] = static_cast<int>(topo.neumann_nodes.size());
      topo.neumann_nodes.push_back(v);
    }
  return topo;
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  std::ostringstream out;
  char buf[64];
  out << "TMESH 1\n";
  out << "VERTICES " << mesh.num_vertices() << "\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  out << "TRIANGLES " << mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "BOUNDARY_EDGES " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges) out << e.a << " " << e.b << " " << e.tag << "\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_mesh: cannot open " + path);
  f << out.str();
  if (!f) throw std::runtime_error("save_mesh: write failed for " + path);
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_mesh: cannot open " + path);

  const auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("load_mesh: " + what + " in " + path);
  };

  std::string magic;
  int version = 0;
  if (!(f >> magic >> version) || magic != "TMESH" || version != 1)
    throw fail("bad header (expected 'TMESH 1')");

  std::string section;
  int count = 0;
  TriMesh mesh;

  if (!(f >> section >> count) || section != "VERTICES" || count < 3)
    throw fail("bad VERTICES section");
  mesh.vertices.resize(count);
  for (auto& v : mesh.vertices)
    if (!(f >> v.x() >> v.y())) throw fail("truncated vertex list");

  if (!(f >> section >> count) || section != "TRIANGLES" || count < 1)
    throw fail("bad TRIANGLES section");
  mesh.triangles.resize(count);
  for (auto& t : mesh.triangles)
    if (!(f >> t[0] >> t[1] >> t[2])) throw fail("truncated triangle list");

  if (!(f >> section >> count) || section != "BOUNDARY_EDGES" || count < 3)
    throw fail("bad BOUNDARY_EDGES section");
  mesh.boundary_edges.resize(count);
  for (auto& e : mesh.boundary_edges) {
    std::string tag;
    if (!(f >> e.a >> e.b >> tag) || tag.size() != 1) throw fail("truncated boundary edge list");
    e.tag = tag[0];
  }

  build_boundary_topology(mesh);  // runs the structural validation
  return mesh;
}

}  // namespace tresca
