#include "tresca/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tresca {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << content;
  if (!f) throw IoError("write failed: " + path);
}

void export_vtk(const TriMesh& mesh, const VtkPointData& data, const std::string& path) {
  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\n";
  out << "field output\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices)
    out << format_double(v.x()) << " " << format_double(v.y()) << " 0\n";

  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";

  if (!data.scalars.empty() || !data.vectors.empty()) {
    out << "POINT_DATA " << mesh.num_vertices() << "\n";
    for (const auto& [name, field] : data.vectors) {
      out << "VECTORS " << name << " double\n";
      for (int v = 0; v < mesh.num_vertices(); ++v)
        out << format_double(field.at(v).x()) << " " << format_double(field.at(v).y()) << " 0\n";
    }
    for (const auto& [name, values] : data.scalars) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (int v = 0; v < mesh.num_vertices(); ++v) out << format_double(values[v]) << "\n";
    }
  }
  write_text_file(path, out.str());
}

void export_boundary_csv(const TriMesh& mesh, const BoundaryTopology& topo,
                         const std::vector<std::pair<std::string, Eigen::VectorXd>>& columns,
                         const std::string& path) {
  for (const auto& [name, col] : columns)
    if (col.size() != topo.num_neumann())
      throw IoError("boundary CSV column '" + name + "' has the wrong length");

  std::ostringstream out;
  out << "node,x,y";
  for (const auto& [name, col] : columns) out << "," << name;
  out << "\n";
  for (int i = 0; i < topo.num_neumann(); ++i) {
    const int v = topo.neumann_nodes[i];
    out << v << "," << format_double(mesh.vertices[v].x()) << ","
        << format_double(mesh.vertices[v].y());
    for (const auto& [name, col] : columns) out << "," << format_double(col[i]);
    out << "\n";
  }
  write_text_file(path, out.str());
}

void export_history_csv(const std::string& value_name, const std::vector<double>& values,
                        const std::string& path) {
  std::ostringstream out;
  out << "iter," << value_name << "\n";
  for (size_t i = 0; i < values.size(); ++i) out << i << "," << format_double(values[i]) << "\n";
  write_text_file(path, out.str());
}

}  // namespace tresca
