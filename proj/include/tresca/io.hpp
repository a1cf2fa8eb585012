#pragma once

// Deterministic result files: legacy ASCII VTK for fields on the mesh, CSV for
// per-boundary-node columns and iteration histories. All numbers are printed
// with a fixed format so identical runs produce identical bytes.

#include "tresca/assembly.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tresca {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed number format used by every writer ("%.12g").
std::string format_double(double v);

struct VtkPointData {
  std::vector<std::pair<std::string, Eigen::VectorXd>> scalars;  // size = num vertices
  std::vector<std::pair<std::string, VectorField>> vectors;
};

void export_vtk(const TriMesh& mesh, const VtkPointData& data, const std::string& path);

// One row per Neumann node: id, x, y, then the named columns.
void export_boundary_csv(const TriMesh& mesh, const BoundaryTopology& topo,
                         const std::vector<std::pair<std::string, Eigen::VectorXd>>& columns,
                         const std::string& path);

// One row per entry: iteration index and value.
void export_history_csv(const std::string& value_name, const std::vector<double>& values,
                        const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tresca
