#pragma once

#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "richards/mesh.hpp"

namespace richards {

/// Writes `content` via a temporary file plus rename, so readers never see
/// a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

/// Minimal CSV accumulator; numbers are formatted with enough digits to
/// round-trip.
class CsvWriter {
public:
  void header(std::span<const std::string> names);
  void header(std::initializer_list<std::string> names);
  void begin_row();
  void field(const std::string& v);
  void field(double v);
  void field(int v);
  void field(bool v);

  std::string str() const;
  void write_atomic(const std::string& path) const;

private:
  std::ostringstream out_;
  bool row_open_ = false;
  bool first_in_row_ = true;
  void sep();
};

/// Legacy ASCII VTK unstructured grid (triangle cells, type 5).
std::string mesh_vtk_string(const Mesh& mesh);
void write_mesh_vtk(const Mesh& mesh, const std::string& path);

/// Mesh plus a nodal scalar, written as POINT_DATA "pressure_head".
std::string field_vtk_string(const Mesh& mesh, std::span<const double> field);
void write_field_vtk(const Mesh& mesh, std::span<const double> field, const std::string& path);

}  // namespace richards
