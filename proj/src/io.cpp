#include "richards/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <system_error>

namespace richards {

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

void CsvWriter::sep() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

void CsvWriter::header(std::span<const std::string> names) {
  begin_row();
  for (const std::string& n : names) field(n);
}

void CsvWriter::header(std::initializer_list<std::string> names) {
  begin_row();
  for (const std::string& n : names) field(n);
}

void CsvWriter::begin_row() {
  if (row_open_) out_ << '\n';
  row_open_ = true;
  first_in_row_ = true;
}

void CsvWriter::field(const std::string& v) {
  sep();
  out_ << v;
}

void CsvWriter::field(double v) {
  sep();
  out_ << std::setprecision(17) << v;
}

void CsvWriter::field(int v) {
  sep();
  out_ << v;
}

void CsvWriter::field(bool v) {
  sep();
  out_ << (v ? "true" : "false");
}

std::string CsvWriter::str() const {
  std::string s = out_.str();
  if (row_open_) s += '\n';
  return s;
}

void CsvWriter::write_atomic(const std::string& path) const { write_file_atomic(path, str()); }

namespace {

void vtk_preamble(std::ostringstream& out, const Mesh& mesh) {
  out << "# vtk DataFile Version 3.0\n";
  out << "richards mesh\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Node& n : mesh.nodes()) out << n.x << ' ' << n.z << " 0\n";
  int nt = mesh.num_triangles();
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int i = 0; i < nt; ++i) out << "5\n";
}

}  // namespace

std::string mesh_vtk_string(const Mesh& mesh) {
  std::ostringstream out;
  vtk_preamble(out, mesh);
  return out.str();
}

void write_mesh_vtk(const Mesh& mesh, const std::string& path) {
  write_file_atomic(path, mesh_vtk_string(mesh));
}

std::string field_vtk_string(const Mesh& mesh, std::span<const double> field) {
  if (static_cast<int>(field.size()) != mesh.num_nodes())
    throw std::invalid_argument("field_vtk_string: field size mismatch");
  std::ostringstream out;
  vtk_preamble(out, mesh);
  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  out << "SCALARS pressure_head double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (double v : field) out << v << '\n';
  return out.str();
}

void write_field_vtk(const Mesh& mesh, std::span<const double> field,
                     const std::string& path) {
  write_file_atomic(path, field_vtk_string(mesh, field));
}

}  // namespace richards
