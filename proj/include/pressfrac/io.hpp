/** @file io.hpp
 *  @brief File outputs: legacy-ASCII VTK snapshots (damage scalar +
 *         displacement vector point data) and TSV tables.
 */
#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include "pressfrac/mesh.hpp"

namespace pressfrac {

/// VTK legacy UNSTRUCTURED_GRID with POINT_DATA `damage` (scalar) and
/// `displacement` (3-vector, zero z).  Cell types: 9 (quad), 5 (triangle).
inline void write_vtk(const Mesh& mesh, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                      const std::string& path) {
  const int nnode = static_cast<int>(mesh.nodes.size());
  if (u.size() != 2 * nnode || d.size() != nnode)
    throw std::invalid_argument("write_vtk: field sizes do not match mesh");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open '" + path + "'");
  out << std::setprecision(12);
  out << "# vtk DataFile Version 3.0\n"
      << "pressfrac snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nnode << " double\n";
  for (const Node& n : mesh.nodes) out << n.x << ' ' << n.y << " 0\n";
  int list_len = 0;
  for (const Element& el : mesh.elements) list_len += el.nnodes() + 1;
  out << "CELLS " << mesh.elements.size() << ' ' << list_len << '\n';
  for (const Element& el : mesh.elements) {
    out << el.nnodes();
    for (int i = 0; i < el.nnodes(); ++i) out << ' ' << el.n[i];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.elements.size() << '\n';
  for (const Element& el : mesh.elements) out << (el.kind == ElemKind::quad4 ? 9 : 5) << '\n';
  out << "POINT_DATA " << nnode << '\n';
  out << "SCALARS damage double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < nnode; ++i) out << d[i] << '\n';
  out << "VECTORS displacement double\n";
  for (int i = 0; i < nnode; ++i) out << u[2 * i] << ' ' << u[2 * i + 1] << " 0\n";
  if (!out) throw std::runtime_error("write_vtk: write failed for '" + path + "'");
}

/// TSV table with one header row; rows must match the header width.
inline void write_tsv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_tsv: cannot open '" + path + "'");
  out << std::setprecision(12);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? '\t' : '\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_tsv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? '\t' : '\n');
  }
  if (!out) throw std::runtime_error("write_tsv: write failed for '" + path + "'");
}

}  // namespace pressfrac
