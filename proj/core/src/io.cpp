#include "mahdg/io.hpp"

#include "mahdg/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mahdg {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_sci(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

void export_vtk(const Mesh& mesh, const std::string& path,
                const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_fields) {
  std::ofstream os(path);
  if (!os) throw IoError("export_vtk: cannot open for writing", path);
  const ReferenceElement& geo_re =
      make_reference_element(mesh.elem_kind, mesh.geometric_degree);
  auto subcells = geo_re.linear_subcells();

  os << "# vtk DataFile Version 3.0\n";
  os << "ma_hdg mesh\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    os << format_full(mesh.node_coords(i, 0)) << ' '
       << format_full(mesh.node_coords(i, 1)) << " 0\n";

  const int per_cell = mesh.elem_kind == ElemKind::triangle ? 3 : 4;
  const int vtk_type = mesh.elem_kind == ElemKind::triangle ? 5 : 9;
  const size_t ncells = subcells.size() * mesh.num_elements();
  os << "CELLS " << ncells << ' ' << ncells * (per_cell + 1) << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (const auto& sc : subcells) {
      os << per_cell;
      for (int local : sc) os << ' ' << mesh.elem_nodes[e][local];
      os << '\n';
    }
  }
  os << "CELL_TYPES " << ncells << '\n';
  for (size_t c = 0; c < ncells; ++c) os << vtk_type << '\n';

  if (!point_fields.empty()) {
    os << "POINT_DATA " << mesh.num_nodes() << '\n';
    for (const auto& [name, values] : point_fields) {
      os << "SCALARS " << name << " double 1\n";
      os << "LOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < values.size(); ++i) os << format_full(values(i)) << '\n';
    }
  }
  if (!os) throw IoError("export_vtk: write failed", path);
}

SolutionView solution_view(const HdgDiscretization& d, const FieldState& s) {
  const Mesh& bg = d.mesh();
  const ReferenceElement& re = d.ref();
  const int np = d.np();
  NodalNumbering num = build_nodal_numbering(bg, re);

  SolutionView view;
  Mesh& vm = view.mesh;
  vm.elem_kind = bg.elem_kind;
  vm.geometric_degree = re.degree;
  vm.node_coords = Eigen::MatrixXd::Zero(num.num_global, 2);
  vm.elem_nodes = num.elem_to_global;
  vm.elem_faces = bg.elem_faces;
  vm.faces = bg.faces;
  for (Face& f : vm.faces) {
    f.vertices[0] = num.elem_to_global[f.owner][re.face_node_ids[f.owner_local].front()];
    f.vertices[1] = num.elem_to_global[f.owner][re.face_node_ids[f.owner_local].back()];
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(num.num_global);
  Eigen::VectorXd q1 = u, q2 = u;
  for (int e = 0; e < bg.num_elements(); ++e) {
    Eigen::MatrixXd x = d.elem_node_coords(e);
    for (int i = 0; i < np; ++i) {
      int gid = num.elem_to_global[e][i];
      vm.node_coords.row(gid) += x.row(i);
      u(gid) += s.u(e * np + i);
      q1(gid) += s.q(e * 2 * np + i);
      q2(gid) += s.q(e * 2 * np + np + i);
    }
  }
  for (int gid = 0; gid < num.num_global; ++gid) {
    double m = num.multiplicity[gid];
    vm.node_coords.row(gid) /= m;
    u(gid) /= m;
    q1(gid) /= m;
    q2(gid) /= m;
  }
  view.fields = {{"u", u}, {"q1", q1}, {"q2", q2}};
  return view;
}

void export_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("export_csv: cannot open for writing", path);
  for (size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "");
  os << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "");
    os << '\n';
  }
  if (!os) throw IoError("export_csv: write failed", path);
}

void write_iteration_log(const std::string& path, const IterationLog& log, LogKind kind) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(log.entries.size());
  if (kind == LogKind::newton) {
    for (const auto& r : log.entries)
      rows.push_back({std::to_string(r.iteration), format_sci(r.residual_norm, 9),
                      format_full(r.alpha)});
    export_csv(path, {"iteration", "residual_norm", "alpha"}, rows);
  } else {
    for (const auto& r : log.entries)
      rows.push_back({std::to_string(r.iteration), format_sci(r.increment_norm, 9)});
    export_csv(path, {"iteration", "hessian_increment_norm"}, rows);
  }
}

} // namespace mahdg
