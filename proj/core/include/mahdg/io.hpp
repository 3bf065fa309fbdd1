#pragma once

#include "mahdg/discretization.hpp"
#include "mahdg/mesh.hpp"
#include "mahdg/solver.hpp"
#include "mahdg/state.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mahdg {

/// Legacy ASCII VTK (v3.0) unstructured grid; high-order elements are
/// written as subdivided linear cells. Optional scalar point fields are
/// sized by the mesh node count. Output is byte-deterministic.
void export_vtk(const Mesh& mesh, const std::string& path,
                const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_fields = {});

/// Degree-p nodal view of a solution on its background mesh: the mesh of
/// averaged nodal points plus averaged u/q point fields, ready for export.
struct SolutionView {
  Mesh mesh;
  std::vector<std::pair<std::string, Eigen::VectorXd>> fields;
};
SolutionView solution_view(const HdgDiscretization& d, const FieldState& s);

/// RFC-4180-style CSV with a header row; cells are written verbatim.
void export_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

enum class LogKind { newton, fixed_point };
void write_iteration_log(const std::string& path, const IterationLog& log, LogKind kind);

/// Shortest round-trippable decimal form ("%.17g" trimmed).
std::string format_full(double v);
/// Fixed scientific form with `digits` fractional digits.
std::string format_sci(double v, int digits = 6);

} // namespace mahdg
