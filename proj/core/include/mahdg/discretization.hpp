#pragma once

#include "mahdg/geometry.hpp"
#include "mahdg/mesh.hpp"
#include "mahdg/reference_element.hpp"

#include <array>
#include <vector>

namespace mahdg {

/// Mesh + solution space of degree p with precomputed per-element geometric
/// factors. Immutable after construction; safe to share across threads.
class HdgDiscretization {
public:
  HdgDiscretization(const Mesh& mesh, int p);

  const Mesh& mesh() const { return *mesh_; }
  const ReferenceElement& ref() const { return *re_; }
  int degree() const { return re_->degree; }
  int np() const { return re_->num_nodes; }
  int nfp() const { return re_->nodes_per_face; }
  int num_elements() const { return mesh_->num_elements(); }
  int num_faces() const { return mesh_->num_faces(); }
  int faces_per_elem() const { return mesh_->faces_per_elem(); }
  /// Interior unknowns per element in the Newton layout (H,q,u).
  int interior_size() const { return 7 * np(); }
  int trace_size() const { return num_faces() * nfp(); }

  const ElementGeometry& geom(int e) const { return geom_[e]; }
  bool face_flipped(int e, int f) const { return flipped_[e][f]; }
  int elem_face(int e, int f) const { return mesh_->elem_faces[e][f]; }
  /// Element trace table on local face f in face-global point order.
  Eigen::MatrixXd face_trace_basis(int e, int f) const;

  /// Physical coordinates of the reference nodes of element e.
  Eigen::MatrixXd elem_node_coords(int e) const;
  /// Physical coordinates of the trace nodes of face f (face-global order).
  Eigen::MatrixXd face_node_coords(int f) const;

private:
  const Mesh* mesh_;
  const ReferenceElement* re_;
  std::vector<ElementGeometry> geom_;
  std::vector<std::array<bool, 4>> flipped_;
};

} // namespace mahdg
