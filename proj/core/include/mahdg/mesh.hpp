#pragma once

#include "mahdg/reference_element.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace mahdg {

/// Boundary component tags carried by boundary faces.
namespace boundary_tag {
inline constexpr int none = -1;
inline constexpr int square_left = 0;
inline constexpr int square_right = 1;
inline constexpr int square_bottom = 2;
inline constexpr int square_top = 3;
inline constexpr int circle = 4;
inline constexpr int ellipse = 5;
inline constexpr int cut = 6;
} // namespace boundary_tag

struct Face {
  std::array<int, 2> vertices{-1, -1}; // endpoint vertex node ids, owner traversal order
  int owner = -1;
  int neighbor = -1;
  int owner_local = -1;    // local face id within the owner
  int neighbor_local = -1; // local face id within the neighbor
  int boundary = boundary_tag::none;
  bool interior() const { return neighbor >= 0; }
};

struct Box {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// 2D conforming mesh with isoparametric geometric nodes of degree
/// geometric_degree laid out per the matching ReferenceElement. For every
/// interior face the neighbor's traversal is opposite to the owner's, so
/// face-global orientation is the owner's.
struct Mesh {
  ElemKind elem_kind = ElemKind::triangle;
  int geometric_degree = 1;
  Eigen::MatrixXd node_coords;               // n_nodes x 2
  std::vector<std::vector<int>> elem_nodes;  // geometric node ids per element
  std::vector<Face> faces;
  std::vector<std::array<int, 4>> elem_faces; // face ids in local face order (-1 unused)

  int num_elements() const { return static_cast<int>(elem_nodes.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_nodes() const { return static_cast<int>(node_coords.rows()); }
  int faces_per_elem() const { return elem_kind == ElemKind::triangle ? 3 : 4; }
};

/// Uniform n x n quadrilateral grid or n x n x 2 triangulation of the box
/// (cells split along the lower-left -> upper-right diagonal).
Mesh build_square_mesh(int n, ElemKind kind, const Box& box);

/// Curved half-cylinder domain between the unit circle x^2+y^2 = 1 and the
/// ellipse x^2/4 + y^2/16 = 1, theta in [pi/2, 3pi/2] (x <= 0 half). High
/// order nodes blend linearly between the two curves at equal angle
/// parameter. Inner faces tagged circle, outer ellipse, straight ends cut.
Mesh build_cylinder_mesh(int n_r, int n_t, int geometric_degree);

enum class FaceSide { owner, neighbor };

/// Face quadrature geometry for one side, evaluated at the face rule of
/// `re` in face-global order (owner traversal) so the two sides of an
/// interior face pair up pointwise.
struct FaceGeometry {
  Eigen::MatrixXd points;  // N_fq x 2
  Eigen::MatrixXd normals; // N_fq x 2, outward from the requested side
  Eigen::VectorXd sjac;    // surface Jacobian |dx/dt|
  Eigen::VectorXd weights; // physical weights
};
FaceGeometry face_geometry(const Mesh& mesh, int face, FaceSide side,
                           const ReferenceElement& re);

/// Total mesh area by quadrature of strength matching `re` (pass the
/// geometric reference element or finer).
double mesh_area(const Mesh& mesh, const ReferenceElement& re);

/// Identification of per-element nodal points of `re` across element
/// boundaries (vertex and edge nodes merged through shared faces).
/// Ordering is deterministic: first encounter in element-major order.
struct NodalNumbering {
  int num_global = 0;
  std::vector<std::vector<int>> elem_to_global; // per element, per local node
  std::vector<int> multiplicity;                // elements sharing each global node
};
NodalNumbering build_nodal_numbering(const Mesh& mesh, const ReferenceElement& re);

} // namespace mahdg
