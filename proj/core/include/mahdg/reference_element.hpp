#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace mahdg {

enum class ElemKind { triangle, quadrilateral };

/// n-point Gauss-Legendre rule on [0,1].
struct Quadrature1D {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};
Quadrature1D gauss_legendre(int n);

/// n Gauss-Lobatto-Legendre points on [0,1] (n >= 2, endpoints included).
Eigen::VectorXd gauss_lobatto_points(int n);

/// Nodal reference element for P^p on the unit right triangle
/// {x,y >= 0, x+y <= 1} or tensor-product degree p on the unit square
/// [0,1]^2. Triangle nodes are equispaced in barycentric coordinates;
/// quadrilateral nodes are tensor Gauss-Lobatto. The trace space on faces
/// is the 1D nodal basis at Gauss-Lobatto points of the face parameter
/// t in [0,1].
///
/// Element quadrature is exact for all monomials of total degree <= 2p+1;
/// face quadrature is exact for 1D degree <= 2p+1.
struct ReferenceElement {
  ElemKind kind;
  int degree = 0;       // p
  int num_nodes = 0;    // N_p
  int num_faces = 0;    // 3 or 4
  int nodes_per_face = 0; // p+1

  Eigen::MatrixXd nodes; // N_p x 2

  // element quadrature and basis tables
  Eigen::MatrixXd qpoints;  // N_q x 2
  Eigen::VectorXd qweights; // N_q
  Eigen::MatrixXd basis_q;  // N_q x N_p
  std::array<Eigen::MatrixXd, 2> dbasis_q; // reference gradients, N_q x N_p

  // face quadrature (in the local face parameter t in [0,1])
  Eigen::VectorXd fq_points;
  Eigen::VectorXd fq_weights;
  // element basis traced on local face f at the face quadrature points
  std::array<Eigen::MatrixXd, 4> face_basis;     // N_fq x N_p
  std::array<std::array<Eigen::MatrixXd, 2>, 4> face_dbasis;

  // trace (face) space: 1D nodal basis at Gauss-Lobatto nodes
  Eigen::VectorXd face_nodes_1d;  // p+1 values in [0,1]
  Eigen::MatrixXd trace_basis_q;  // N_fq x (p+1)
  Eigen::MatrixXd trace_basis_nodes; // (p+1) x (p+1); identity by construction

  // connectivity of the nodal layout
  std::array<int, 4> corner_nodes{};              // local ids of corners
  std::array<std::vector<int>, 4> face_node_ids;  // local node ids along each face, traversal order
  std::array<Eigen::Vector2d, 4> face_tangent;    // d(ref coords)/dt along each face

  /// Basis values at arbitrary reference points (rows of pts).
  Eigen::MatrixXd eval_basis(const Eigen::MatrixXd& pts) const;
  /// Reference-gradient tables at arbitrary points.
  std::array<Eigen::MatrixXd, 2> eval_dbasis(const Eigen::MatrixXd& pts) const;
  /// Reference coordinates of the point at parameter t on local face f.
  Eigen::Vector2d face_point(int f, double t) const;

  /// Local node ids (3 or 4 per cell) subdividing the nodal lattice into
  /// linear cells, used for viewing exports.
  std::vector<std::vector<int>> linear_subcells() const;

private:
  Eigen::MatrixXd vandermonde_inv_; // triangle modal-to-nodal transform
  friend const ReferenceElement& make_reference_element(ElemKind, int);
  friend ReferenceElement build_reference_element(ElemKind, int);
};

/// Cached immutable reference elements, 1 <= p <= 8.
const ReferenceElement& make_reference_element(ElemKind kind, int p);

} // namespace mahdg
