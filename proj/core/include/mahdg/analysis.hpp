#pragma once

#include "mahdg/discretization.hpp"
#include "mahdg/problems.hpp"
#include "mahdg/state.hpp"

#include <vector>

namespace mahdg {

/// Broken L2 errors against the exact solution; vector and tensor errors
/// are root-sum-square over components.
struct ErrorReport {
  double err_u = 0.0;
  double err_q = 0.0;
  double err_H = 0.0;
  double h = 0.0;
  int p = 0;
};

ErrorReport l2_error(const HdgDiscretization& d, const FieldState& s,
                     const DirichletMAProblem& exact);

/// log2(e_coarse / e_fine) for a mesh-doubling pair; NaN when either error
/// vanishes.
double convergence_order(double e_coarse, double e_fine);

/// High-order mesh whose nodes are q_h evaluated at the background nodal
/// points, averaged where elements share nodes. Topology is copied from the
/// background mesh.
struct AdaptedMesh {
  Mesh mesh;                     // geometric_degree = p
  std::vector<int> multiplicity; // elements sharing each node
  double max_disagreement = 0.0; // largest inter-element gap before averaging
  double boundary_residual = 0.0; // max |g(node)| over boundary face nodes
};

/// Throws TangledMeshError when the adapted isoparametric Jacobian is
/// nonpositive at any quadrature point.
AdaptedMesh extract_adapted_mesh(const HdgDiscretization& d, const FieldState& s,
                                 const OTProblem& pb);

/// Broken L2 norm of rho'(q_h) det(H_h) - theta.
double equidistribution_residual(const HdgDiscretization& d, const FieldState& s,
                                 const OTProblem& pb);

/// Per-element areas of a mesh (signed, by quadrature of strength `re`).
std::vector<double> element_areas(const Mesh& mesh, const ReferenceElement& re);

} // namespace mahdg
