#pragma once

#include "mahdg/mesh.hpp"
#include "mahdg/reference_element.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace mahdg {

/// Geometric factors of one element at the quadrature points of a solution
/// reference element. Face entries are stored in face-global order (owner
/// traversal), so two elements sharing a face see matching point order.
struct ElementGeometry {
  Eigen::MatrixXd xq;      // N_q x 2 physical coordinates
  Eigen::VectorXd detJ;    // N_q
  Eigen::VectorXd wq;      // N_q physical weights
  std::array<Eigen::VectorXd, 4> jinv_t; // J^{-T} entries (00,01,10,11) per point

  struct FaceData {
    Eigen::MatrixXd x;       // N_fq x 2
    Eigen::MatrixXd normal;  // N_fq x 2 outward
    Eigen::VectorXd w;       // physical weights
  };
  std::vector<FaceData> face;
};

/// Build geometric factors for `elem` with the mesh's isoparametric mapping,
/// sampled at the rule of `re`. `flip[f]` marks faces whose global
/// orientation is reversed relative to the element (neighbor side).
ElementGeometry compute_element_geometry(const Mesh& mesh, int elem,
                                         const ReferenceElement& re,
                                         const std::array<bool, 4>& flip);

/// Per-point physical gradient tables: gx/gy are N_q x N_p.
void physical_gradients(const ReferenceElement& re, const ElementGeometry& g,
                        Eigen::MatrixXd& gx, Eigen::MatrixXd& gy);

} // namespace mahdg
