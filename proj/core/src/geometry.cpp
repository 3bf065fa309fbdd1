#include "mahdg/geometry.hpp"

#include "mahdg/errors.hpp"

#include <cmath>

namespace mahdg {

ElementGeometry compute_element_geometry(const Mesh& mesh, int elem,
                                         const ReferenceElement& re,
                                         const std::array<bool, 4>& flip) {
  const ReferenceElement& geo_re =
      make_reference_element(mesh.elem_kind, mesh.geometric_degree);

  Eigen::MatrixXd coords(geo_re.num_nodes, 2);
  for (int i = 0; i < geo_re.num_nodes; ++i)
    coords.row(i) = mesh.node_coords.row(mesh.elem_nodes[elem][i]);

  ElementGeometry g;
  const Eigen::Index nq = re.qpoints.rows();
  Eigen::MatrixXd vals;
  std::array<Eigen::MatrixXd, 2> grads;
  if (mesh.geometric_degree == re.degree && mesh.elem_kind == re.kind) {
    vals = geo_re.basis_q; // same rule, reuse tables
    grads = geo_re.dbasis_q;
  } else {
    vals = geo_re.eval_basis(re.qpoints);
    grads = geo_re.eval_dbasis(re.qpoints);
  }
  g.xq = vals * coords;
  g.detJ.resize(nq);
  g.wq.resize(nq);
  for (auto& v : g.jinv_t) v.resize(nq);
  for (Eigen::Index k = 0; k < nq; ++k) {
    double xs = grads[0].row(k) * coords.col(0), ys = grads[0].row(k) * coords.col(1);
    double xt = grads[1].row(k) * coords.col(0), yt = grads[1].row(k) * coords.col(1);
    double det = xs * yt - xt * ys;
    if (!(det > 0.0))
      throw EvaluationError("nonpositive geometric Jacobian", elem);
    g.detJ(k) = det;
    g.wq(k) = re.qweights(k) * det;
    // J^{-T} = (1/det) [[yt, -ys], [-xt, xs]]
    g.jinv_t[0](k) = yt / det;
    g.jinv_t[1](k) = -ys / det;
    g.jinv_t[2](k) = -xt / det;
    g.jinv_t[3](k) = xs / det;
  }

  const Eigen::Index nfq = re.fq_points.size();
  g.face.resize(re.num_faces);
  for (int f = 0; f < re.num_faces; ++f) {
    Eigen::MatrixXd ref_pts(nfq, 2);
    for (Eigen::Index k = 0; k < nfq; ++k) {
      double t = flip[f] ? 1.0 - re.fq_points(k) : re.fq_points(k);
      ref_pts.row(k) = re.face_point(f, t).transpose();
    }
    Eigen::MatrixXd fvals = geo_re.eval_basis(ref_pts);
    auto fgrads = geo_re.eval_dbasis(ref_pts);
    auto& fd = g.face[f];
    fd.x = fvals * coords;
    fd.normal.resize(nfq, 2);
    fd.w.resize(nfq);
    const Eigen::Vector2d tan_ref = re.face_tangent[f];
    for (Eigen::Index k = 0; k < nfq; ++k) {
      Eigen::Vector2d dxi(fgrads[0].row(k) * coords.col(0), fgrads[0].row(k) * coords.col(1));
      Eigen::Vector2d deta(fgrads[1].row(k) * coords.col(0), fgrads[1].row(k) * coords.col(1));
      Eigen::Vector2d T = dxi * tan_ref(0) + deta * tan_ref(1);
      double len = T.norm();
      fd.w(k) = re.fq_weights(k) * len;
      fd.normal.row(k) = Eigen::Vector2d(T(1), -T(0)).transpose() / len;
    }
  }
  return g;
}

void physical_gradients(const ReferenceElement& re, const ElementGeometry& g,
                        Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) {
  gx = g.jinv_t[0].asDiagonal() * re.dbasis_q[0] + g.jinv_t[1].asDiagonal() * re.dbasis_q[1];
  gy = g.jinv_t[2].asDiagonal() * re.dbasis_q[0] + g.jinv_t[3].asDiagonal() * re.dbasis_q[1];
}

} // namespace mahdg
