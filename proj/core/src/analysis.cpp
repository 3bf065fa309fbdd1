#include "mahdg/analysis.hpp"

#include "mahdg/errors.hpp"

#include <cmath>
#include <limits>

namespace mahdg {

ErrorReport l2_error(const HdgDiscretization& d, const FieldState& s,
                     const DirichletMAProblem& exact) {
  if (!exact.has_exact())
    throw std::invalid_argument("l2_error: problem has no exact solution");
  const ReferenceElement& re = d.ref();
  const int np = d.np();
  const auto& V = re.basis_q;
  double eu = 0.0, eq = 0.0, eH = 0.0;
  for (int e = 0; e < d.num_elements(); ++e) {
    const auto& g = d.geom(e);
    Eigen::VectorXd uh = V * s.u.segment(e * np, np);
    std::array<Eigen::VectorXd, 2> qh;
    for (int i = 0; i < 2; ++i) qh[i] = V * s.q.segment(e * 2 * np + i * np, np);
    std::array<Eigen::VectorXd, 4> Hh;
    for (int c = 0; c < 4; ++c) Hh[c] = V * s.H.segment(e * 4 * np + c * np, np);
    for (Eigen::Index k = 0; k < V.rows(); ++k) {
      double x = g.xq(k, 0), y = g.xq(k, 1), w = g.wq(k);
      eu += w * std::pow(uh(k) - exact.exact_u(x, y), 2);
      Eigen::Vector2d qe = exact.exact_grad(x, y);
      eq += w * (std::pow(qh[0](k) - qe(0), 2) + std::pow(qh[1](k) - qe(1), 2));
      Eigen::Matrix2d He = exact.exact_hess(x, y);
      eH += w * (std::pow(Hh[0](k) - He(0, 0), 2) + std::pow(Hh[1](k) - He(0, 1), 2) +
                 std::pow(Hh[2](k) - He(1, 0), 2) + std::pow(Hh[3](k) - He(1, 1), 2));
    }
  }
  ErrorReport rep;
  rep.err_u = std::sqrt(eu);
  rep.err_q = std::sqrt(eq);
  rep.err_H = std::sqrt(eH);
  rep.p = d.degree();
  return rep;
}

double convergence_order(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log2(e_coarse / e_fine);
}

AdaptedMesh extract_adapted_mesh(const HdgDiscretization& d, const FieldState& s,
                                 const OTProblem& pb) {
  const Mesh& bg = d.mesh();
  const ReferenceElement& re = d.ref();
  const int np = d.np();
  NodalNumbering num = build_nodal_numbering(bg, re);

  AdaptedMesh out;
  out.multiplicity = num.multiplicity;

  // q coefficients are nodal values; average shared nodes
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(num.num_global, 2);
  for (int e = 0; e < bg.num_elements(); ++e) {
    for (int i = 0; i < np; ++i) {
      int gid = num.elem_to_global[e][i];
      coords(gid, 0) += s.q(e * 2 * np + i);
      coords(gid, 1) += s.q(e * 2 * np + np + i);
    }
  }
  for (int gid = 0; gid < num.num_global; ++gid)
    coords.row(gid) /= static_cast<double>(num.multiplicity[gid]);

  for (int e = 0; e < bg.num_elements(); ++e) {
    for (int i = 0; i < np; ++i) {
      int gid = num.elem_to_global[e][i];
      double dx = coords(gid, 0) - s.q(e * 2 * np + i);
      double dy = coords(gid, 1) - s.q(e * 2 * np + np + i);
      out.max_disagreement = std::max(out.max_disagreement, std::hypot(dx, dy));
    }
  }

  Mesh& am = out.mesh;
  am.elem_kind = bg.elem_kind;
  am.geometric_degree = re.degree;
  am.node_coords = coords;
  am.elem_nodes.assign(bg.num_elements(), {});
  for (int e = 0; e < bg.num_elements(); ++e) am.elem_nodes[e] = num.elem_to_global[e];
  am.elem_faces = bg.elem_faces;
  am.faces = bg.faces;
  for (Face& f : am.faces) {
    f.vertices[0] = num.elem_to_global[f.owner][re.face_node_ids[f.owner_local].front()];
    f.vertices[1] = num.elem_to_global[f.owner][re.face_node_ids[f.owner_local].back()];
  }

  // validity: positive isoparametric Jacobian everywhere
  std::vector<int> tangled;
  for (int e = 0; e < am.num_elements(); ++e) {
    std::array<bool, 4> flip{};
    for (int f = 0; f < am.faces_per_elem(); ++f)
      flip[f] = (am.faces[am.elem_faces[e][f]].neighbor == e);
    try {
      compute_element_geometry(am, e, re, flip);
    } catch (const EvaluationError&) {
      tangled.push_back(e);
    }
  }
  if (!tangled.empty())
    throw TangledMeshError("extract_adapted_mesh: nonpositive adapted Jacobian",
                           std::move(tangled));

  for (const Face& f : am.faces) {
    if (f.interior()) continue;
    for (int k : re.face_node_ids[f.owner_local]) {
      Eigen::Vector2d qn = am.node_coords.row(am.elem_nodes[f.owner][k]).transpose();
      double gv = boundary_g(pb, f.boundary, qn).first;
      out.boundary_residual = std::max(out.boundary_residual, std::abs(gv));
    }
  }
  return out;
}

double equidistribution_residual(const HdgDiscretization& d, const FieldState& s,
                                 const OTProblem& pb) {
  const ReferenceElement& re = d.ref();
  const int np = d.np();
  const auto& V = re.basis_q;
  double sq = 0.0;
  for (int e = 0; e < d.num_elements(); ++e) {
    const auto& g = d.geom(e);
    std::array<Eigen::VectorXd, 4> Hh;
    for (int c = 0; c < 4; ++c) Hh[c] = V * s.H.segment(e * 4 * np + c * np, np);
    std::array<Eigen::VectorXd, 2> qh;
    for (int i = 0; i < 2; ++i) qh[i] = V * s.q.segment(e * 2 * np + i * np, np);
    for (Eigen::Index k = 0; k < V.rows(); ++k) {
      double det = Hh[0](k) * Hh[3](k) - Hh[1](k) * Hh[2](k);
      double rho = density_eval(pb.density, qh[0](k), qh[1](k));
      sq += g.wq(k) * std::pow(rho * det - pb.theta, 2);
    }
  }
  return std::sqrt(sq);
}

std::vector<double> element_areas(const Mesh& mesh, const ReferenceElement& re) {
  const ReferenceElement& geo_re =
      make_reference_element(mesh.elem_kind, mesh.geometric_degree);
  auto grads = geo_re.eval_dbasis(re.qpoints);
  std::vector<double> areas(mesh.num_elements(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::MatrixXd coords(geo_re.num_nodes, 2);
    for (int i = 0; i < geo_re.num_nodes; ++i)
      coords.row(i) = mesh.node_coords.row(mesh.elem_nodes[e][i]);
    for (Eigen::Index k = 0; k < re.qpoints.rows(); ++k) {
      double xs = grads[0].row(k) * coords.col(0), ys = grads[0].row(k) * coords.col(1);
      double xt = grads[1].row(k) * coords.col(0), yt = grads[1].row(k) * coords.col(1);
      areas[e] += re.qweights(k) * (xs * yt - xt * ys);
    }
  }
  return areas;
}

} // namespace mahdg
