#include "mahdg/state.hpp"

#include <cmath>

namespace mahdg {

HdgDiscretization::HdgDiscretization(const Mesh& mesh, int p)
    : mesh_(&mesh), re_(&make_reference_element(mesh.elem_kind, p)) {
  const int ne = mesh.num_elements();
  const int nf = mesh.faces_per_elem();
  flipped_.assign(ne, {false, false, false, false});
  for (int e = 0; e < ne; ++e)
    for (int f = 0; f < nf; ++f)
      flipped_[e][f] = (mesh.faces[mesh.elem_faces[e][f]].neighbor == e);
  geom_.reserve(ne);
  for (int e = 0; e < ne; ++e)
    geom_.push_back(compute_element_geometry(mesh, e, *re_, flipped_[e]));
}

Eigen::MatrixXd HdgDiscretization::face_trace_basis(int e, int f) const {
  if (flipped_[e][f]) return re_->face_basis[f].colwise().reverse();
  return re_->face_basis[f];
}

Eigen::MatrixXd HdgDiscretization::elem_node_coords(int e) const {
  const ReferenceElement& geo_re =
      make_reference_element(mesh_->elem_kind, mesh_->geometric_degree);
  Eigen::MatrixXd coords(geo_re.num_nodes, 2);
  for (int i = 0; i < geo_re.num_nodes; ++i)
    coords.row(i) = mesh_->node_coords.row(mesh_->elem_nodes[e][i]);
  if (mesh_->geometric_degree == re_->degree) return coords;
  return geo_re.eval_basis(re_->nodes) * coords;
}

Eigen::MatrixXd HdgDiscretization::face_node_coords(int f) const {
  const Face& face = mesh_->faces[f];
  const ReferenceElement& geo_re =
      make_reference_element(mesh_->elem_kind, mesh_->geometric_degree);
  Eigen::MatrixXd coords(geo_re.num_nodes, 2);
  for (int i = 0; i < geo_re.num_nodes; ++i)
    coords.row(i) = mesh_->node_coords.row(mesh_->elem_nodes[face.owner][i]);
  Eigen::MatrixXd ref_pts(re_->nodes_per_face, 2);
  for (int a = 0; a < re_->nodes_per_face; ++a)
    ref_pts.row(a) =
        geo_re.face_point(face.owner_local, re_->face_nodes_1d(a)).transpose();
  return geo_re.eval_basis(ref_pts) * coords;
}

FieldState FieldState::zero(const HdgDiscretization& d) {
  FieldState s;
  s.H = Eigen::VectorXd::Zero(4 * d.np() * d.num_elements());
  s.q = Eigen::VectorXd::Zero(2 * d.np() * d.num_elements());
  s.u = Eigen::VectorXd::Zero(d.np() * d.num_elements());
  s.u_hat = Eigen::VectorXd::Zero(d.trace_size());
  return s;
}

Eigen::VectorXd FieldState::interior(const HdgDiscretization& d, int e) const {
  const int np = d.np();
  Eigen::VectorXd v(7 * np);
  v.segment(0, 4 * np) = H.segment(e * 4 * np, 4 * np);
  v.segment(4 * np, 2 * np) = q.segment(e * 2 * np, 2 * np);
  v.segment(6 * np, np) = u.segment(e * np, np);
  return v;
}

void FieldState::add_interior(const HdgDiscretization& d, int e,
                              const Eigen::VectorXd& delta, double alpha) {
  const int np = d.np();
  H.segment(e * 4 * np, 4 * np) += alpha * delta.segment(0, 4 * np);
  q.segment(e * 2 * np, 2 * np) += alpha * delta.segment(4 * np, 2 * np);
  u.segment(e * np, np) += alpha * delta.segment(6 * np, np);
}

bool FieldState::all_finite() const {
  return H.allFinite() && q.allFinite() && u.allFinite() && u_hat.allFinite();
}

FieldState interpolate_state(const HdgDiscretization& d,
                             const std::function<double(double, double)>& u,
                             const std::function<Eigen::Vector2d(double, double)>& grad_u,
                             const std::function<Eigen::Matrix2d(double, double)>& hess_u) {
  FieldState s = FieldState::zero(d);
  const int np = d.np();
  for (int e = 0; e < d.num_elements(); ++e) {
    Eigen::MatrixXd x = d.elem_node_coords(e);
    for (int i = 0; i < np; ++i) {
      double px = x(i, 0), py = x(i, 1);
      s.u(e * np + i) = u(px, py);
      Eigen::Vector2d g = grad_u(px, py);
      s.q(e * 2 * np + i) = g(0);
      s.q(e * 2 * np + np + i) = g(1);
      Eigen::Matrix2d h = hess_u(px, py);
      s.H(e * 4 * np + 0 * np + i) = h(0, 0);
      s.H(e * 4 * np + 1 * np + i) = h(0, 1);
      s.H(e * 4 * np + 2 * np + i) = h(1, 0);
      s.H(e * 4 * np + 3 * np + i) = h(1, 1);
    }
  }
  const int nfp = d.nfp();
  for (int f = 0; f < d.num_faces(); ++f) {
    Eigen::MatrixXd x = d.face_node_coords(f);
    for (int a = 0; a < nfp; ++a) s.u_hat(f * nfp + a) = u(x(a, 0), x(a, 1));
  }
  return s;
}

FieldState initial_state(const HdgDiscretization& d) {
  return interpolate_state(
      d, [](double x, double y) { return 0.5 * (x * x + y * y); },
      [](double x, double y) { return Eigen::Vector2d(x, y); },
      [](double, double) { return Eigen::Matrix2d::Identity(); });
}

} // namespace mahdg
