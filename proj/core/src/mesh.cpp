#include "mahdg/mesh.hpp"

#include "mahdg/errors.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mahdg {

namespace {

// Registers the faces of every element; the first element seen becomes the
// owner and fixes the face-global traversal.
void extract_faces(Mesh& mesh, const ReferenceElement& geo_re) {
  std::map<std::pair<int, int>, int> seen; // sorted vertex pair -> face id
  const int nf = mesh.faces_per_elem();
  mesh.elem_faces.assign(mesh.num_elements(), {-1, -1, -1, -1});
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int f = 0; f < nf; ++f) {
      int va = mesh.elem_nodes[e][geo_re.face_node_ids[f].front()];
      int vb = mesh.elem_nodes[e][geo_re.face_node_ids[f].back()];
      auto key = std::minmax(va, vb);
      auto it = seen.find(key);
      if (it == seen.end()) {
        Face face;
        face.vertices = {va, vb};
        face.owner = e;
        face.owner_local = f;
        mesh.faces.push_back(face);
        seen.emplace(key, static_cast<int>(mesh.faces.size()) - 1);
        mesh.elem_faces[e][f] = static_cast<int>(mesh.faces.size()) - 1;
      } else {
        Face& face = mesh.faces[it->second];
        face.neighbor = e;
        face.neighbor_local = f;
        mesh.elem_faces[e][f] = it->second;
      }
    }
  }
}

} // namespace

Mesh build_square_mesh(int n, ElemKind kind, const Box& box) {
  if (n < 1) throw std::invalid_argument("build_square_mesh: n must be >= 1");
  if (box.width() <= 0 || box.height() <= 0)
    throw std::invalid_argument("build_square_mesh: box must have positive area");

  Mesh mesh;
  mesh.elem_kind = kind;
  mesh.geometric_degree = 1;
  const ReferenceElement& geo_re = make_reference_element(kind, 1);

  mesh.node_coords.resize((n + 1) * (n + 1), 2);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.node_coords.row(j * (n + 1) + i) << box.x0 + box.width() * i / n,
          box.y0 + box.height() * j / n;

  auto vid = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (kind == ElemKind::quadrilateral) {
        // tensor-product reference layout: (0,0), (1,0), (0,1), (1,1)
        mesh.elem_nodes.push_back({a, b, d, c});
      } else {
        mesh.elem_nodes.push_back({a, b, c});
        mesh.elem_nodes.push_back({a, c, d});
      }
    }
  }

  extract_faces(mesh, geo_re);

  // boundary tags from the structured layout
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int cell = j * n + i;
      if (kind == ElemKind::quadrilateral) {
        if (j == 0) mesh.faces[mesh.elem_faces[cell][0]].boundary = boundary_tag::square_bottom;
        if (i == n - 1) mesh.faces[mesh.elem_faces[cell][1]].boundary = boundary_tag::square_right;
        if (j == n - 1) mesh.faces[mesh.elem_faces[cell][2]].boundary = boundary_tag::square_top;
        if (i == 0) mesh.faces[mesh.elem_faces[cell][3]].boundary = boundary_tag::square_left;
      } else {
        int lower = 2 * cell, upper = 2 * cell + 1;
        if (j == 0) mesh.faces[mesh.elem_faces[lower][0]].boundary = boundary_tag::square_bottom;
        if (i == n - 1) mesh.faces[mesh.elem_faces[lower][1]].boundary = boundary_tag::square_right;
        if (j == n - 1) mesh.faces[mesh.elem_faces[upper][1]].boundary = boundary_tag::square_top;
        if (i == 0) mesh.faces[mesh.elem_faces[upper][2]].boundary = boundary_tag::square_left;
      }
    }
  }
  return mesh;
}

Mesh build_cylinder_mesh(int n_r, int n_t, int geometric_degree) {
  if (n_r < 1 || n_t < 1)
    throw std::invalid_argument("build_cylinder_mesh: sizes must be >= 1");
  if (geometric_degree < 1)
    throw std::invalid_argument("build_cylinder_mesh: geometric_degree must be >= 1");

  Mesh mesh;
  mesh.elem_kind = ElemKind::quadrilateral;
  mesh.geometric_degree = geometric_degree;
  const int g = geometric_degree;
  const ReferenceElement& geo_re = make_reference_element(ElemKind::quadrilateral, g);
  const Eigen::VectorXd& gll = geo_re.face_nodes_1d;

  // Blend between circle and ellipse at equal angle parameter.
  auto point = [](double rho, double theta) {
    Eigen::Vector2d inner(std::cos(theta), std::sin(theta));
    Eigen::Vector2d outer(2.0 * std::cos(theta), 4.0 * std::sin(theta));
    return ((1.0 - rho) * inner + rho * outer).eval();
  };

  const int nI = n_r * g + 1, nJ = n_t * g + 1;
  mesh.node_coords.resize(nI * nJ, 2);
  auto param = [&](int gi, int n_cells) {
    int cell = std::min(gi / g, n_cells - 1);
    int sub = gi - cell * g;
    return (cell + gll(sub)) / n_cells;
  };
  for (int J = 0; J < nJ; ++J) {
    double theta = M_PI / 2.0 + M_PI * param(J, n_t);
    for (int I = 0; I < nI; ++I) {
      double rho = param(I, n_r);
      mesh.node_coords.row(J * nI + I) = point(rho, theta).transpose();
    }
  }

  auto nid = [&](int I, int J) { return J * nI + I; };
  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < n_r; ++i) {
      std::vector<int> nodes(geo_re.num_nodes);
      for (int b = 0; b <= g; ++b)
        for (int a = 0; a <= g; ++a)
          nodes[b * (g + 1) + a] = nid(i * g + a, j * g + b);
      mesh.elem_nodes.push_back(std::move(nodes));
    }
  }

  extract_faces(mesh, geo_re);

  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < n_r; ++i) {
      int cell = j * n_r + i;
      if (j == 0) mesh.faces[mesh.elem_faces[cell][0]].boundary = boundary_tag::cut;
      if (i == n_r - 1) mesh.faces[mesh.elem_faces[cell][1]].boundary = boundary_tag::ellipse;
      if (j == n_t - 1) mesh.faces[mesh.elem_faces[cell][2]].boundary = boundary_tag::cut;
      if (i == 0) mesh.faces[mesh.elem_faces[cell][3]].boundary = boundary_tag::circle;
    }
  }
  return mesh;
}

FaceGeometry face_geometry(const Mesh& mesh, int face, FaceSide side,
                           const ReferenceElement& re) {
  const Face& f = mesh.faces[face];
  if (side == FaceSide::neighbor && !f.interior())
    throw std::invalid_argument("face_geometry: boundary face has no neighbor side");
  const int elem = (side == FaceSide::owner) ? f.owner : f.neighbor;
  const int lf = (side == FaceSide::owner) ? f.owner_local : f.neighbor_local;
  const ReferenceElement& geo_re =
      make_reference_element(mesh.elem_kind, mesh.geometric_degree);

  const Eigen::VectorXd& tq = re.fq_points;
  const Eigen::Index nq = tq.size();
  FaceGeometry out;
  out.points.resize(nq, 2);
  out.normals.resize(nq, 2);
  out.sjac.resize(nq);
  out.weights.resize(nq);

  Eigen::MatrixXd coords(geo_re.num_nodes, 2);
  for (int i = 0; i < geo_re.num_nodes; ++i)
    coords.row(i) = mesh.node_coords.row(mesh.elem_nodes[elem][i]);

  Eigen::MatrixXd ref_pts(nq, 2);
  for (Eigen::Index k = 0; k < nq; ++k) {
    // neighbor traverses the face backwards
    double t = (side == FaceSide::owner) ? tq(k) : 1.0 - tq(k);
    ref_pts.row(k) = geo_re.face_point(lf, t).transpose();
  }
  Eigen::MatrixXd vals = geo_re.eval_basis(ref_pts);
  auto grads = geo_re.eval_dbasis(ref_pts);
  out.points = vals * coords;
  const Eigen::Vector2d tan_ref = geo_re.face_tangent[lf];
  for (Eigen::Index k = 0; k < nq; ++k) {
    Eigen::Vector2d dxi(grads[0].row(k) * coords.col(0), grads[0].row(k) * coords.col(1));
    Eigen::Vector2d deta(grads[1].row(k) * coords.col(0), grads[1].row(k) * coords.col(1));
    // physical tangent along the local traversal direction; its norm is
    // invariant under the neighbor's parameter reversal
    Eigen::Vector2d T = dxi * tan_ref(0) + deta * tan_ref(1);
    double len = T.norm();
    out.sjac(k) = len;
    out.weights(k) = re.fq_weights(k) * len;
    // outward normal for counterclockwise element traversal
    out.normals.row(k) = Eigen::Vector2d(T(1), -T(0)).transpose() / len;
  }
  return out;
}

double mesh_area(const Mesh& mesh, const ReferenceElement& re) {
  const ReferenceElement& geo_re =
      make_reference_element(mesh.elem_kind, mesh.geometric_degree);
  auto grads = geo_re.eval_dbasis(re.qpoints);
  double area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::MatrixXd coords(geo_re.num_nodes, 2);
    for (int i = 0; i < geo_re.num_nodes; ++i)
      coords.row(i) = mesh.node_coords.row(mesh.elem_nodes[e][i]);
    for (Eigen::Index k = 0; k < re.qpoints.rows(); ++k) {
      double xs = grads[0].row(k) * coords.col(0), ys = grads[0].row(k) * coords.col(1);
      double xt = grads[1].row(k) * coords.col(0), yt = grads[1].row(k) * coords.col(1);
      area += re.qweights(k) * (xs * yt - xt * ys);
    }
  }
  return area;
}

namespace {
int uf_find(std::vector<int>& parent, int a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}
} // namespace

NodalNumbering build_nodal_numbering(const Mesh& mesh, const ReferenceElement& re) {
  const int np = re.num_nodes;
  const int total = mesh.num_elements() * np;
  std::vector<int> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto unite = [&](int a, int b) {
    int ra = uf_find(parent, a), rb = uf_find(parent, b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  };

  const int nfp = re.nodes_per_face;
  for (const Face& f : mesh.faces) {
    if (!f.interior()) continue;
    const auto& own = re.face_node_ids[f.owner_local];
    const auto& nbr = re.face_node_ids[f.neighbor_local];
    for (int k = 0; k < nfp; ++k)
      unite(f.owner * np + own[k], f.neighbor * np + nbr[nfp - 1 - k]);
  }

  NodalNumbering num;
  num.elem_to_global.assign(mesh.num_elements(), std::vector<int>(np, -1));
  std::vector<int> root_to_global(total, -1);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int i = 0; i < np; ++i) {
      int r = uf_find(parent, e * np + i);
      if (root_to_global[r] < 0) {
        root_to_global[r] = num.num_global++;
        num.multiplicity.push_back(0);
      }
      num.elem_to_global[e][i] = root_to_global[r];
      ++num.multiplicity[root_to_global[r]];
    }
  }
  return num;
}

} // namespace mahdg
