#include <doctest.h>

#include "mahdg/mesh.hpp"

#include <cmath>

using namespace mahdg;

namespace {

int count_boundary(const Mesh& m) {
  int n = 0;
  for (const auto& f : m.faces)
    if (!f.interior()) ++n;
  return n;
}

} // namespace

TEST_CASE("single quad cell") {
  Mesh m = build_square_mesh(1, ElemKind::quadrilateral, {0, 0, 1, 1});
  CHECK(m.num_elements() == 1);
  CHECK(m.num_faces() == 4);
  CHECK(count_boundary(m) == 4);
}

TEST_CASE("2x2 triangulation counts") {
  Mesh m = build_square_mesh(2, ElemKind::triangle, {0, 0, 1, 1});
  CHECK(m.num_elements() == 8);
  CHECK(count_boundary(m) == 8);
  CHECK(m.num_faces() - count_boundary(m) == 8);
}

TEST_CASE("50x50 centered triangulation") {
  Mesh m = build_square_mesh(50, ElemKind::triangle, {-0.5, -0.5, 0.5, 0.5});
  CHECK(m.num_elements() == 5000);
}

TEST_CASE("invalid sizes rejected") {
  CHECK_THROWS_AS(build_square_mesh(0, ElemKind::triangle, {0, 0, 1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_square_mesh(2, ElemKind::triangle, {0, 0, 0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_cylinder_mesh(0, 1, 1), std::invalid_argument);
}

TEST_CASE("interior faces have two sides, boundary faces a tag") {
  for (auto kind : {ElemKind::triangle, ElemKind::quadrilateral}) {
    Mesh m = build_square_mesh(3, kind, {0, 0, 1, 1});
    for (const auto& f : m.faces) {
      if (f.interior()) {
        CHECK(f.owner >= 0);
        CHECK(f.neighbor >= 0);
        CHECK(f.boundary == boundary_tag::none);
      } else {
        CHECK(f.owner >= 0);
        CHECK(f.boundary != boundary_tag::none);
      }
    }
  }
}

TEST_CASE("square boundary tags match coordinates") {
  Mesh m = build_square_mesh(4, ElemKind::triangle, {-0.5, -0.5, 0.5, 0.5});
  const auto& re = make_reference_element(ElemKind::triangle, 2);
  for (int fi = 0; fi < m.num_faces(); ++fi) {
    const Face& f = m.faces[fi];
    if (f.interior()) continue;
    FaceGeometry fg = face_geometry(m, fi, FaceSide::owner, re);
    for (Eigen::Index k = 0; k < fg.points.rows(); ++k) {
      switch (f.boundary) {
        case boundary_tag::square_left: CHECK(fg.points(k, 0) == doctest::Approx(-0.5)); break;
        case boundary_tag::square_right: CHECK(fg.points(k, 0) == doctest::Approx(0.5)); break;
        case boundary_tag::square_bottom: CHECK(fg.points(k, 1) == doctest::Approx(-0.5)); break;
        case boundary_tag::square_top: CHECK(fg.points(k, 1) == doctest::Approx(0.5)); break;
        default: FAIL("unexpected tag");
      }
    }
  }
}

TEST_CASE("cylinder corner placement and counts") {
  Mesh m1 = build_cylinder_mesh(1, 1, 1);
  CHECK(m1.num_elements() == 1);
  REQUIRE(m1.num_nodes() == 4);
  // corners lie on the circle (inner) and ellipse (outer) at theta = pi/2, 3pi/2
  int on_circle = 0, on_ellipse = 0;
  for (int i = 0; i < 4; ++i) {
    double x = m1.node_coords(i, 0), y = m1.node_coords(i, 1);
    if (std::abs(x * x + y * y - 1.0) < 1e-12) ++on_circle;
    if (std::abs(x * x / 4.0 + y * y / 16.0 - 1.0) < 1e-12) ++on_ellipse;
  }
  CHECK(on_circle == 2);
  CHECK(on_ellipse == 2);

  Mesh m2 = build_cylinder_mesh(40, 60, 4);
  CHECK(m2.num_elements() == 2400);
}

TEST_CASE("cylinder inner boundary nodes sit on the circle") {
  Mesh m = build_cylinder_mesh(2, 4, 2);
  const auto& geo_re = make_reference_element(ElemKind::quadrilateral, 2);
  for (const Face& f : m.faces) {
    if (f.boundary != boundary_tag::circle) continue;
    for (int local : geo_re.face_node_ids[f.owner_local]) {
      Eigen::Vector2d x = m.node_coords.row(m.elem_nodes[f.owner][local]).transpose();
      CHECK(std::abs(x.squaredNorm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("cylinder boundary tags cover all four components") {
  Mesh m = build_cylinder_mesh(3, 5, 2);
  int circle = 0, ellipse = 0, cut = 0;
  for (const Face& f : m.faces) {
    if (f.interior()) continue;
    if (f.boundary == boundary_tag::circle) ++circle;
    if (f.boundary == boundary_tag::ellipse) ++ellipse;
    if (f.boundary == boundary_tag::cut) ++cut;
  }
  CHECK(circle == 5);
  CHECK(ellipse == 5);
  CHECK(cut == 6);
}

TEST_CASE("face normals of the unit square") {
  Mesh m = build_square_mesh(1, ElemKind::quadrilateral, {0, 0, 1, 1});
  const auto& re = make_reference_element(ElemKind::quadrilateral, 2);
  for (int fi = 0; fi < m.num_faces(); ++fi) {
    const Face& f = m.faces[fi];
    FaceGeometry fg = face_geometry(m, fi, FaceSide::owner, re);
    Eigen::Vector2d expect;
    switch (f.boundary) {
      case boundary_tag::square_left: expect << -1, 0; break;
      case boundary_tag::square_right: expect << 1, 0; break;
      case boundary_tag::square_bottom: expect << 0, -1; break;
      case boundary_tag::square_top: expect << 0, 1; break;
      default: continue;
    }
    for (Eigen::Index k = 0; k < fg.normals.rows(); ++k)
      CHECK((fg.normals.row(k).transpose() - expect).norm() < 1e-13);
  }
}

TEST_CASE("triangle diagonal face normal") {
  Mesh m = build_square_mesh(1, ElemKind::triangle, {0, 0, 1, 1});
  const auto& re = make_reference_element(ElemKind::triangle, 1);
  bool found = false;
  for (int fi = 0; fi < m.num_faces(); ++fi) {
    if (!m.faces[fi].interior()) continue;
    found = true;
    FaceGeometry fg = face_geometry(m, fi, FaceSide::owner, re);
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < fg.normals.rows(); ++k) {
      CHECK(std::abs(std::abs(fg.normals(k, 0)) - r) < 1e-13);
      CHECK(std::abs(std::abs(fg.normals(k, 1)) - r) < 1e-13);
      CHECK(fg.normals(k, 0) * fg.normals(k, 1) < 0.0); // (+-1, -+1)/sqrt(2)
    }
  }
  CHECK(found);
}

TEST_CASE("interior faces: coincident points, opposite normals") {
  auto check_mesh = [](const Mesh& m, int p, double tol) {
    const auto& re = make_reference_element(m.elem_kind, p);
    for (int fi = 0; fi < m.num_faces(); ++fi) {
      if (!m.faces[fi].interior()) continue;
      FaceGeometry a = face_geometry(m, fi, FaceSide::owner, re);
      FaceGeometry b = face_geometry(m, fi, FaceSide::neighbor, re);
      CHECK((a.points - b.points).cwiseAbs().maxCoeff() < tol);
      CHECK((a.normals + b.normals).cwiseAbs().maxCoeff() < tol);
      CHECK((a.sjac - b.sjac).cwiseAbs().maxCoeff() < tol);
    }
  };
  check_mesh(build_square_mesh(3, ElemKind::triangle, {0, 0, 1, 1}), 3, 1e-12);
  check_mesh(build_square_mesh(3, ElemKind::quadrilateral, {-0.5, -0.5, 0.5, 0.5}), 2, 1e-12);
  check_mesh(build_cylinder_mesh(3, 4, 3), 3, 1e-12);
}

TEST_CASE("neighbor side of a boundary face is rejected") {
  Mesh m = build_square_mesh(1, ElemKind::quadrilateral, {0, 0, 1, 1});
  const auto& re = make_reference_element(ElemKind::quadrilateral, 1);
  CHECK_THROWS_AS(face_geometry(m, 0, FaceSide::neighbor, re), std::invalid_argument);
}

TEST_CASE("curved circle faces have radial normals") {
  Mesh m = build_cylinder_mesh(2, 60, 4);
  const auto& re = make_reference_element(ElemKind::quadrilateral, 4);
  for (int fi = 0; fi < m.num_faces(); ++fi) {
    const Face& f = m.faces[fi];
    if (f.boundary != boundary_tag::circle) continue;
    FaceGeometry fg = face_geometry(m, fi, FaceSide::owner, re);
    for (Eigen::Index k = 0; k < fg.points.rows(); ++k) {
      Eigen::Vector2d x = fg.points.row(k).transpose();
      Eigen::Vector2d radial = -x.normalized(); // outward from the annulus: toward center
      CHECK((fg.normals.row(k).transpose() - radial).norm() < 1e-10);
    }
  }
}

TEST_CASE("total area") {
  const auto& re3 = make_reference_element(ElemKind::triangle, 3);
  Mesh sq = build_square_mesh(7, ElemKind::triangle, {0, 0, 1, 1});
  CHECK(mesh_area(sq, re3) == doctest::Approx(1.0).epsilon(1e-12));

  const auto& req2 = make_reference_element(ElemKind::quadrilateral, 2);
  const auto& req4 = make_reference_element(ElemKind::quadrilateral, 4);
  double exact = M_PI * (2.0 * 4.0 - 1.0) / 2.0;
  double coarse = std::abs(mesh_area(build_cylinder_mesh(4, 6, 2), req2) - exact);
  double fine = std::abs(mesh_area(build_cylinder_mesh(8, 12, 4), req4) - exact);
  CHECK(fine < coarse);
  CHECK(fine / exact < 1e-6);
}

TEST_CASE("nodal numbering merges shared nodes") {
  Mesh m = build_square_mesh(2, ElemKind::quadrilateral, {0, 0, 1, 1});
  const auto& re = make_reference_element(ElemKind::quadrilateral, 3);
  NodalNumbering num = build_nodal_numbering(m, re);
  // 2x2 grid of degree-3 cells = global 7x7 lattice
  CHECK(num.num_global == 49);
  int shared = 0;
  for (int mult : num.multiplicity) {
    CHECK(mult >= 1);
    CHECK(mult <= 4);
    if (mult > 1) ++shared;
  }
  CHECK(shared == 13); // 2*7 - 1 lattice lines shared between cells

  Mesh t = build_square_mesh(2, ElemKind::triangle, {0, 0, 1, 1});
  const auto& ret = make_reference_element(ElemKind::triangle, 2);
  NodalNumbering numt = build_nodal_numbering(t, ret);
  CHECK(numt.num_global == 25); // global 5x5 lattice
}
