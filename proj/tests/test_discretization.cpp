#include <doctest.h>

#include "mahdg/discretization.hpp"
#include "mahdg/state.hpp"

#include <cmath>

using namespace mahdg;

TEST_CASE("gradients of a linear function on affine triangles") {
  Mesh m = build_square_mesh(3, ElemKind::triangle, {0, 0, 1, 1});
  HdgDiscretization d(m, 2);
  for (int e = 0; e < d.num_elements(); ++e) {
    Eigen::MatrixXd gx, gy;
    physical_gradients(d.ref(), d.geom(e), gx, gy);
    Eigen::VectorXd coeffs = d.elem_node_coords(e).col(0); // u = x nodally
    CHECK(((gx * coeffs).array() - 1.0).abs().maxCoeff() < 1e-13);
    CHECK((gy * coeffs).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("gradient of x^2 on quads is exact for p >= 2") {
  Mesh m = build_square_mesh(4, ElemKind::quadrilateral, {0, 0, 0.5, 0.5});
  HdgDiscretization d(m, 2);
  for (int e = 0; e < d.num_elements(); ++e) {
    Eigen::MatrixXd gx, gy;
    physical_gradients(d.ref(), d.geom(e), gx, gy);
    Eigen::MatrixXd x = d.elem_node_coords(e);
    Eigen::VectorXd coeffs = x.col(0).cwiseAbs2();
    Eigen::VectorXd expected = 2.0 * d.geom(e).xq.col(0);
    CHECK(((gx * coeffs) - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((gy * coeffs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("isoparametric consistency on the curved cylinder") {
  Mesh m = build_cylinder_mesh(3, 4, 4);
  HdgDiscretization d(m, 4);
  for (int e = 0; e < d.num_elements(); ++e) {
    Eigen::MatrixXd gx, gy;
    physical_gradients(d.ref(), d.geom(e), gx, gy);
    Eigen::VectorXd coeffs = d.elem_node_coords(e).col(0); // u = x
    CHECK(((gx * coeffs).array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK((gy * coeffs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("positive Jacobian everywhere") {
  Mesh m = build_cylinder_mesh(5, 7, 3);
  HdgDiscretization d(m, 3);
  for (int e = 0; e < d.num_elements(); ++e) CHECK(d.geom(e).detJ.minCoeff() > 0.0);
}

TEST_CASE("discrete integration by parts on affine elements") {
  for (auto kind : {ElemKind::triangle, ElemKind::quadrilateral}) {
    Mesh m = build_square_mesh(2, kind, {0, 0, 1, 1});
    for (int p : {1, 2, 3}) {
      HdgDiscretization d(m, p);
      const auto& re = d.ref();
      const int np = d.np();
      for (int e = 0; e < d.num_elements(); ++e) {
        Eigen::MatrixXd gx, gy;
        physical_gradients(re, d.geom(e), gx, gy);
        const auto& W = d.geom(e).wq;
        Eigen::MatrixXd Dx = gx.transpose() * W.asDiagonal() * re.basis_q;
        Eigen::MatrixXd bnd = Eigen::MatrixXd::Zero(np, np);
        for (int f = 0; f < d.faces_per_elem(); ++f) {
          Eigen::MatrixXd phi = d.face_trace_basis(e, f);
          const auto& fg = d.geom(e).face[f];
          bnd += phi.transpose() *
                 fg.w.cwiseProduct(fg.normal.col(0)).asDiagonal() * phi;
        }
        CHECK((Dx + Dx.transpose() - bnd).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("interpolated initial state") {
  Mesh m = build_square_mesh(2, ElemKind::triangle, {0, 0, 1, 1});
  HdgDiscretization d(m, 2);
  FieldState s = initial_state(d);
  CHECK(s.all_finite());
  // u coefficients are nodal values of (x^2+y^2)/2
  Eigen::MatrixXd x = d.elem_node_coords(0);
  for (int i = 0; i < d.np(); ++i) {
    double expect = 0.5 * (x(i, 0) * x(i, 0) + x(i, 1) * x(i, 1));
    CHECK(s.u(i) == doctest::Approx(expect).epsilon(1e-14));
  }
  // H is the identity everywhere
  CHECK((s.H.segment(0, d.np()).array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(s.H.segment(d.np(), d.np()).cwiseAbs().maxCoeff() < 1e-14);
}
