#include <doctest.h>

#include "mahdg/reference_element.hpp"

#include <cmath>

using namespace mahdg;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Exact integral of x^a y^b over the unit right triangle.
double tri_monomial(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

} // namespace

TEST_CASE("basic counts") {
  const auto& tri1 = make_reference_element(ElemKind::triangle, 1);
  CHECK(tri1.num_nodes == 3);
  CHECK(tri1.num_faces == 3);
  CHECK(tri1.nodes_per_face == 2);
  const auto& quad3 = make_reference_element(ElemKind::quadrilateral, 3);
  CHECK(quad3.num_nodes == 16);
  CHECK(quad3.num_faces == 4);
}

TEST_CASE("unsupported degree rejected") {
  CHECK_THROWS_AS(make_reference_element(ElemKind::triangle, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_reference_element(ElemKind::quadrilateral, 9), std::invalid_argument);
}

TEST_CASE("nodal basis is a Kronecker delta") {
  for (auto kind : {ElemKind::triangle, ElemKind::quadrilateral}) {
    for (int p = 1; p <= 8; ++p) {
      const auto& re = make_reference_element(kind, p);
      Eigen::MatrixXd vals = re.eval_basis(re.nodes);
      double err = (vals - Eigen::MatrixXd::Identity(re.num_nodes, re.num_nodes))
                       .cwiseAbs()
                       .maxCoeff();
      CAPTURE(p);
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("partition of unity at quadrature points") {
  for (auto kind : {ElemKind::triangle, ElemKind::quadrilateral}) {
    for (int p = 1; p <= 8; ++p) {
      const auto& re = make_reference_element(kind, p);
      Eigen::VectorXd sums = re.basis_q.rowwise().sum();
      CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-12);
      // gradients of the constant must vanish
      CHECK(re.dbasis_q[0].rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
      CHECK(re.dbasis_q[1].rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("element quadrature integrates total degree <= 2p+1") {
  for (int p = 1; p <= 8; ++p) {
    const auto& re = make_reference_element(ElemKind::triangle, p);
    for (int a = 0; a <= 2 * p + 1; ++a) {
      for (int b = 0; a + b <= 2 * p + 1; ++b) {
        double q = 0.0;
        for (Eigen::Index k = 0; k < re.qweights.size(); ++k)
          q += re.qweights(k) * std::pow(re.qpoints(k, 0), a) * std::pow(re.qpoints(k, 1), b);
        CAPTURE(p);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(q == doctest::Approx(tri_monomial(a, b)).epsilon(1e-12));
      }
    }
  }
  for (int p = 1; p <= 8; ++p) {
    const auto& re = make_reference_element(ElemKind::quadrilateral, p);
    for (int a = 0; a <= 2 * p + 1; ++a) {
      for (int b = 0; a + b <= 2 * p + 1; ++b) {
        double q = 0.0;
        for (Eigen::Index k = 0; k < re.qweights.size(); ++k)
          q += re.qweights(k) * std::pow(re.qpoints(k, 0), a) * std::pow(re.qpoints(k, 1), b);
        CHECK(q == doctest::Approx(1.0 / ((a + 1.0) * (b + 1.0))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("x^2 y over the reference triangle equals 1/60") {
  const auto& re = make_reference_element(ElemKind::triangle, 2);
  double q = 0.0;
  for (Eigen::Index k = 0; k < re.qweights.size(); ++k)
    q += re.qweights(k) * re.qpoints(k, 0) * re.qpoints(k, 0) * re.qpoints(k, 1);
  CHECK(q == doctest::Approx(1.0 / 60.0).epsilon(1e-13));
}

TEST_CASE("face quadrature integrates 1D degree <= 2p+1") {
  for (int p = 1; p <= 8; ++p) {
    const auto& re = make_reference_element(ElemKind::triangle, p);
    for (int a = 0; a <= 2 * p + 1; ++a) {
      double q = 0.0;
      for (Eigen::Index k = 0; k < re.fq_weights.size(); ++k)
        q += re.fq_weights(k) * std::pow(re.fq_points(k), a);
      CHECK(q == doctest::Approx(1.0 / (a + 1.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("trace space is nodal at its Gauss-Lobatto points") {
  for (int p = 1; p <= 6; ++p) {
    const auto& re = make_reference_element(ElemKind::quadrilateral, p);
    double err = (re.trace_basis_nodes -
                  Eigen::MatrixXd::Identity(p + 1, p + 1)).cwiseAbs().maxCoeff();
    CHECK(err < 1e-12);
  }
}

TEST_CASE("face node lists run along the faces") {
  for (auto kind : {ElemKind::triangle, ElemKind::quadrilateral}) {
    for (int p : {1, 3, 5}) {
      const auto& re = make_reference_element(kind, p);
      for (int f = 0; f < re.num_faces; ++f) {
        REQUIRE(static_cast<int>(re.face_node_ids[f].size()) == p + 1);
        // endpoints must land on the face's start and end points
        Eigen::Vector2d start = re.face_point(f, 0.0);
        Eigen::Vector2d end = re.face_point(f, 1.0);
        CHECK((re.nodes.row(re.face_node_ids[f].front()).transpose() - start).norm() < 1e-13);
        CHECK((re.nodes.row(re.face_node_ids[f].back()).transpose() - end).norm() < 1e-13);
      }
    }
  }
}

TEST_CASE("mass matrix is symmetric positive definite") {
  for (auto kind : {ElemKind::triangle, ElemKind::quadrilateral}) {
    for (int p : {1, 2, 4, 8}) {
      const auto& re = make_reference_element(kind, p);
      Eigen::MatrixXd M =
          re.basis_q.transpose() * re.qweights.asDiagonal() * re.basis_q;
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-13);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("gauss rules are exact and ascending") {
  for (int n = 1; n <= 10; ++n) {
    Quadrature1D q = gauss_legendre(n);
    for (int a = 0; a <= 2 * n - 1; ++a) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += q.weights(k) * std::pow(q.points(k), a);
      CHECK(v == doctest::Approx(1.0 / (a + 1.0)).epsilon(1e-13));
    }
    for (int k = 1; k < n; ++k) CHECK(q.points(k) > q.points(k - 1));
  }
  Eigen::VectorXd gll = gauss_lobatto_points(5);
  CHECK(gll(0) == 0.0);
  CHECK(gll(4) == 1.0);
  CHECK(std::abs(gll(2) - 0.5) < 1e-14);
}
