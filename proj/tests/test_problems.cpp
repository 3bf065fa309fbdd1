#include <doctest.h>

#include "mahdg/errors.hpp"
#include "mahdg/problems.hpp"

#include <cmath>
#include <random>

using namespace mahdg;

TEST_CASE("source_s values") {
  Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  CHECK(source_s(I, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(source_s(Eigen::Matrix2d::Zero(), 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  Eigen::Matrix2d H;
  H << 2, 1, 1, 3;
  CHECK(source_s(H, 0.5) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("source_s bounds and monotonicity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Eigen::Matrix2d H;
    H << U(rng), U(rng), U(rng), U(rng);
    double f = 0.1 + std::abs(U(rng));
    double s = source_s(H, f);
    CHECK(s >= std::sqrt(2.0 * f) - 1e-14);
    CHECK(s >= H.norm() - 1e-14);
    CHECK(source_s(H, f + 0.5) > s);
    Eigen::Matrix2d H2 = H;
    H2(0, 1) = H(0, 1) * 2.0;
    CHECK(source_s(H2, f) >= s - 1e-14);
  }
}

TEST_CASE("source_s rejects a negative radicand") {
  CHECK_THROWS_AS(source_s(Eigen::Matrix2d::Zero(), -1.0), EvaluationError);
}

TEST_CASE("ds_dH against finite differences") {
  Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d d = ds_dH(I, 1.0);
  CHECK(d(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d(0, 1) == 0.0);
  CHECK(ds_dH(Eigen::Matrix2d::Zero(), 3.0).norm() == 0.0);

  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::Matrix2d H;
    H << U(rng), U(rng), U(rng), U(rng);
    double f = 0.2 + std::abs(U(rng));
    Eigen::Matrix2d an = ds_dH(H, f);
    CHECK(an.norm() <= 1.0 + 1e-14);
    const double eps = 1e-6;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Eigen::Matrix2d Hp = H, Hm = H;
        Hp(i, j) += eps;
        Hm(i, j) -= eps;
        double fd = (source_s(Hp, f) - source_s(Hm, f)) / (2 * eps);
        CHECK(an(i, j) == doctest::Approx(fd).epsilon(1e-8));
      }
  }
}

TEST_CASE("density values") {
  DensityParams ring{DensityFamily::ring_bell, 5, 200, 0.25};
  CHECK(density_eval(ring, 0.25, 0.0) == doctest::Approx(6.0).epsilon(1e-14));
  DensityParams bell{DensityFamily::ring_bell, 20, 200, 0};
  CHECK(density_eval(bell, 0.0, 0.0) == doctest::Approx(21.0).epsilon(1e-14));
  DensityParams shock{DensityFamily::shock, 15, 15, 3};
  CHECK(density_eval(shock, 4.5, 0.0) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(density_eval({DensityFamily::uniform, 0, 0, 0}, 0.3, -0.2) == 1.0);
}

TEST_CASE("density gradient against finite differences") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (DensityParams dp : {DensityParams{DensityFamily::ring_bell, 5, 20, 0.25},
                           DensityParams{DensityFamily::shock, 3, 4, 3}}) {
    for (int t = 0; t < 30; ++t) {
      double x = U(rng), y = U(rng);
      if (dp.family == DensityFamily::shock) x += 1.5;
      Eigen::Vector2d an = density_grad(dp, x, y);
      const double eps = 1e-6;
      double fdx = (density_eval(dp, x + eps, y) - density_eval(dp, x - eps, y)) / (2 * eps);
      double fdy = (density_eval(dp, x, y + eps) - density_eval(dp, x, y - eps)) / (2 * eps);
      CHECK(an(0) == doctest::Approx(fdx).epsilon(1e-7));
      CHECK(an(1) == doctest::Approx(fdy).epsilon(1e-7));
    }
  }
}

TEST_CASE("ot_source_f") {
  OTProblem pb;
  pb.density = {DensityFamily::uniform, 0, 0, 0};
  pb.theta = 1.0;
  auto [f0, df0] = ot_source_f(pb, {0.3, -0.1});
  CHECK(f0 == 1.0);
  CHECK(df0.norm() == 0.0);

  pb.density = {DensityFamily::ring_bell, 5, 200, 0.25};
  auto [f1, df1] = ot_source_f(pb, {0.25, 0.0});
  CHECK(f1 == doctest::Approx(pb.theta / 6.0).epsilon(1e-14));

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> U(-0.4, 0.4);
  for (int t = 0; t < 30; ++t) {
    Eigen::Vector2d q(U(rng), U(rng));
    Eigen::Vector2d an = ot_source_f(pb, q).second;
    const double eps = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector2d qp = q, qm = q;
      qp(i) += eps;
      qm(i) -= eps;
      double fd = (ot_source_f(pb, qp).first - ot_source_f(pb, qm).first) / (2 * eps);
      CHECK(an(i) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("compute_theta") {
  const auto& re = make_reference_element(ElemKind::triangle, 3);
  Mesh coarse = build_square_mesh(100, ElemKind::triangle, {-0.5, -0.5, 0.5, 0.5});
  Mesh fine = build_square_mesh(200, ElemKind::triangle, {-0.5, -0.5, 0.5, 0.5});

  DensityParams uni{DensityFamily::uniform, 0, 0, 0};
  CHECK(compute_theta(uni, coarse, re) == doctest::Approx(1.0).epsilon(1e-13));

  // oracle values pinned from adaptive quadrature, two independent methods
  DensityParams ring{DensityFamily::ring_bell, 5, 200, 0.25};
  double th_ring = compute_theta(ring, fine, re);
  CHECK(th_ring == doctest::Approx(1.1570796326773081).epsilon(1e-9));
  DensityParams bell{DensityFamily::ring_bell, 10, 200, 0};
  double th_bell = compute_theta(bell, fine, re);
  CHECK(th_bell == doctest::Approx(1.1570796326794897).epsilon(1e-9));

  // refinement stability
  CHECK(std::abs(compute_theta(ring, coarse, re) - th_ring) / th_ring < 1e-6);
}

TEST_CASE("boundary_g shapes") {
  OTProblem pb;
  pb.box = {-0.5, -0.5, 0.5, 0.5};
  auto [gc, dgc] = boundary_g(pb, boundary_tag::circle, {0.6, 0.8});
  CHECK(gc == doctest::Approx(0.0).epsilon(1e-15));
  CHECK((dgc - Eigen::Vector2d(1.2, 1.6)).norm() < 1e-14);

  auto [gl, dgl] = boundary_g(pb, boundary_tag::square_left, {-0.5, 0.3});
  CHECK(gl == 0.0);
  CHECK((dgl - Eigen::Vector2d(1, 0)).norm() == 0.0);

  auto [ge, dge] = boundary_g(pb, boundary_tag::ellipse, {2.0, 0.0});
  CHECK(ge == doctest::Approx(0.0).epsilon(1e-15));

  auto [gcut, dgcut] = boundary_g(pb, boundary_tag::cut, {0.0, -2.5});
  CHECK(gcut == 0.0);

  CHECK_THROWS_AS(boundary_g(pb, 99, {0, 0}), std::invalid_argument);

  std::mt19937 rng(29);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int tag : {boundary_tag::square_top, boundary_tag::circle, boundary_tag::ellipse,
                  boundary_tag::cut}) {
    for (int t = 0; t < 20; ++t) {
      Eigen::Vector2d q(U(rng), U(rng));
      Eigen::Vector2d an = boundary_g(pb, tag, q).second;
      const double eps = 1e-6;
      for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d qp = q, qm = q;
        qp(i) += eps;
        qm(i) -= eps;
        double fd =
            (boundary_g(pb, tag, qp).first - boundary_g(pb, tag, qm).first) / (2 * eps);
        CHECK(an(i) == doctest::Approx(fd).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("builtin examples") {
  DirichletMAProblem ex1 = builtin_example(ExampleId::ex1);
  CHECK(ex1.exact_u(0, 0) == doctest::Approx(1.0));
  CHECK(ex1.f(0, 0) == doctest::Approx(1.0));

  DirichletMAProblem ex2 = builtin_example(ExampleId::ex2, 2.0);
  CHECK(ex2.exact_u(0, 0) == doctest::Approx(-2.0));
  CHECK(ex2.f(0, 0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(builtin_example(ExampleId::ex2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(builtin_example(ExampleId::ex2, std::sqrt(2.0)), std::invalid_argument);
}

TEST_CASE("builtin exact derivatives are consistent") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (auto pb : {builtin_example(ExampleId::ex1), builtin_example(ExampleId::ex2, 2.0),
                  builtin_example(ExampleId::ex2, std::sqrt(2.0) + 0.1)}) {
    for (int t = 0; t < 25; ++t) {
      double x = U(rng), y = U(rng);
      const double eps = 1e-6;
      Eigen::Vector2d g = pb.exact_grad(x, y);
      CHECK(g(0) == doctest::Approx((pb.exact_u(x + eps, y) - pb.exact_u(x - eps, y)) /
                                    (2 * eps)).epsilon(1e-6));
      CHECK(g(1) == doctest::Approx((pb.exact_u(x, y + eps) - pb.exact_u(x, y - eps)) /
                                    (2 * eps)).epsilon(1e-6));
      Eigen::Matrix2d H = pb.exact_hess(x, y);
      Eigen::Vector2d gxp = pb.exact_grad(x + eps, y), gxm = pb.exact_grad(x - eps, y);
      Eigen::Vector2d gyp = pb.exact_grad(x, y + eps), gym = pb.exact_grad(x, y - eps);
      CHECK(H(0, 0) == doctest::Approx((gxp(0) - gxm(0)) / (2 * eps)).epsilon(1e-6));
      CHECK(H(0, 1) == doctest::Approx((gyp(0) - gym(0)) / (2 * eps)).epsilon(1e-6));
      CHECK(H(1, 0) == doctest::Approx((gxp(1) - gxm(1)) / (2 * eps)).epsilon(1e-6));
      CHECK(H(1, 1) == doctest::Approx((gyp(1) - gym(1)) / (2 * eps)).epsilon(1e-6));
      // det(D^2 u) = f
      CHECK(H.determinant() == doctest::Approx(pb.f(x, y)).epsilon(1e-9));
    }
  }
}
