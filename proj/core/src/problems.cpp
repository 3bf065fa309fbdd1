#include "mahdg/problems.hpp"

#include "mahdg/errors.hpp"
#include "mahdg/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mahdg {

double source_s(const Eigen::Matrix2d& H, double f_val) {
  double rad = H(0, 0) * H(0, 0) + H(1, 1) * H(1, 1) + H(0, 1) * H(0, 1) +
               H(1, 0) * H(1, 0) + 2.0 * f_val;
  if (!(rad >= 0.0) || !std::isfinite(rad))
    throw EvaluationError("source_s: negative or non-finite radicand");
  return std::sqrt(rad);
}

Eigen::Matrix2d ds_dH(const Eigen::Matrix2d& H, double f_val) {
  double s = source_s(H, f_val);
  if (s == 0.0) throw EvaluationError("ds_dH: s vanishes");
  return H / s;
}

DirichletMAProblem builtin_example(ExampleId id, double R) {
  DirichletMAProblem pb;
  if (id == ExampleId::ex1) {
    auto u = [](double x, double y) { return std::exp(0.5 * (x * x + y * y)); };
    pb.f = [](double x, double y) {
      return (1.0 + x * x + y * y) * std::exp(x * x + y * y);
    };
    pb.g = u;
    pb.exact_u = u;
    pb.exact_grad = [u](double x, double y) {
      return Eigen::Vector2d(x * u(x, y), y * u(x, y));
    };
    pb.exact_hess = [u](double x, double y) {
      double e = u(x, y);
      Eigen::Matrix2d h;
      h << e * (1.0 + x * x), e * x * y, e * x * y, e * (1.0 + y * y);
      return h;
    };
  } else {
    if (!(R > std::sqrt(2.0)))
      throw std::invalid_argument("builtin_example: ex2 requires R > sqrt(2)");
    auto u = [R](double x, double y) { return -std::sqrt(R * R - x * x - y * y); };
    pb.f = [R](double x, double y) {
      double d = R * R - x * x - y * y;
      return R * R / (d * d);
    };
    pb.g = u;
    pb.exact_u = u;
    pb.exact_grad = [R](double x, double y) {
      double w = std::sqrt(R * R - x * x - y * y);
      return Eigen::Vector2d(x / w, y / w);
    };
    pb.exact_hess = [R](double x, double y) {
      double d = R * R - x * x - y * y;
      double w32 = std::pow(d, 1.5);
      Eigen::Matrix2d h;
      h << (R * R - y * y) / w32, x * y / w32, x * y / w32, (R * R - x * x) / w32;
      return h;
    };
  }
  return pb;
}

double density_eval(const DensityParams& dp, double x, double y) {
  switch (dp.family) {
    case DensityFamily::uniform:
      return 1.0;
    case DensityFamily::ring_bell: {
      double z = dp.a2 * (x * x + y * y - dp.a3 * dp.a3);
      double sech = 1.0 / std::cosh(z);
      return 1.0 + dp.a1 * sech * sech;
    }
    case DensityFamily::shock: {
      double xc = x - 1.5;
      double z = dp.a2 * (xc * xc + y * y - dp.a3 * dp.a3);
      double sech = 1.0 / std::cosh(z);
      return 1.0 + dp.a1 * sech * sech;
    }
  }
  return 1.0;
}

Eigen::Vector2d density_grad(const DensityParams& dp, double x, double y) {
  switch (dp.family) {
    case DensityFamily::uniform:
      return Eigen::Vector2d::Zero();
    case DensityFamily::ring_bell: {
      double z = dp.a2 * (x * x + y * y - dp.a3 * dp.a3);
      double sech = 1.0 / std::cosh(z);
      double c = -4.0 * dp.a1 * dp.a2 * sech * sech * std::tanh(z);
      return Eigen::Vector2d(c * x, c * y);
    }
    case DensityFamily::shock: {
      double xc = x - 1.5;
      double z = dp.a2 * (xc * xc + y * y - dp.a3 * dp.a3);
      double sech = 1.0 / std::cosh(z);
      double c = -4.0 * dp.a1 * dp.a2 * sech * sech * std::tanh(z);
      return Eigen::Vector2d(c * xc, c * y);
    }
  }
  return Eigen::Vector2d::Zero();
}

std::pair<double, Eigen::Vector2d> boundary_g(const OTProblem& pb, int tag,
                                              const Eigen::Vector2d& q) {
  switch (tag) {
    case boundary_tag::square_left:
      return {q(0) - pb.box.x0, Eigen::Vector2d(1, 0)};
    case boundary_tag::square_right:
      return {q(0) - pb.box.x1, Eigen::Vector2d(1, 0)};
    case boundary_tag::square_bottom:
      return {q(1) - pb.box.y0, Eigen::Vector2d(0, 1)};
    case boundary_tag::square_top:
      return {q(1) - pb.box.y1, Eigen::Vector2d(0, 1)};
    case boundary_tag::circle:
      return {q(0) * q(0) + q(1) * q(1) - 1.0, Eigen::Vector2d(2 * q(0), 2 * q(1))};
    case boundary_tag::ellipse:
      return {q(0) * q(0) / 4.0 + q(1) * q(1) / 16.0 - 1.0,
              Eigen::Vector2d(q(0) / 2.0, q(1) / 8.0)};
    case boundary_tag::cut:
      // straight ends of the half cylinder lie on the line x = 0
      return {q(0), Eigen::Vector2d(1, 0)};
  }
  throw std::invalid_argument("boundary_g: unknown boundary tag " + std::to_string(tag));
}

std::pair<double, Eigen::Vector2d> ot_source_f(const OTProblem& pb,
                                               const Eigen::Vector2d& q) {
  double rho = density_eval(pb.density, q(0), q(1));
  if (!(rho > 0.0))
    throw EvaluationError("ot_source_f: nonpositive target density");
  Eigen::Vector2d grad = density_grad(pb.density, q(0), q(1));
  double f = pb.theta / rho;
  return {f, (-pb.theta / (rho * rho)) * grad};
}

double compute_theta(const DensityParams& dp, const Mesh& mesh,
                     const ReferenceElement& re) {
  const ReferenceElement& geo_re =
      make_reference_element(mesh.elem_kind, mesh.geometric_degree);
  Eigen::MatrixXd vals = geo_re.eval_basis(re.qpoints);
  auto grads = geo_re.eval_dbasis(re.qpoints);
  double mass = 0.0, area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::MatrixXd coords(geo_re.num_nodes, 2);
    for (int i = 0; i < geo_re.num_nodes; ++i)
      coords.row(i) = mesh.node_coords.row(mesh.elem_nodes[e][i]);
    Eigen::MatrixXd xq = vals * coords;
    for (Eigen::Index k = 0; k < re.qpoints.rows(); ++k) {
      double xs = grads[0].row(k) * coords.col(0), ys = grads[0].row(k) * coords.col(1);
      double xt = grads[1].row(k) * coords.col(0), yt = grads[1].row(k) * coords.col(1);
      double w = re.qweights(k) * (xs * yt - xt * ys);
      mass += w * density_eval(dp, xq(k, 0), xq(k, 1));
      area += w;
    }
  }
  return mass / area;
}

} // namespace mahdg
