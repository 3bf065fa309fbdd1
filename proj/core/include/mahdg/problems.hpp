#pragma once

#include "mahdg/discretization.hpp"
#include "mahdg/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>

namespace mahdg {

/// Nonlinear source s(H,f) = sqrt(H11^2 + H22^2 + H12^2 + H21^2 + 2 f).
/// Throws EvaluationError when the radicand is negative.
double source_s(const Eigen::Matrix2d& H, double f_val);

/// Partial derivatives of s with respect to H: (ds/dH)_ij = H_ij / s.
Eigen::Matrix2d ds_dH(const Eigen::Matrix2d& H, double f_val);

struct DirichletMAProblem {
  std::function<double(double, double)> f;
  std::function<double(double, double)> g;
  // optional exact fields for error studies
  std::function<double(double, double)> exact_u;
  std::function<Eigen::Vector2d(double, double)> exact_grad;
  std::function<Eigen::Matrix2d(double, double)> exact_hess;
  bool has_exact() const { return static_cast<bool>(exact_u); }
};

enum class ExampleId { ex1, ex2 };

/// Built-in benchmark problems on (0,1)^2 with exact solutions:
/// ex1: u = exp((x^2+y^2)/2); ex2: u = -sqrt(R^2 - x^2 - y^2), R > sqrt(2).
DirichletMAProblem builtin_example(ExampleId id, double R = 0.0);

enum class DensityFamily { uniform, ring_bell, shock };

/// Target mesh density. ring_bell: 1 + a1 sech^2(a2 (x^2+y^2 - a3^2));
/// shock: same with (x-1.5)^2 + y^2. uniform ignores the coefficients.
struct DensityParams {
  DensityFamily family = DensityFamily::uniform;
  double a1 = 0, a2 = 1, a3 = 0;
};

double density_eval(const DensityParams& dp, double x, double y);
Eigen::Vector2d density_grad(const DensityParams& dp, double x, double y);

enum class OTDomain { square, cylinder };

/// Optimal-transport mesh redistribution problem on Omega' = Omega.
struct OTProblem {
  DensityParams density;
  double theta = 1.0;
  OTDomain domain = OTDomain::square;
  Box box; // boundary shapes of the square domain
};

/// Implicit boundary description g and dg/dq for the boundary component
/// `tag`, evaluated at a gradient-space point q.
std::pair<double, Eigen::Vector2d> boundary_g(const OTProblem& pb, int tag,
                                              const Eigen::Vector2d& q);

/// Source value f = theta / rho'(q) and its gradient with respect to q.
std::pair<double, Eigen::Vector2d> ot_source_f(const OTProblem& pb,
                                               const Eigen::Vector2d& q);

/// theta = integral of rho' over the mesh divided by the mesh area, using
/// the quadrature of `re`.
double compute_theta(const DensityParams& dp, const Mesh& mesh,
                     const ReferenceElement& re);

/// What the assembler sees: either problem flavor behind one reference.
struct ProblemView {
  const DirichletMAProblem* dirichlet = nullptr;
  const OTProblem* ot = nullptr;
  bool is_ot() const { return ot != nullptr; }
  ProblemView(const DirichletMAProblem& p) : dirichlet(&p) {}
  ProblemView(const OTProblem& p) : ot(&p) {}
};

} // namespace mahdg
