#pragma once

#include "mahdg/discretization.hpp"

#include <Eigen/Dense>

#include <functional>

namespace mahdg {

/// Coefficient vectors of the discrete fields. Per-element layout:
/// H components in order (11,12,21,22), each a block of np coefficients;
/// q components (1,2); u one block. Traces are per-face blocks of nfp in
/// face-global orientation.
struct FieldState {
  Eigen::VectorXd H;     // 4 * np * n_elems
  Eigen::VectorXd q;     // 2 * np * n_elems
  Eigen::VectorXd u;     // np * n_elems
  Eigen::VectorXd u_hat; // nfp * n_faces

  static FieldState zero(const HdgDiscretization& d);

  /// Stacked interior coefficients [H,q,u] of one element (size 7*np).
  Eigen::VectorXd interior(const HdgDiscretization& d, int e) const;
  /// state += alpha * delta restricted to element e's interior block.
  void add_interior(const HdgDiscretization& d, int e,
                    const Eigen::VectorXd& delta, double alpha);

  bool all_finite() const;
};

/// Nodal interpolation of smooth fields onto the discrete spaces;
/// u_hat is interpolated at the physical face nodes.
FieldState interpolate_state(const HdgDiscretization& d,
                             const std::function<double(double, double)>& u,
                             const std::function<Eigen::Vector2d(double, double)>& grad_u,
                             const std::function<Eigen::Matrix2d(double, double)>& hess_u);

/// The conventional initial iterate u0 = (x^2+y^2)/2, q0 = (x,y), H0 = I.
FieldState initial_state(const HdgDiscretization& d);

struct SolverConfig {
  double tau = 1.0;         // stabilization
  double newton_tol = 1e-8; // residual norm stopping tolerance
  double fp_tol = 1e-6;     // Hessian-increment L2 stopping tolerance
  int max_iter = 400;
  int max_halvings = 20;          // line search budget
  double sufficient_decrease = 0.0; // accept when new < (1 - c*alpha) * old
};

} // namespace mahdg
