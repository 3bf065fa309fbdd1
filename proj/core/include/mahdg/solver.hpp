#pragma once

#include "mahdg/assembly.hpp"
#include "mahdg/problems.hpp"
#include "mahdg/state.hpp"

#include <vector>

namespace mahdg {

/// Trace solve result; lambda is the constraint multiplier of the bordered
/// system in OT mode (0 otherwise).
struct TraceSolution {
  Eigen::VectorXd du_hat;
  double lambda = 0.0;
  double solve_residual = 0.0; // ||K x - R|| after refinement
};

/// Sparse direct solve of the condensed system. In constrained mode solves
/// the square bordered system [[K, M^T], [M, 0]]; K alone has the constant
/// nullspace under pure Neumann data.
TraceSolution solve_condensed(const CondensedSystem& sys);

struct IterationRecord {
  int iteration = 0;
  double residual_norm = 0.0; // Newton
  double alpha = 0.0;         // accepted line-search step
  double increment_norm = 0.0; // fixed-point Hessian increment
  double lambda = 0.0;
};

struct IterationLog {
  std::vector<IterationRecord> entries;
  bool converged = false;
};

struct SolveResult {
  FieldState state;
  IterationLog log;
  int iterations = 0;
};

/// Damped Newton on the full nonlinear HDG system; stops when the stacked
/// residual norm drops below cfg.newton_tol.
SolveResult newton_solve(const ProblemView& pb, const HdgDiscretization& d,
                         const SolverConfig& cfg, FieldState initial);

/// Poisson-sequence iteration; stops when the broken L2 norm of
/// H^l - H^{l-1} drops below cfg.fp_tol. In Dirichlet mode the trace matrix
/// is factorized once; the OT boundary linearization changes it per step.
SolveResult fixed_point_solve(const ProblemView& pb, const HdgDiscretization& d,
                              const SolverConfig& cfg, FieldState initial);

double global_residual_norm(const ProblemView& pb, const HdgDiscretization& d,
                            const FieldState& s, double tau);

/// Quadrature-weighted broken L2 norm of a coefficient vector holding
/// `comps` fields per element (H: 4, q: 2, u: 1).
double broken_l2_norm(const HdgDiscretization& d, const Eigen::VectorXd& coeffs,
                      int comps);

/// Integral of u_h over the mesh.
double integral_of_u(const HdgDiscretization& d, const FieldState& s);

} // namespace mahdg
