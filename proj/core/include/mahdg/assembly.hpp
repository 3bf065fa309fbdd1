#pragma once

#include "mahdg/discretization.hpp"
#include "mahdg/problems.hpp"
#include "mahdg/state.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace mahdg {

/// Dense blocks of one element's exact linearization. Interior layout
/// [H11,H12,H21,H22,q1,q2,u] (7*np); trace layout face-major (nf*nfp) in
/// face-global orientation. D and R4 hold only this element's contribution
/// to its faces' rows.
struct LocalBlocks {
  Eigen::MatrixXd A, B, C, D;
  Eigen::RowVectorXd E; // mean-value constraint row (OT mode only)
  Eigen::VectorXd R123, R4;
  double r5 = 0.0;
};

LocalBlocks assemble_local_blocks(const ProblemView& pb, const HdgDiscretization& d,
                                  const FieldState& s, int elem, double tau);

/// Discrete residual of the current state (right-hand sides of the Newton
/// linearization).
struct Residual {
  Eigen::VectorXd interior; // n_elems * 7np, stacked element-major
  Eigen::VectorXd trace;    // nfp per face, accumulated over both sides
  double r5 = 0.0;
  bool constrained = false;
};
Residual assemble_residual(const ProblemView& pb, const HdgDiscretization& d,
                           const FieldState& s, double tau);

/// Euclidean norm of the stacked residual vectors (fixed summation order).
double residual_norm(const Residual& r);

/// Globally assembled trace system after element-wise elimination.
struct CondensedSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd R;
  bool constrained = false;
  Eigen::VectorXd Mrow; // reduced constraint row over trace dofs
  double r5 = 0.0;      // reduced constraint right-hand side
};

/// Element data retained for interior recovery after the trace solve.
struct RecoveryData {
  Eigen::MatrixXd AinvB;
  Eigen::VectorXd AinvR;
};

/// One element's contribution to the condensed system:
/// K_e = D - C A^{-1} B, R_e = R4 - C A^{-1} R123,
/// M_e = -E A^{-1} B,    r5_e = r5 - E A^{-1} R123.
struct CondensedElement {
  Eigen::MatrixXd K;
  Eigen::VectorXd R;
  Eigen::RowVectorXd M;
  double r5 = 0.0;
};
CondensedElement condense(const LocalBlocks& blocks, int elem = -1,
                          RecoveryData* rec = nullptr);

CondensedSystem condense_global(const ProblemView& pb, const HdgDiscretization& d,
                                const FieldState& s, double tau,
                                std::vector<RecoveryData>* recovery = nullptr);

/// Interior increment of one element: A^{-1}(R123 - B du_hat).
Eigen::VectorXd recover_local(const RecoveryData& rec,
                              const Eigen::VectorXd& du_hat_elem);

/// Element trace dofs gathered from a global trace vector (face-major, no
/// reorientation needed: all element tables live in face-global order).
Eigen::VectorXd gather_elem_trace(const HdgDiscretization& d, int e,
                                  const Eigen::VectorXd& trace);

} // namespace mahdg
