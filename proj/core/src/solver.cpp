#include "mahdg/solver.hpp"

#include "mahdg/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace mahdg {

namespace {

Eigen::SparseMatrix<double> bordered_matrix(const CondensedSystem& sys) {
  const int n = static_cast<int>(sys.K.rows());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sys.K.nonZeros() + 2 * n);
  for (int k = 0; k < sys.K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int j = 0; j < n; ++j) {
    if (sys.Mrow(j) != 0.0) {
      trips.emplace_back(n, j, sys.Mrow(j));
      trips.emplace_back(j, n, sys.Mrow(j));
    }
  }
  Eigen::SparseMatrix<double> Kb(n + 1, n + 1);
  Kb.setFromTriplets(trips.begin(), trips.end());
  return Kb;
}

} // namespace

TraceSolution solve_condensed(const CondensedSystem& sys) {
  const int n = static_cast<int>(sys.K.rows());
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  if (sys.constrained) {
    A = bordered_matrix(sys);
    b.resize(n + 1);
    b.head(n) = sys.R;
    b(n) = sys.r5;
  } else {
    A = sys.K;
    b = sys.R;
  }
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SingularSystemError("solve_condensed: sparse factorization failed");
  Eigen::VectorXd x = lu.solve(b);
  // iterative refinement; keeps the solve residual at roundoff level
  double target = 1e-10 * (1.0 + b.norm());
  for (int it = 0; it < 3; ++it) {
    Eigen::VectorXd r = b - A * x;
    if (r.norm() <= target) break;
    x += lu.solve(r);
  }
  double resid = (b - A * x).norm();
  if (!(resid <= 1e-6 * (1.0 + b.norm())))
    throw SingularSystemError("solve_condensed: solution residual too large: " +
                              std::to_string(resid));
  TraceSolution out;
  out.solve_residual = resid;
  if (sys.constrained) {
    out.du_hat = x.head(n);
    out.lambda = x(n);
  } else {
    out.du_hat = x;
  }
  return out;
}

double global_residual_norm(const ProblemView& pb, const HdgDiscretization& d,
                            const FieldState& s, double tau) {
  return residual_norm(assemble_residual(pb, d, s, tau));
}

double broken_l2_norm(const HdgDiscretization& d, const Eigen::VectorXd& coeffs,
                      int comps) {
  const int np = d.np();
  const auto& V = d.ref().basis_q;
  double sq = 0.0;
  for (int e = 0; e < d.num_elements(); ++e) {
    const auto& W = d.geom(e).wq;
    for (int c = 0; c < comps; ++c) {
      Eigen::VectorXd vals = V * coeffs.segment((e * comps + c) * np, np);
      sq += W.dot(vals.cwiseAbs2());
    }
  }
  return std::sqrt(sq);
}

double integral_of_u(const HdgDiscretization& d, const FieldState& s) {
  const int np = d.np();
  const auto& V = d.ref().basis_q;
  double total = 0.0;
  for (int e = 0; e < d.num_elements(); ++e)
    total += d.geom(e).wq.dot(V * s.u.segment(e * np, np));
  return total;
}

SolveResult newton_solve(const ProblemView& pb, const HdgDiscretization& d,
                         const SolverConfig& cfg, FieldState initial) {
  if (!initial.all_finite())
    throw std::invalid_argument("newton_solve: non-finite initial state");
  SolveResult out;
  out.state = std::move(initial);

  double rnorm = global_residual_norm(pb, d, out.state, cfg.tau);
  out.log.entries.push_back({0, rnorm, 0.0, 0.0, 0.0});
  if (rnorm <= cfg.newton_tol) {
    out.log.converged = true;
    return out;
  }

  std::vector<RecoveryData> recovery;
  const int ni = d.interior_size();
  for (int it = 1; it <= cfg.max_iter; ++it) {
    CondensedSystem sys = condense_global(pb, d, out.state, cfg.tau, &recovery);
    TraceSolution ts = solve_condensed(sys);

    Eigen::VectorXd dint(d.num_elements() * ni);
    for (int e = 0; e < d.num_elements(); ++e)
      dint.segment(e * ni, ni) =
          recover_local(recovery[e], gather_elem_trace(d, e, ts.du_hat));

    double alpha = 1.0, trial_norm = 0.0;
    bool accepted = false;
    FieldState trial;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      trial = out.state;
      trial.u_hat += alpha * ts.du_hat;
      for (int e = 0; e < d.num_elements(); ++e)
        trial.add_interior(d, e, dint.segment(e * ni, ni), alpha);
      trial_norm = global_residual_norm(pb, d, trial, cfg.tau);
      if (trial_norm < (1.0 - cfg.sufficient_decrease * alpha) * rnorm) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      throw LineSearchError("newton_solve: line search stagnated", rnorm);

    out.state = std::move(trial);
    rnorm = trial_norm;
    out.log.entries.push_back({it, rnorm, alpha, 0.0, ts.lambda});
    if (rnorm <= cfg.newton_tol) {
      out.log.converged = true;
      out.iterations = it;
      return out;
    }
  }
  throw NonConvergenceError("newton_solve: residual tolerance not reached",
                            cfg.max_iter, rnorm);
}

namespace {

// Interior layout of one fixed-point Poisson step: [q1, q2, u].
struct FpLocal {
  Eigen::MatrixXd A, B, C, D;
  Eigen::RowVectorXd E;
  Eigen::VectorXd F4;
};

// State-independent part of the fixed-point step for one element. In OT
// mode the boundary rows use dg/dq at the previous gradient iterate, so the
// whole thing is rebuilt per iteration.
FpLocal assemble_fp_local(const ProblemView& pb, const HdgDiscretization& d,
                          const FieldState& prev, int e, double tau) {
  const ReferenceElement& re = d.ref();
  const int np = d.np(), nfp = d.nfp(), nf = d.faces_per_elem();
  const int ni = 3 * np, nt = nf * nfp;
  const auto& g = d.geom(e);
  const auto& V = re.basis_q;
  const auto& W = g.wq;
  const auto& Psi = re.trace_basis_q;
  Eigen::MatrixXd gx, gy;
  physical_gradients(re, g, gx, gy);

  FpLocal lb;
  lb.A = Eigen::MatrixXd::Zero(ni, ni);
  lb.B = Eigen::MatrixXd::Zero(ni, nt);
  lb.C = Eigen::MatrixXd::Zero(nt, ni);
  lb.D = Eigen::MatrixXd::Zero(nt, nt);
  lb.F4 = Eigen::VectorXd::Zero(nt);
  if (pb.is_ot()) lb.E = Eigen::RowVectorXd::Zero(ni);

  Eigen::MatrixXd M = V.transpose() * W.asDiagonal() * V;
  Eigen::MatrixXd Dx = gx.transpose() * W.asDiagonal() * V;
  Eigen::MatrixXd Dy = gy.transpose() * W.asDiagonal() * V;
  const Eigen::MatrixXd* Dxy[2] = {&Dx, &Dy};

  for (int i = 0; i < 2; ++i) {
    lb.A.block(i * np, i * np, np, np) += M;
    lb.A.block(i * np, 2 * np, np, np) += *Dxy[i];
    lb.A.block(2 * np, i * np, np, np) += *Dxy[i];
  }
  if (pb.is_ot()) lb.E.segment(2 * np, np) = W.transpose() * V;

  for (int f = 0; f < nf; ++f) {
    const auto& fg = g.face[f];
    const auto& w = fg.w;
    Eigen::MatrixXd Phi = d.face_trace_basis(e, f);
    const int toff = f * nfp;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd wni = w.cwiseProduct(fg.normal.col(i));
      lb.B.block(i * np, toff, np, nfp) -= Phi.transpose() * wni.asDiagonal() * Psi;
      lb.A.block(2 * np, i * np, np, np) -= Phi.transpose() * wni.asDiagonal() * Phi;
    }
    lb.A.block(2 * np, 2 * np, np, np) += tau * Phi.transpose() * w.asDiagonal() * Phi;
    lb.B.block(2 * np, toff, np, nfp) -= tau * Phi.transpose() * w.asDiagonal() * Psi;

    const Face& face = d.mesh().faces[d.elem_face(e, f)];
    if (face.interior()) {
      for (int i = 0; i < 2; ++i)
        lb.C.block(toff, i * np, nfp, np) +=
            Psi.transpose() * w.cwiseProduct(fg.normal.col(i)).asDiagonal() * Phi;
      lb.C.block(toff, 2 * np, nfp, np) -= tau * Psi.transpose() * w.asDiagonal() * Phi;
      lb.D.block(toff, toff, nfp, nfp) += tau * Psi.transpose() * w.asDiagonal() * Psi;
    } else if (!pb.is_ot()) {
      lb.D.block(toff, toff, nfp, nfp) += Psi.transpose() * w.asDiagonal() * Psi;
      Eigen::VectorXd gv(w.size());
      for (Eigen::Index k = 0; k < w.size(); ++k)
        gv(k) = pb.dirichlet->g(fg.x(k, 0), fg.x(k, 1));
      lb.F4.segment(toff, nfp) += Psi.transpose() * w.cwiseProduct(gv);
    } else {
      // linearized boundary condition around q^{l-1}
      Eigen::MatrixXd Phi_q = Phi;
      Eigen::VectorXd bq(w.size());
      Eigen::MatrixXd dg(w.size(), 2);
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        Eigen::Vector2d qk(
            Phi_q.row(k) * prev.q.segment(e * 2 * np, np),
            Phi_q.row(k) * prev.q.segment(e * 2 * np + np, np));
        auto [gval, dgval] = boundary_g(*pb.ot, face.boundary, qk);
        dg.row(k) = dgval.transpose();
        bq(k) = gval - dgval.dot(qk);
      }
      for (int i = 0; i < 2; ++i)
        lb.C.block(toff, i * np, nfp, np) +=
            Psi.transpose() * w.cwiseProduct(dg.col(i)).asDiagonal() * Phi;
      lb.C.block(toff, 2 * np, nfp, np) -= tau * Psi.transpose() * w.asDiagonal() * Phi;
      lb.D.block(toff, toff, nfp, nfp) += tau * Psi.transpose() * w.asDiagonal() * Psi;
      lb.F4.segment(toff, nfp) -= Psi.transpose() * w.cwiseProduct(bq);
    }
  }
  return lb;
}

// Source vector -(s(H^{l-1}, .), phi)_K of one element.
Eigen::VectorXd fp_source(const ProblemView& pb, const HdgDiscretization& d,
                          const FieldState& prev, int e) {
  const ReferenceElement& re = d.ref();
  const int np = d.np();
  const auto& g = d.geom(e);
  const auto& V = re.basis_q;
  const Eigen::Index nq = V.rows();
  Eigen::VectorXd s(nq);
  std::array<Eigen::VectorXd, 4> Hc;
  for (int c = 0; c < 4; ++c) Hc[c] = V * prev.H.segment(e * 4 * np + c * np, np);
  std::array<Eigen::VectorXd, 2> qc;
  if (pb.is_ot())
    for (int i = 0; i < 2; ++i) qc[i] = V * prev.q.segment(e * 2 * np + i * np, np);
  for (Eigen::Index k = 0; k < nq; ++k) {
    Eigen::Matrix2d H;
    H << Hc[0](k), Hc[1](k), Hc[2](k), Hc[3](k);
    double fv = pb.is_ot()
                    ? ot_source_f(*pb.ot, Eigen::Vector2d(qc[0](k), qc[1](k))).first
                    : pb.dirichlet->f(g.xq(k, 0), g.xq(k, 1));
    try {
      s(k) = source_s(H, fv);
    } catch (const EvaluationError& err) {
      throw EvaluationError(err.what(), e);
    }
  }
  return -V.transpose() * g.wq.cwiseProduct(s);
}

// Element-wise L2 projection recovering H from (q, u, uhat), Eq. of the
// gradient reconstruction: (H,G) = -(q, div G) + <qhat, G n>.
void recover_hessian(const HdgDiscretization& d, FieldState& s, double tau,
                     const std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>>& mass_lu) {
  const ReferenceElement& re = d.ref();
  const int np = d.np(), nfp = d.nfp(), nf = d.faces_per_elem();
  const auto& V = re.basis_q;
  const auto& Psi = re.trace_basis_q;
  for (int e = 0; e < d.num_elements(); ++e) {
    const auto& g = d.geom(e);
    const auto& W = g.wq;
    Eigen::MatrixXd gx, gy;
    physical_gradients(re, g, gx, gy);
    const Eigen::MatrixXd* Gxy[2] = {&gx, &gy};
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(np, 4);
    for (int c = 0; c < 4; ++c) {
      const int i = c >> 1, j = c & 1;
      Eigen::VectorXd qi = V * s.q.segment(e * 2 * np + i * np, np);
      rhs.col(c) -= Gxy[j]->transpose() * W.cwiseProduct(qi);
    }
    for (int f = 0; f < nf; ++f) {
      const auto& fg = g.face[f];
      const auto& w = fg.w;
      Eigen::MatrixXd Phi = d.face_trace_basis(e, f);
      const int gf = d.elem_face(e, f);
      Eigen::VectorXd uf = Phi * s.u.segment(e * np, np);
      Eigen::VectorXd uhatf = Psi * s.u_hat.segment(gf * nfp, nfp);
      Eigen::VectorXd jump = uf - uhatf;
      for (int c = 0; c < 4; ++c) {
        const int i = c >> 1, j = c & 1;
        Eigen::VectorXd qi = Phi * s.q.segment(e * 2 * np + i * np, np);
        Eigen::VectorXd qhat_i = qi - tau * jump.cwiseProduct(fg.normal.col(i));
        rhs.col(c) +=
            Phi.transpose() * w.cwiseProduct(fg.normal.col(j).cwiseProduct(qhat_i));
      }
    }
    Eigen::MatrixXd h = mass_lu[e].solve(rhs);
    for (int c = 0; c < 4; ++c) s.H.segment(e * 4 * np + c * np, np) = h.col(c);
  }
}

} // namespace

SolveResult fixed_point_solve(const ProblemView& pb, const HdgDiscretization& d,
                              const SolverConfig& cfg, FieldState initial) {
  if (!initial.all_finite())
    throw std::invalid_argument("fixed_point_solve: non-finite initial state");
  const int np = d.np(), nfp = d.nfp(), nf = d.faces_per_elem();
  const int ni = 3 * np, nt = d.trace_size();
  const int ne = d.num_elements();
  const bool ot = pb.is_ot();

  SolveResult out;
  out.state = std::move(initial);

  // element mass LUs for the Hessian projection
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> mass_lu;
  mass_lu.reserve(ne);
  const auto& V = d.ref().basis_q;
  for (int e = 0; e < ne; ++e)
    mass_lu.emplace_back(Eigen::MatrixXd(V.transpose() * d.geom(e).wq.asDiagonal() * V));

  // In Dirichlet mode everything but the source is fixed: factorize the
  // condensed matrix once and keep the per-element elimination maps.
  struct ElimMaps {
    Eigen::MatrixXd Ainv_u;  // A^{-1} columns of the u block
    Eigen::MatrixXd AinvB;
    Eigen::MatrixXd CAinv_u; // C A^{-1}, u-block columns
    Eigen::VectorXd F4;
  };
  std::vector<ElimMaps> maps(ne);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::VectorXd F4_global = Eigen::VectorXd::Zero(nt);

  auto build_system = [&](const FieldState& prev) {
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd Mrow = Eigen::VectorXd::Zero(nt);
    F4_global.setZero();
    for (int e = 0; e < ne; ++e) {
      FpLocal fl = assemble_fp_local(pb, d, prev, e, cfg.tau);
      Eigen::PartialPivLU<Eigen::MatrixXd> alu(fl.A);
      Eigen::VectorXd diag = alu.matrixLU().diagonal().cwiseAbs();
      double rc = diag.minCoeff() / diag.maxCoeff();
      if (!(rc > 1e-14))
        throw CondensationError("fixed_point_solve: singular local block", e, rc);
      Eigen::MatrixXd Ainv = alu.inverse();
      ElimMaps& mp = maps[e];
      mp.Ainv_u = Ainv.middleCols(2 * np, np);
      mp.AinvB = Ainv * fl.B;
      mp.CAinv_u = fl.C * mp.Ainv_u;
      mp.F4 = fl.F4;
      Eigen::MatrixXd Ke = fl.D - fl.C * mp.AinvB;
      std::vector<int> dofs(nf * nfp);
      for (int f = 0; f < nf; ++f)
        for (int a = 0; a < nfp; ++a) dofs[f * nfp + a] = d.elem_face(e, f) * nfp + a;
      for (int r = 0; r < nf * nfp; ++r) {
        F4_global(dofs[r]) += fl.F4(r);
        for (int c = 0; c < nf * nfp; ++c) trips.emplace_back(dofs[r], dofs[c], Ke(r, c));
      }
      if (ot) {
        Eigen::RowVectorXd Me = -(fl.E * mp.AinvB);
        for (int c = 0; c < nf * nfp; ++c) Mrow(dofs[c]) += Me(c);
      }
    }
    Eigen::SparseMatrix<double> K(nt, nt);
    K.setFromTriplets(trips.begin(), trips.end());
    if (!ot) {
      K.makeCompressed();
      lu.compute(K);
      if (lu.info() != Eigen::Success)
        throw SingularSystemError("fixed_point_solve: factorization failed");
    }
    return std::make_pair(K, Mrow);
  };

  Eigen::VectorXd Mrow;
  if (!ot) build_system(out.state);

  Eigen::VectorXd H_prev = out.state.H;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // per-element source and reduced right-hand side
    Eigen::MatrixXd Fu(np, ne);
    Eigen::VectorXd F = Eigen::VectorXd::Zero(nt);
    double r5 = 0.0;
    if (ot) {
      auto [K, mrow] = build_system(out.state);
      Mrow = mrow;
      for (int e = 0; e < ne; ++e) {
        Fu.col(e) = fp_source(pb, d, out.state, e);
        Eigen::VectorXd red = maps[e].CAinv_u * Fu.col(e);
        for (int f = 0; f < nf; ++f)
          F.segment(d.elem_face(e, f) * nfp, nfp) -= red.segment(f * nfp, nfp);
        // constraint rhs: 0 - E A^{-1} F123 (E hits u rows only)
        Eigen::RowVectorXd Eu = d.geom(e).wq.transpose() * V;
        r5 -= (Eu * (maps[e].Ainv_u * Fu.col(e))).value();
      }
      F += F4_global;
      CondensedSystem sys;
      sys.K = K;
      sys.R = F;
      sys.constrained = true;
      sys.Mrow = Mrow;
      sys.r5 = r5;
      TraceSolution ts = solve_condensed(sys);
      out.state.u_hat = ts.du_hat;
      out.log.entries.push_back({it, 0.0, 0.0, 0.0, ts.lambda});
    } else {
      for (int e = 0; e < ne; ++e) {
        Fu.col(e) = fp_source(pb, d, out.state, e);
        Eigen::VectorXd red = maps[e].CAinv_u * Fu.col(e);
        for (int f = 0; f < nf; ++f)
          F.segment(d.elem_face(e, f) * nfp, nfp) -= red.segment(f * nfp, nfp);
      }
      F += F4_global;
      out.state.u_hat = lu.solve(F);
      out.log.entries.push_back({it, 0.0, 0.0, 0.0, 0.0});
    }

    // element-wise recovery of (q, u) then the Hessian projection
    for (int e = 0; e < ne; ++e) {
      Eigen::VectorXd tr = gather_elem_trace(d, e, out.state.u_hat);
      Eigen::VectorXd U = maps[e].Ainv_u * Fu.col(e) - maps[e].AinvB * tr;
      out.state.q.segment(e * 2 * np, 2 * np) = U.head(2 * np);
      out.state.u.segment(e * np, np) = U.tail(np);
    }
    recover_hessian(d, out.state, cfg.tau, mass_lu);

    Eigen::VectorXd dH = out.state.H - H_prev;
    double inc = broken_l2_norm(d, dH, 4);
    out.log.entries.back().increment_norm = inc;
    H_prev = out.state.H;
    if (inc <= cfg.fp_tol) {
      out.log.converged = true;
      out.iterations = it;
      return out;
    }
  }
  throw NonConvergenceError("fixed_point_solve: increment tolerance not reached",
                            cfg.max_iter, out.log.entries.back().increment_norm);
}

} // namespace mahdg
