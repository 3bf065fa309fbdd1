#include "mahdg/assembly.hpp"

#include "mahdg/errors.hpp"

#include <cmath>

namespace mahdg {

namespace {

// Per-element evaluation context shared by block and residual assembly.
struct ElemEval {
  const ElementGeometry* g;
  Eigen::MatrixXd gx, gy; // physical gradient tables
  // fields at element quadrature points
  std::array<Eigen::VectorXd, 4> Hc;
  std::array<Eigen::VectorXd, 2> qc;
  Eigen::VectorXd u;
  Eigen::VectorXd s;                      // nonlinear source
  std::array<Eigen::VectorXd, 4> dsdH;    // (H_c / s)
  std::array<Eigen::VectorXd, 2> dsdq;    // (df/dq_i / s), OT mode
  // per local face, at face-global quadrature points
  struct FaceEval {
    Eigen::MatrixXd phi;                 // element trace basis
    std::array<Eigen::VectorXd, 2> q;    // q trace values
    Eigen::VectorXd u, uhat;
    std::array<Eigen::VectorXd, 2> qhat; // numerical flux components
    Eigen::VectorXd qhat_n;              // qhat . n
  };
  std::vector<FaceEval> face;
};

ElemEval evaluate_element(const ProblemView& pb, const HdgDiscretization& d,
                          const FieldState& st, int e, double tau) {
  const ReferenceElement& re = d.ref();
  const int np = d.np(), nfp = d.nfp();
  ElemEval ev;
  ev.g = &d.geom(e);
  physical_gradients(re, *ev.g, ev.gx, ev.gy);

  const auto& V = re.basis_q;
  for (int c = 0; c < 4; ++c) ev.Hc[c] = V * st.H.segment(e * 4 * np + c * np, np);
  for (int i = 0; i < 2; ++i) ev.qc[i] = V * st.q.segment(e * 2 * np + i * np, np);
  ev.u = V * st.u.segment(e * np, np);

  const Eigen::Index nq = V.rows();
  ev.s.resize(nq);
  for (int c = 0; c < 4; ++c) ev.dsdH[c].resize(nq);
  if (pb.is_ot())
    for (int i = 0; i < 2; ++i) ev.dsdq[i].resize(nq);
  for (Eigen::Index k = 0; k < nq; ++k) {
    Eigen::Matrix2d H;
    H << ev.Hc[0](k), ev.Hc[1](k), ev.Hc[2](k), ev.Hc[3](k);
    double fv;
    Eigen::Vector2d dfdq = Eigen::Vector2d::Zero();
    if (pb.is_ot()) {
      Eigen::Vector2d q(ev.qc[0](k), ev.qc[1](k));
      std::tie(fv, dfdq) = ot_source_f(*pb.ot, q);
    } else {
      fv = pb.dirichlet->f(ev.g->xq(k, 0), ev.g->xq(k, 1));
    }
    double s;
    try {
      s = source_s(H, fv);
    } catch (const EvaluationError& err) {
      throw EvaluationError(err.what(), e);
    }
    ev.s(k) = s;
    ev.dsdH[0](k) = H(0, 0) / s;
    ev.dsdH[1](k) = H(0, 1) / s;
    ev.dsdH[2](k) = H(1, 0) / s;
    ev.dsdH[3](k) = H(1, 1) / s;
    if (pb.is_ot()) {
      ev.dsdq[0](k) = dfdq(0) / s;
      ev.dsdq[1](k) = dfdq(1) / s;
    }
  }

  const int nf = d.faces_per_elem();
  ev.face.resize(nf);
  for (int f = 0; f < nf; ++f) {
    auto& fe = ev.face[f];
    fe.phi = d.face_trace_basis(e, f);
    for (int i = 0; i < 2; ++i) fe.q[i] = fe.phi * st.q.segment(e * 2 * np + i * np, np);
    fe.u = fe.phi * st.u.segment(e * np, np);
    const int gf = d.elem_face(e, f);
    fe.uhat = re.trace_basis_q * st.u_hat.segment(gf * nfp, nfp);
    const auto& n = d.geom(e).face[f].normal;
    Eigen::VectorXd jump = fe.u - fe.uhat;
    for (int i = 0; i < 2; ++i)
      fe.qhat[i] = fe.q[i] - tau * jump.cwiseProduct(n.col(i));
    fe.qhat_n = fe.qhat[0].cwiseProduct(n.col(0)) + fe.qhat[1].cwiseProduct(n.col(1));
  }
  return ev;
}

inline int h_off(int np, int c) { return c * np; }
inline int q_off(int np, int i) { return 4 * np + i * np; }
inline int u_off(int np) { return 6 * np; }

} // namespace

LocalBlocks assemble_local_blocks(const ProblemView& pb, const HdgDiscretization& d,
                                  const FieldState& st, int e, double tau) {
  const ReferenceElement& re = d.ref();
  const int np = d.np(), nfp = d.nfp(), nf = d.faces_per_elem();
  const int ni = 7 * np, nt = nf * nfp;
  ElemEval ev = evaluate_element(pb, d, st, e, tau);
  const auto& V = re.basis_q;
  const auto& W = ev.g->wq;
  const auto& Psi = re.trace_basis_q;

  LocalBlocks lb;
  lb.A = Eigen::MatrixXd::Zero(ni, ni);
  lb.B = Eigen::MatrixXd::Zero(ni, nt);
  lb.C = Eigen::MatrixXd::Zero(nt, ni);
  lb.D = Eigen::MatrixXd::Zero(nt, nt);
  lb.R123 = Eigen::VectorXd::Zero(ni);
  lb.R4 = Eigen::VectorXd::Zero(nt);
  if (pb.is_ot()) lb.E = Eigen::RowVectorXd::Zero(ni);

  Eigen::MatrixXd M = V.transpose() * W.asDiagonal() * V;
  Eigen::MatrixXd Dx = ev.gx.transpose() * W.asDiagonal() * V;
  Eigen::MatrixXd Dy = ev.gy.transpose() * W.asDiagonal() * V;
  const Eigen::MatrixXd* Dxy[2] = {&Dx, &Dy};

  // volume terms
  for (int c = 0; c < 4; ++c) {
    const int i = c >> 1, j = c & 1;
    lb.A.block(h_off(np, c), h_off(np, c), np, np) += M;
    lb.A.block(h_off(np, c), q_off(np, i), np, np) += *Dxy[j];
    // r1 = -(H_c, G) - (q_i, dG/dx_j) + <qhat_i, G n_j> (face part below)
    lb.R123.segment(h_off(np, c), np) -=
        V.transpose() * W.cwiseProduct(ev.Hc[c]) +
        (j == 0 ? ev.gx : ev.gy).transpose() * W.cwiseProduct(ev.qc[i]);
  }
  for (int i = 0; i < 2; ++i) {
    lb.A.block(q_off(np, i), q_off(np, i), np, np) += M;
    lb.A.block(q_off(np, i), u_off(np), np, np) += *Dxy[i];
    lb.R123.segment(q_off(np, i), np) -=
        V.transpose() * W.cwiseProduct(ev.qc[i]) +
        (i == 0 ? ev.gx : ev.gy).transpose() * W.cwiseProduct(ev.u);
  }
  for (int c = 0; c < 4; ++c)
    lb.A.block(u_off(np), h_off(np, c), np, np) +=
        V.transpose() * W.cwiseProduct(ev.dsdH[c]).asDiagonal() * V;
  for (int i = 0; i < 2; ++i) {
    lb.A.block(u_off(np), q_off(np, i), np, np) += *Dxy[i];
    if (pb.is_ot())
      lb.A.block(u_off(np), q_off(np, i), np, np) +=
          V.transpose() * W.cwiseProduct(ev.dsdq[i]).asDiagonal() * V;
    lb.R123.segment(u_off(np), np) -=
        (i == 0 ? ev.gx : ev.gy).transpose() * W.cwiseProduct(ev.qc[i]);
  }
  lb.R123.segment(u_off(np), np) -= V.transpose() * W.cwiseProduct(ev.s);
  if (pb.is_ot()) {
    lb.E.segment(u_off(np), np) = (W.transpose() * V);
    lb.r5 = -W.dot(ev.u);
  }

  // face terms
  for (int f = 0; f < nf; ++f) {
    const auto& fe = ev.face[f];
    const auto& fg = ev.g->face[f];
    const auto& w = fg.w;
    const auto n1 = fg.normal.col(0), n2 = fg.normal.col(1);
    const Eigen::VectorXd* nn[2] = {nullptr, nullptr};
    Eigen::VectorXd n1v = n1, n2v = n2;
    nn[0] = &n1v;
    nn[1] = &n2v;
    const Eigen::MatrixXd& Phi = fe.phi;
    const int toff = f * nfp;

    for (int c = 0; c < 4; ++c) {
      const int i = c >> 1, j = c & 1;
      Eigen::VectorXd wnj = w.cwiseProduct(*nn[j]);
      // -<delta qhat_i, G n_j> with qhat_i = q_i - tau (u - uhat) n_i
      lb.A.block(h_off(np, c), q_off(np, i), np, np) -=
          Phi.transpose() * wnj.asDiagonal() * Phi;
      lb.A.block(h_off(np, c), u_off(np), np, np) +=
          tau * Phi.transpose() * wnj.cwiseProduct(*nn[i]).asDiagonal() * Phi;
      lb.B.block(h_off(np, c), toff, np, nfp) -=
          tau * Phi.transpose() * wnj.cwiseProduct(*nn[i]).asDiagonal() * Psi;
      lb.R123.segment(h_off(np, c), np) +=
          Phi.transpose() * w.cwiseProduct(nn[j]->cwiseProduct(fe.qhat[i]));
    }
    for (int i = 0; i < 2; ++i) {
      lb.B.block(q_off(np, i), toff, np, nfp) -=
          Phi.transpose() * w.cwiseProduct(*nn[i]).asDiagonal() * Psi;
      lb.R123.segment(q_off(np, i), np) +=
          Phi.transpose() * w.cwiseProduct(nn[i]->cwiseProduct(fe.uhat));
    }
    // eq3: -<delta qhat . n, w>
    for (int i = 0; i < 2; ++i)
      lb.A.block(u_off(np), q_off(np, i), np, np) -=
          Phi.transpose() * w.cwiseProduct(*nn[i]).asDiagonal() * Phi;
    lb.A.block(u_off(np), u_off(np), np, np) += tau * Phi.transpose() * w.asDiagonal() * Phi;
    lb.B.block(u_off(np), toff, np, nfp) -= tau * Phi.transpose() * w.asDiagonal() * Psi;
    lb.R123.segment(u_off(np), np) += Phi.transpose() * w.cwiseProduct(fe.qhat_n);

    // trace rows
    const Face& face = d.mesh().faces[d.elem_face(e, f)];
    if (face.interior()) {
      for (int i = 0; i < 2; ++i)
        lb.C.block(toff, q_off(np, i), nfp, np) +=
            Psi.transpose() * w.cwiseProduct(*nn[i]).asDiagonal() * Phi;
      lb.C.block(toff, u_off(np), nfp, np) -= tau * Psi.transpose() * w.asDiagonal() * Phi;
      lb.D.block(toff, toff, nfp, nfp) += tau * Psi.transpose() * w.asDiagonal() * Psi;
      lb.R4.segment(toff, nfp) -= Psi.transpose() * w.cwiseProduct(fe.qhat_n);
    } else if (!pb.is_ot()) {
      // Dirichlet: <uhat - g, mu> on the boundary
      lb.D.block(toff, toff, nfp, nfp) += Psi.transpose() * w.asDiagonal() * Psi;
      Eigen::VectorXd gv(w.size());
      for (Eigen::Index k = 0; k < w.size(); ++k)
        gv(k) = pb.dirichlet->g(fg.x(k, 0), fg.x(k, 1));
      lb.R4.segment(toff, nfp) -= Psi.transpose() * w.cwiseProduct(fe.uhat - gv);
    } else {
      // OT: <g(q) + tau (uhat - u), mu> on the boundary
      Eigen::VectorXd gv(w.size());
      Eigen::MatrixXd dg(w.size(), 2);
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        Eigen::Vector2d qk(fe.q[0](k), fe.q[1](k));
        auto [gval, dgval] = boundary_g(*pb.ot, face.boundary, qk);
        gv(k) = gval;
        dg.row(k) = dgval.transpose();
      }
      for (int i = 0; i < 2; ++i)
        lb.C.block(toff, q_off(np, i), nfp, np) +=
            Psi.transpose() * w.cwiseProduct(dg.col(i)).asDiagonal() * Phi;
      lb.C.block(toff, u_off(np), nfp, np) -= tau * Psi.transpose() * w.asDiagonal() * Phi;
      lb.D.block(toff, toff, nfp, nfp) += tau * Psi.transpose() * w.asDiagonal() * Psi;
      lb.R4.segment(toff, nfp) -=
          Psi.transpose() * w.cwiseProduct(gv + tau * (fe.uhat - fe.u));
    }
  }
  return lb;
}

Residual assemble_residual(const ProblemView& pb, const HdgDiscretization& d,
                           const FieldState& st, double tau) {
  const ReferenceElement& re = d.ref();
  const int np = d.np(), nfp = d.nfp(), nf = d.faces_per_elem();
  const int ni = 7 * np;
  Residual res;
  res.interior = Eigen::VectorXd::Zero(d.num_elements() * ni);
  res.trace = Eigen::VectorXd::Zero(d.trace_size());
  res.constrained = pb.is_ot();

  const auto& V = re.basis_q;
  const auto& Psi = re.trace_basis_q;
  for (int e = 0; e < d.num_elements(); ++e) {
    ElemEval ev = evaluate_element(pb, d, st, e, tau);
    const auto& W = ev.g->wq;
    auto out = res.interior.segment(e * ni, ni);
    for (int c = 0; c < 4; ++c) {
      const int i = c >> 1, j = c & 1;
      out.segment(h_off(np, c), np) -=
          V.transpose() * W.cwiseProduct(ev.Hc[c]) +
          (j == 0 ? ev.gx : ev.gy).transpose() * W.cwiseProduct(ev.qc[i]);
    }
    for (int i = 0; i < 2; ++i)
      out.segment(q_off(np, i), np) -=
          V.transpose() * W.cwiseProduct(ev.qc[i]) +
          (i == 0 ? ev.gx : ev.gy).transpose() * W.cwiseProduct(ev.u);
    for (int i = 0; i < 2; ++i)
      out.segment(u_off(np), np) -=
          (i == 0 ? ev.gx : ev.gy).transpose() * W.cwiseProduct(ev.qc[i]);
    out.segment(u_off(np), np) -= V.transpose() * W.cwiseProduct(ev.s);
    if (pb.is_ot()) res.r5 -= W.dot(ev.u);

    for (int f = 0; f < nf; ++f) {
      const auto& fe = ev.face[f];
      const auto& fg = ev.g->face[f];
      const auto& w = fg.w;
      for (int c = 0; c < 4; ++c) {
        const int i = c >> 1, j = c & 1;
        out.segment(h_off(np, c), np) +=
            fe.phi.transpose() * w.cwiseProduct(fg.normal.col(j).cwiseProduct(fe.qhat[i]));
      }
      for (int i = 0; i < 2; ++i)
        out.segment(q_off(np, i), np) +=
            fe.phi.transpose() * w.cwiseProduct(fg.normal.col(i).cwiseProduct(fe.uhat));
      out.segment(u_off(np), np) += fe.phi.transpose() * w.cwiseProduct(fe.qhat_n);

      const int gf = d.elem_face(e, f);
      const Face& face = d.mesh().faces[gf];
      auto tr = res.trace.segment(gf * nfp, nfp);
      if (face.interior()) {
        tr -= Psi.transpose() * w.cwiseProduct(fe.qhat_n);
      } else if (!pb.is_ot()) {
        Eigen::VectorXd gv(w.size());
        for (Eigen::Index k = 0; k < w.size(); ++k)
          gv(k) = pb.dirichlet->g(fg.x(k, 0), fg.x(k, 1));
        tr -= Psi.transpose() * w.cwiseProduct(fe.uhat - gv);
      } else {
        Eigen::VectorXd gv(w.size());
        for (Eigen::Index k = 0; k < w.size(); ++k) {
          Eigen::Vector2d qk(fe.q[0](k), fe.q[1](k));
          gv(k) = boundary_g(*pb.ot, face.boundary, qk).first;
        }
        tr -= Psi.transpose() * w.cwiseProduct(gv + tau * (fe.uhat - fe.u));
      }
    }
  }
  return res;
}

double residual_norm(const Residual& r) {
  double sq = r.interior.squaredNorm() + r.trace.squaredNorm();
  if (r.constrained) sq += r.r5 * r.r5;
  return std::sqrt(sq);
}

CondensedElement condense(const LocalBlocks& lb, int elem, RecoveryData* rec) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lb.A);
  // pivot-ratio conditioning proxy; rcond() is unreliable on singular input
  Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  double rc = diag.minCoeff() / diag.maxCoeff();
  if (!(rc > 1e-14))
    throw CondensationError("condense: singular interior block", elem, rc);
  Eigen::MatrixXd AinvB = lu.solve(lb.B);
  Eigen::VectorXd AinvR = lu.solve(lb.R123);
  CondensedElement ce;
  ce.K = lb.D - lb.C * AinvB;
  ce.R = lb.R4 - lb.C * AinvR;
  if (lb.E.size() > 0) {
    ce.M = -lb.E * AinvB;
    ce.r5 = lb.r5 - lb.E * AinvR;
  }
  if (rec) {
    rec->AinvB = std::move(AinvB);
    rec->AinvR = std::move(AinvR);
  }
  return ce;
}

CondensedSystem condense_global(const ProblemView& pb, const HdgDiscretization& d,
                                const FieldState& st, double tau,
                                std::vector<RecoveryData>* recovery) {
  const int nfp = d.nfp(), nf = d.faces_per_elem();
  const int nt = d.trace_size();
  CondensedSystem sys;
  sys.constrained = pb.is_ot();
  sys.R = Eigen::VectorXd::Zero(nt);
  if (sys.constrained) sys.Mrow = Eigen::VectorXd::Zero(nt);
  if (recovery) recovery->resize(d.num_elements());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(d.num_elements()) * nf * nfp * nf * nfp);
  for (int e = 0; e < d.num_elements(); ++e) {
    LocalBlocks lb = assemble_local_blocks(pb, d, st, e, tau);
    CondensedElement ce = condense(lb, e, recovery ? &(*recovery)[e] : nullptr);
    std::vector<int> dofs(nf * nfp);
    for (int f = 0; f < nf; ++f)
      for (int a = 0; a < nfp; ++a) dofs[f * nfp + a] = d.elem_face(e, f) * nfp + a;
    for (int r = 0; r < nf * nfp; ++r) {
      sys.R(dofs[r]) += ce.R(r);
      for (int c = 0; c < nf * nfp; ++c)
        trips.emplace_back(dofs[r], dofs[c], ce.K(r, c));
    }
    if (sys.constrained) {
      for (int c = 0; c < nf * nfp; ++c) sys.Mrow(dofs[c]) += ce.M(c);
      sys.r5 += ce.r5;
    }
  }
  sys.K.resize(nt, nt);
  sys.K.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

Eigen::VectorXd recover_local(const RecoveryData& rec,
                              const Eigen::VectorXd& du_hat_elem) {
  return rec.AinvR - rec.AinvB * du_hat_elem;
}

Eigen::VectorXd gather_elem_trace(const HdgDiscretization& d, int e,
                                  const Eigen::VectorXd& trace) {
  const int nfp = d.nfp(), nf = d.faces_per_elem();
  Eigen::VectorXd out(nf * nfp);
  for (int f = 0; f < nf; ++f)
    out.segment(f * nfp, nfp) = trace.segment(d.elem_face(e, f) * nfp, nfp);
  return out;
}

} // namespace mahdg
