#include "mahdg/reference_element.hpp"

#include "mahdg/errors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mahdg {

namespace {

// Legendre P_n and its derivative at x in (-1,1), unnormalized.
void legendre(int n, double x, double& p, double& dp) {
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Normalized Jacobi polynomials P_0..P_n at x, orthonormal on [-1,1]
// with weight (1-x)^a (1+x)^b.
Eigen::VectorXd jacobi_all(double a, double b, int n, double x) {
  Eigen::VectorXd P(n + 1);
  double g0 = std::pow(2.0, a + b + 1) / (a + b + 1) * std::tgamma(a + 1) *
              std::tgamma(b + 1) / std::tgamma(a + b + 1);
  P(0) = 1.0 / std::sqrt(g0);
  if (n == 0) return P;
  double g1 = (a + 1) * (b + 1) / (a + b + 3) * g0;
  P(1) = ((a + b + 2) * x / 2 + (a - b) / 2) / std::sqrt(g1);
  double aold = 2.0 / (2 + a + b) * std::sqrt((a + 1) * (b + 1) / (a + b + 3));
  for (int i = 1; i < n; ++i) {
    double h1 = 2 * i + a + b;
    double anew = 2.0 / (h1 + 2) *
                  std::sqrt((i + 1) * (i + 1 + a + b) * (i + 1 + a) * (i + 1 + b) /
                            ((h1 + 1) * (h1 + 3)));
    double bnew = -(a * a - b * b) / (h1 * (h1 + 2));
    P(i + 1) = ((x - bnew) * P(i) - aold * P(i - 1)) / anew;
    aold = anew;
  }
  return P;
}

double jacobi_one(double a, double b, int n, double x) {
  return jacobi_all(a, b, n, x)(n);
}

// d/dx of the normalized Jacobi polynomial of order n.
double jacobi_deriv(double a, double b, int n, double x) {
  if (n == 0) return 0.0;
  return std::sqrt(n * (n + a + b + 1)) * jacobi_one(a + 1, b + 1, n - 1, x);
}

// Collapsed coordinates on the (-1,-1),(1,-1),(-1,1) triangle.
void collapse(double r, double s, double& a, double& b) {
  a = (s != 1.0) ? 2.0 * (1.0 + r) / (1.0 - s) - 1.0 : -1.0;
  b = s;
}

// 1D nodal basis built over a modal Legendre representation.
struct Nodal1D {
  Eigen::VectorXd nodes; // on [0,1]
  Eigen::MatrixXd vinv;

  static Eigen::MatrixXd legendre_vals(const Eigen::VectorXd& t, int p) {
    Eigen::MatrixXd M(t.size(), p + 1);
    for (Eigen::Index k = 0; k < t.size(); ++k)
      M.row(k) = jacobi_all(0, 0, p, 2.0 * t(k) - 1.0).transpose();
    return M;
  }
  static Eigen::MatrixXd legendre_derivs(const Eigen::VectorXd& t, int p) {
    Eigen::MatrixXd M(t.size(), p + 1);
    for (Eigen::Index k = 0; k < t.size(); ++k)
      for (int m = 0; m <= p; ++m)
        M(k, m) = 2.0 * jacobi_deriv(0, 0, m, 2.0 * t(k) - 1.0);
    return M;
  }

  explicit Nodal1D(const Eigen::VectorXd& nds) : nodes(nds) {
    const int p = static_cast<int>(nds.size()) - 1;
    Eigen::MatrixXd V = legendre_vals(nodes, p);
    vinv = V.inverse();
  }
  Eigen::MatrixXd eval(const Eigen::VectorXd& t) const {
    const int p = static_cast<int>(nodes.size()) - 1;
    return legendre_vals(t, p) * vinv;
  }
  Eigen::MatrixXd eval_deriv(const Eigen::VectorXd& t) const {
    const int p = static_cast<int>(nodes.size()) - 1;
    return legendre_derivs(t, p) * vinv;
  }
};

// Dubiner modal basis tables on the unit right triangle (xi,eta),
// mapped through r = 2 xi - 1, s = 2 eta - 1.
Eigen::MatrixXd tri_modal_vals(const Eigen::MatrixXd& pts, int p) {
  const int np = (p + 1) * (p + 2) / 2;
  Eigen::MatrixXd M(pts.rows(), np);
  for (Eigen::Index k = 0; k < pts.rows(); ++k) {
    double r = 2.0 * pts(k, 0) - 1.0, s = 2.0 * pts(k, 1) - 1.0;
    double a, b;
    collapse(r, s, a, b);
    Eigen::VectorXd Pa = jacobi_all(0, 0, p, a);
    int col = 0;
    for (int m = 0; m <= p; ++m) {
      Eigen::VectorXd Pb = jacobi_all(2 * m + 1, 0, p - m, b);
      double pw = std::pow(1.0 - b, m);
      for (int n2 = 0; n2 <= p - m; ++n2)
        M(k, col++) = std::sqrt(2.0) * Pa(m) * Pb(n2) * pw;
    }
  }
  return M;
}

// Reference gradients (d/dxi, d/deta) of the triangle modal basis.
std::array<Eigen::MatrixXd, 2> tri_modal_grads(const Eigen::MatrixXd& pts, int p) {
  const int np = (p + 1) * (p + 2) / 2;
  Eigen::MatrixXd Gr(pts.rows(), np), Gs(pts.rows(), np);
  for (Eigen::Index k = 0; k < pts.rows(); ++k) {
    double r = 2.0 * pts(k, 0) - 1.0, s = 2.0 * pts(k, 1) - 1.0;
    double a, b;
    collapse(r, s, a, b);
    int col = 0;
    for (int m = 0; m <= p; ++m) {
      double fa = jacobi_one(0, 0, m, a);
      double dfa = jacobi_deriv(0, 0, m, a);
      for (int n2 = 0; n2 <= p - m; ++n2) {
        double gb = jacobi_one(2 * m + 1, 0, n2, b);
        double dgb = jacobi_deriv(2 * m + 1, 0, n2, b);
        double dmdr = dfa * gb;
        double dmds = dfa * gb * 0.5 * (1.0 + a);
        if (m > 0) {
          double f = std::pow(0.5 * (1.0 - b), m - 1);
          dmdr *= f;
          dmds *= f;
        }
        double tmp = dgb * std::pow(0.5 * (1.0 - b), m);
        if (m > 0) tmp -= 0.5 * m * gb * std::pow(0.5 * (1.0 - b), m - 1);
        dmds += fa * tmp;
        double scale = std::pow(2.0, m + 0.5);
        // extra factor 2: unit triangle -> (-1,1) triangle map
        Gr(k, col) = 2.0 * scale * dmdr;
        Gs(k, col) = 2.0 * scale * dmds;
        ++col;
      }
    }
  }
  return {Gr, Gs};
}

Eigen::MatrixXd tri_nodes_equispaced(int p) {
  const int np = (p + 1) * (p + 2) / 2;
  Eigen::MatrixXd nodes(np, 2);
  int k = 0;
  for (int j = 0; j <= p; ++j)
    for (int i = 0; i <= p - j; ++i, ++k)
      nodes.row(k) << double(i) / p, double(j) / p;
  return nodes;
}

int tri_row_offset(int p, int j) { return j * (p + 1) - j * (j - 1) / 2; }

} // namespace

Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Quadrature1D q;
  q.points.resize(n);
  q.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(n, x, p, dp);
      double dx = -p / dp;
      x += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p, dp;
    legendre(n, x, p, dp);
    q.points(n - 1 - k) = 0.5 * (x + 1.0);
    q.weights(n - 1 - k) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

Eigen::VectorXd gauss_lobatto_points(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_points: n must be >= 2");
  const int N = n - 1;
  Eigen::VectorXd x(n);
  x(0) = -1.0;
  x(N) = 1.0;
  for (int k = 1; k < N; ++k) {
    double y = std::cos(M_PI * k / N);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(N, y, p, dp);
      double d2p = (2.0 * y * dp - N * (N + 1) * p) / (1.0 - y * y);
      double dy = -dp / d2p;
      y += dy;
      if (std::abs(dy) < 1e-15) break;
    }
    x(N - k) = y;
  }
  return 0.5 * (x.array() + 1.0);
}

Eigen::MatrixXd ReferenceElement::eval_basis(const Eigen::MatrixXd& pts) const {
  if (kind == ElemKind::triangle) return tri_modal_vals(pts, degree) * vandermonde_inv_;
  // tensor product of 1D nodal bases at the Gauss-Lobatto nodes
  Nodal1D n1(face_nodes_1d);
  Eigen::MatrixXd Lx = n1.eval(pts.col(0));
  Eigen::MatrixXd Ly = n1.eval(pts.col(1));
  const int p = degree;
  Eigen::MatrixXd out(pts.rows(), num_nodes);
  for (Eigen::Index k = 0; k < pts.rows(); ++k)
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) out(k, j * (p + 1) + i) = Lx(k, i) * Ly(k, j);
  return out;
}

std::array<Eigen::MatrixXd, 2> ReferenceElement::eval_dbasis(const Eigen::MatrixXd& pts) const {
  if (kind == ElemKind::triangle) {
    auto g = tri_modal_grads(pts, degree);
    return {g[0] * vandermonde_inv_, g[1] * vandermonde_inv_};
  }
  Nodal1D n1(face_nodes_1d);
  Eigen::MatrixXd Lx = n1.eval(pts.col(0));
  Eigen::MatrixXd Ly = n1.eval(pts.col(1));
  Eigen::MatrixXd Dx = n1.eval_deriv(pts.col(0));
  Eigen::MatrixXd Dy = n1.eval_deriv(pts.col(1));
  const int p = degree;
  Eigen::MatrixXd gx(pts.rows(), num_nodes), gy(pts.rows(), num_nodes);
  for (Eigen::Index k = 0; k < pts.rows(); ++k)
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) {
        gx(k, j * (p + 1) + i) = Dx(k, i) * Ly(k, j);
        gy(k, j * (p + 1) + i) = Lx(k, i) * Dy(k, j);
      }
  return {gx, gy};
}

Eigen::Vector2d ReferenceElement::face_point(int f, double t) const {
  if (kind == ElemKind::triangle) {
    switch (f) {
      case 0: return {t, 0.0};
      case 1: return {1.0 - t, t};
      case 2: return {0.0, 1.0 - t};
    }
  } else {
    switch (f) {
      case 0: return {t, 0.0};
      case 1: return {1.0, t};
      case 2: return {1.0 - t, 1.0};
      case 3: return {0.0, 1.0 - t};
    }
  }
  throw std::invalid_argument("face_point: bad face index");
}

std::vector<std::vector<int>> ReferenceElement::linear_subcells() const {
  const int g = degree;
  std::vector<std::vector<int>> cells;
  if (kind == ElemKind::triangle) {
    auto idx = [&](int i, int j) { return tri_row_offset(g, j) + i; };
    for (int j = 0; j < g; ++j) {
      for (int i = 0; i < g - j; ++i) {
        cells.push_back({idx(i, j), idx(i + 1, j), idx(i, j + 1)});
        if (i < g - j - 1)
          cells.push_back({idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});
      }
    }
  } else {
    auto idx = [&](int i, int j) { return j * (g + 1) + i; };
    for (int j = 0; j < g; ++j)
      for (int i = 0; i < g; ++i)
        cells.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});
  }
  return cells;
}

ReferenceElement build_reference_element(ElemKind kind, int p) {
  if (p < 1 || p > 8)
    throw std::invalid_argument("make_reference_element: degree must be in [1,8]");
  ReferenceElement re;
  re.kind = kind;
  re.degree = p;
  re.nodes_per_face = p + 1;
  re.face_nodes_1d = gauss_lobatto_points(p + 1);

  if (kind == ElemKind::triangle) {
    re.num_faces = 3;
    re.num_nodes = (p + 1) * (p + 2) / 2;
    re.nodes = tri_nodes_equispaced(p);
    Eigen::MatrixXd V = tri_modal_vals(re.nodes, p);
    re.vandermonde_inv_ = V.inverse();

    re.corner_nodes = {0, p, re.num_nodes - 1, -1};
    auto& f0 = re.face_node_ids[0];
    auto& f1 = re.face_node_ids[1];
    auto& f2 = re.face_node_ids[2];
    for (int i = 0; i <= p; ++i) f0.push_back(i);
    for (int j = 0; j <= p; ++j) f1.push_back(tri_row_offset(p, j) + (p - j));
    for (int j = p; j >= 0; --j) f2.push_back(tri_row_offset(p, j));
    re.face_tangent = {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 1),
                       Eigen::Vector2d(0, -1), Eigen::Vector2d(0, 0)};

    // Duffy-collapsed Gauss rule, exact for total degree <= 2p+1
    Quadrature1D qx = gauss_legendre(p + 1), qy = gauss_legendre(p + 2);
    const int nq = (p + 1) * (p + 2);
    re.qpoints.resize(nq, 2);
    re.qweights.resize(nq);
    int k = 0;
    for (int j = 0; j < p + 2; ++j)
      for (int i = 0; i < p + 1; ++i, ++k) {
        double eta = qy.points(j), xi = qx.points(i);
        re.qpoints.row(k) << xi * (1.0 - eta), eta;
        re.qweights(k) = qx.weights(i) * qy.weights(j) * (1.0 - eta);
      }
  } else {
    re.num_faces = 4;
    re.num_nodes = (p + 1) * (p + 1);
    const Eigen::VectorXd& g = re.face_nodes_1d;
    re.nodes.resize(re.num_nodes, 2);
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) re.nodes.row(j * (p + 1) + i) << g(i), g(j);

    re.corner_nodes = {0, p, (p + 1) * (p + 1) - 1, p * (p + 1)};
    for (int i = 0; i <= p; ++i) re.face_node_ids[0].push_back(i);
    for (int j = 0; j <= p; ++j) re.face_node_ids[1].push_back(j * (p + 1) + p);
    for (int k2 = 0; k2 <= p; ++k2) re.face_node_ids[2].push_back(p * (p + 1) + (p - k2));
    for (int k2 = 0; k2 <= p; ++k2) re.face_node_ids[3].push_back((p - k2) * (p + 1));
    re.face_tangent = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                       Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, -1)};

    Quadrature1D q1 = gauss_legendre(p + 1);
    const int nq = (p + 1) * (p + 1);
    re.qpoints.resize(nq, 2);
    re.qweights.resize(nq);
    int k = 0;
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i, ++k) {
        re.qpoints.row(k) << q1.points(i), q1.points(j);
        re.qweights(k) = q1.weights(i) * q1.weights(j);
      }
  }

  re.basis_q = re.eval_basis(re.qpoints);
  re.dbasis_q = re.eval_dbasis(re.qpoints);

  Quadrature1D fq = gauss_legendre(p + 1);
  re.fq_points = fq.points;
  re.fq_weights = fq.weights;
  for (int f = 0; f < re.num_faces; ++f) {
    Eigen::MatrixXd pts(fq.points.size(), 2);
    for (Eigen::Index k = 0; k < fq.points.size(); ++k)
      pts.row(k) = re.face_point(f, fq.points(k)).transpose();
    re.face_basis[f] = re.eval_basis(pts);
    re.face_dbasis[f] = re.eval_dbasis(pts);
  }

  Nodal1D trace(re.face_nodes_1d);
  re.trace_basis_q = trace.eval(re.fq_points);
  re.trace_basis_nodes = trace.eval(re.face_nodes_1d);
  return re;
}

const ReferenceElement& make_reference_element(ElemKind kind, int p) {
  static std::map<std::pair<int, int>, std::unique_ptr<const ReferenceElement>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(static_cast<int>(kind), p);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto re = std::make_unique<const ReferenceElement>(build_reference_element(kind, p));
    it = cache.emplace(key, std::move(re)).first;
  }
  return *it->second;
}

} // namespace mahdg
