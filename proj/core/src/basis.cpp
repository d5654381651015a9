#include "hybriddg/basis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hybriddg/refelem.hpp"

namespace hdg {

int basis_size(ElemType type, int N) {
  switch (type) {
    case ElemType::hex: return (N + 1) * (N + 1) * (N + 1);
    case ElemType::wedge: return (N + 1) * (N + 1) * (N + 2) / 2;
    case ElemType::pyramid: return (N + 1) * (N + 2) * (2 * N + 3) / 6;
    case ElemType::tet: return (N + 1) * (N + 2) * (N + 3) / 6;
  }
  return 0;
}

// ----------------------------------------------------------------- hex

namespace {
QuadratureRule hex_line_rule(int N, Flavor f) {
  if (N < 1) throw std::invalid_argument("degree must be >= 1");
  return f == Flavor::lobatto ? gauss_lobatto_1d(N + 1) : gauss_legendre_1d(N + 1);
}
}  // namespace

HexBasis::HexBasis(int N, Flavor flavor)
    : Basis(ElemType::hex, N), flavor_(flavor), line_(hex_line_rule(N, flavor).points.col(0)),
      w1d_(hex_line_rule(N, flavor).weights) {}

Eigen::MatrixXd HexBasis::nodes() const {
  const int n = N_ + 1;
  Eigen::MatrixXd X(np_, 3);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int m = i + n * (j + n * k);
        X.row(m) << line_.nodes()(i), line_.nodes()(j), line_.nodes()(k);
      }
  return X;
}

Tabulation HexBasis::tabulate(const Eigen::MatrixXd& rst) const {
  const int n = N_ + 1;
  const Eigen::Index np = rst.rows();
  Tabulation T;
  T.V.resize(np, np_);
  T.Vr.resize(np, np_);
  T.Vs.resize(np, np_);
  T.Vt.resize(np, np_);
  for (Eigen::Index q = 0; q < np; ++q) {
    const Eigen::VectorXd lr = line_.values(rst(q, 0)), ls = line_.values(rst(q, 1)),
                          lt = line_.values(rst(q, 2));
    const Eigen::VectorXd dr = line_.derivatives(rst(q, 0)), ds = line_.derivatives(rst(q, 1)),
                          dt = line_.derivatives(rst(q, 2));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const int m = i + n * (j + n * k);
          T.V(q, m) = lr(i) * ls(j) * lt(k);
          T.Vr(q, m) = dr(i) * ls(j) * lt(k);
          T.Vs(q, m) = lr(i) * ds(j) * lt(k);
          T.Vt(q, m) = lr(i) * ls(j) * dt(k);
        }
  }
  return T;
}

// ----------------------------------------------------------------- tet

TetModalBasis::TetModalBasis(int N) : Basis(ElemType::tet, N) {}

Tabulation TetModalBasis::tabulate(const Eigen::MatrixXd& rst) const {
  const Eigen::Index np = rst.rows();
  Tabulation T;
  T.V.resize(np, np_);
  T.Vr.resize(np, np_);
  T.Vs.resize(np, np_);
  T.Vt.resize(np, np_);
  for (Eigen::Index q = 0; q < np; ++q) {
    const Vec3 abc = collapse(ElemType::tet, rst.row(q).transpose());
    const double a = abc(0), b = abc(1), c = abc(2);
    int m = 0;
    for (int i = 0; i <= N_; ++i)
      for (int j = 0; j <= N_ - i; ++j)
        for (int k = 0; k <= N_ - i - j; ++k, ++m) {
          const double fa = jacobi_p(i, 0, 0, a), dfa = jacobi_p_deriv(i, 0, 0, a);
          const double gb = jacobi_p(j, 2 * i + 1, 0, b), dgb = jacobi_p_deriv(j, 2 * i + 1, 0, b);
          const double hc = jacobi_p(k, 2 * (i + j) + 2, 0, c),
                       dhc = jacobi_p_deriv(k, 2 * (i + j) + 2, 0, c);
          const double hb = 0.5 * (1 - b), hcc = 0.5 * (1 - c);
          const double scale = std::pow(2.0, 2 * i + j + 1.5);

          T.V(q, m) = scale * fa * gb * std::pow(hb, i) * hc * std::pow(hcc, i + j);

          double vr = dfa * gb * hc;
          if (i > 0) vr *= std::pow(hb, i - 1);
          if (i + j > 0) vr *= std::pow(hcc, i + j - 1);

          double vs = 0.5 * (1 + a) * vr;
          double tmp = dgb * std::pow(hb, i);
          if (i > 0) tmp += -0.5 * i * gb * std::pow(hb, i - 1);
          if (i + j > 0) tmp *= std::pow(hcc, i + j - 1);
          tmp = fa * tmp * hc;
          vs += tmp;

          double vt = 0.5 * (1 + a) * vr + 0.5 * (1 + b) * tmp;
          double tmp2 = dhc * std::pow(hcc, i + j);
          if (i + j > 0) tmp2 -= 0.5 * (i + j) * hc * std::pow(hcc, i + j - 1);
          tmp2 = fa * gb * tmp2 * std::pow(hb, i);
          vt += tmp2;

          T.Vr(q, m) = scale * vr;
          T.Vs(q, m) = scale * vs;
          T.Vt(q, m) = scale * vt;
        }
  }
  return T;
}

namespace {

// Warp function along one edge (unit-normalised as in the classic 3D construction).
Eigen::VectorXd eval_warp(int p, const Eigen::VectorXd& xnodes, const Eigen::VectorXd& xout) {
  Eigen::VectorXd warp = Eigen::VectorXd::Zero(xout.size());
  Eigen::VectorXd xeq(p + 1);
  for (int i = 0; i <= p; ++i) xeq(i) = -1.0 + 2.0 * (p - i) / p;
  for (int i = 0; i <= p; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Constant(xout.size(), xnodes(i) - xeq(i));
    for (int j = 1; j < p; ++j)
      if (i != j) d = d.array() * (xout.array() - xeq(j)) / (xeq(i) - xeq(j));
    if (i != 0) d = -d / (xeq(i) - xeq(0));
    if (i != p) d = d / (xeq(i) - xeq(p));
    warp += d;
  }
  return warp;
}

void eval_shift(int p, double pval, const Eigen::VectorXd& L1, const Eigen::VectorXd& L2,
                const Eigen::VectorXd& L3, Eigen::VectorXd& dx, Eigen::VectorXd& dy) {
  const QuadratureRule gll = gauss_lobatto_1d(p + 1);
  Eigen::VectorXd gx(p + 1);
  for (int i = 0; i <= p; ++i) gx(i) = -gll.points(i, 0);
  const Eigen::ArrayXd b1 = L2.array() * L3.array();
  const Eigen::ArrayXd b2 = L1.array() * L3.array();
  const Eigen::ArrayXd b3 = L1.array() * L2.array();
  const Eigen::ArrayXd wf1 = 4 * eval_warp(p, gx, L3 - L2).array();
  const Eigen::ArrayXd wf2 = 4 * eval_warp(p, gx, L1 - L3).array();
  const Eigen::ArrayXd wf3 = 4 * eval_warp(p, gx, L2 - L1).array();
  const Eigen::ArrayXd w1 = b1 * wf1 * (1 + (pval * L1.array()).square());
  const Eigen::ArrayXd w2 = b2 * wf2 * (1 + (pval * L2.array()).square());
  const Eigen::ArrayXd w3 = b3 * wf3 * (1 + (pval * L3.array()).square());
  dx = (w1 + std::cos(2 * M_PI / 3) * w2 + std::cos(4 * M_PI / 3) * w3).matrix();
  dy = (std::sin(2 * M_PI / 3) * w2 + std::sin(4 * M_PI / 3) * w3).matrix();
}

}  // namespace

Eigen::MatrixXd tet_warp_blend_nodes(int p) {
  static const double alpopt[15] = {0, 0, 0, 0.1002, 1.1332, 1.5608, 1.3413, 1.2577,
                                    1.1603, 1.10153, 0.6080, 0.4523, 0.8856, 0.8717, 0.9655};
  const double alpha = p <= 15 ? alpopt[p - 1] : 1.0;
  const int np = (p + 1) * (p + 2) * (p + 3) / 6;
  const double tol = 1e-10;

  Eigen::VectorXd r(np), s(np), t(np);
  int sk = 0;
  for (int n = 0; n <= p; ++n)
    for (int m = 0; m <= p - n; ++m)
      for (int q = 0; q <= p - n - m; ++q, ++sk) {
        r(sk) = -1.0 + q * 2.0 / p;
        s(sk) = -1.0 + m * 2.0 / p;
        t(sk) = -1.0 + n * 2.0 / p;
      }
  const Eigen::VectorXd L1 = 0.5 * (1 + t.array()).matrix();
  const Eigen::VectorXd L2 = 0.5 * (1 + s.array()).matrix();
  const Eigen::VectorXd L3 = -0.5 * (1 + r.array() + s.array() + t.array()).matrix();
  const Eigen::VectorXd L4 = 0.5 * (1 + r.array()).matrix();

  const Eigen::RowVector3d v1(-1, -1 / std::sqrt(3.0), -1 / std::sqrt(6.0));
  const Eigen::RowVector3d v2(1, -1 / std::sqrt(3.0), -1 / std::sqrt(6.0));
  const Eigen::RowVector3d v3(0, 2 / std::sqrt(3.0), -1 / std::sqrt(6.0));
  const Eigen::RowVector3d v4(0, 0, 3 / std::sqrt(6.0));
  Eigen::RowVector3d t1[4] = {v2 - v1, v2 - v1, v3 - v2, v3 - v1};
  Eigen::RowVector3d t2[4] = {v3 - 0.5 * (v1 + v2), v4 - 0.5 * (v1 + v2), v4 - 0.5 * (v2 + v3),
                              v4 - 0.5 * (v1 + v3)};
  for (int f = 0; f < 4; ++f) {
    t1[f].normalize();
    t2[f].normalize();
  }

  Eigen::MatrixXd XYZ = L3 * v1 + L4 * v2 + L2 * v3 + L1 * v4;
  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(np, 3);
  for (int face = 0; face < 4; ++face) {
    const Eigen::VectorXd *La, *Lb, *Lc, *Ld;
    switch (face) {
      case 0: La = &L1; Lb = &L2; Lc = &L3; Ld = &L4; break;
      case 1: La = &L2; Lb = &L1; Lc = &L3; Ld = &L4; break;
      case 2: La = &L3; Lb = &L1; Lc = &L4; Ld = &L2; break;
      default: La = &L4; Lb = &L1; Lc = &L3; Ld = &L2; break;
    }
    Eigen::VectorXd warp1, warp2;
    eval_shift(p, alpha, *Lb, *Lc, *Ld, warp1, warp2);
    Eigen::ArrayXd blend = Lb->array() * Lc->array() * Ld->array();
    const Eigen::ArrayXd denom =
        (Lb->array() + 0.5 * La->array()) * (Lc->array() + 0.5 * La->array()) * (Ld->array() + 0.5 * La->array());
    for (int i = 0; i < np; ++i)
      if (denom(i) > tol) blend(i) = (1 + std::pow(alpha * (*La)(i), 2)) * blend(i) / denom(i);
    for (int i = 0; i < np; ++i) shift.row(i) += blend(i) * warp1(i) * t1[face] + blend(i) * warp2(i) * t2[face];
    for (int i = 0; i < np; ++i) {
      const int cnt = ((*Lb)(i) > tol) + ((*Lc)(i) > tol) + ((*Ld)(i) > tol);
      if ((*La)(i) < tol && cnt < 3) shift.row(i) = warp1(i) * t1[face] + warp2(i) * t2[face];
    }
  }
  XYZ += shift;

  Eigen::Matrix3d A;
  A.col(0) = 0.5 * (v2 - v1).transpose();
  A.col(1) = 0.5 * (v3 - v1).transpose();
  A.col(2) = 0.5 * (v4 - v1).transpose();
  const Eigen::Vector3d off = 0.5 * (v2 + v3 + v4 - v1).transpose();
  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(A);
  Eigen::MatrixXd rst(np, 3);
  for (int i = 0; i < np; ++i) rst.row(i) = lu.solve(XYZ.row(i).transpose() - off).transpose();
  return rst;
}

TetNodalBasis::TetNodalBasis(int N) : Basis(ElemType::tet, N), modal_(N) {
  if (N < 1) throw std::invalid_argument("TetNodalBasis: degree must be >= 1");
  nodes_ = tet_warp_blend_nodes(N);
  const Eigen::MatrixXd V = modal_.tabulate(nodes_).V;
  vinv_ = V.inverse();
  mass_ = vinv_.transpose() * vinv_;
  face_nodes_.resize(4);
  const double tol = 1e-10;
  for (int i = 0; i < np_; ++i) {
    const double r = nodes_(i, 0), s = nodes_(i, 1), t = nodes_(i, 2);
    if (std::abs(1 + t) < tol) face_nodes_[0].push_back(i);
    if (std::abs(1 + s) < tol) face_nodes_[1].push_back(i);
    if (std::abs(1 + r + s + t) < tol) face_nodes_[2].push_back(i);
    if (std::abs(1 + r) < tol) face_nodes_[3].push_back(i);
  }
}

Tabulation TetNodalBasis::tabulate(const Eigen::MatrixXd& rst) const {
  Tabulation T = modal_.tabulate(rst);
  T.V = T.V * vinv_;
  T.Vr = T.Vr * vinv_;
  T.Vs = T.Vs * vinv_;
  T.Vt = T.Vt * vinv_;
  return T;
}

// ----------------------------------------------------------------- wedge

WedgeBasis::WedgeBasis(int N) : Basis(ElemType::wedge, N), ntri_((N + 1) * (N + 2) / 2) {}

void WedgeBasis::tabulate_tri(const Eigen::MatrixX2d& rt, Eigen::MatrixXd& V, Eigen::MatrixXd& Vr,
                              Eigen::MatrixXd& Vt) const {
  const Eigen::Index np = rt.rows();
  V.resize(np, ntri_);
  Vr.resize(np, ntri_);
  Vt.resize(np, ntri_);
  for (Eigen::Index q = 0; q < np; ++q) {
    const double r = rt(q, 0), t = rt(q, 1);
    const double a = (1 - t) > 1e-14 ? 2 * (1 + r) / (1 - t) - 1 : -1.0;
    const double b = t;
    int m = 0;
    for (int i = 0; i <= N_; ++i)
      for (int k = 0; k <= N_ - i; ++k, ++m) {
        const double fa = jacobi_p(i, 0, 0, a), dfa = jacobi_p_deriv(i, 0, 0, a);
        const double gb = jacobi_p(k, 2 * i + 1, 0, b), dgb = jacobi_p_deriv(k, 2 * i + 1, 0, b);
        const double hb = 0.5 * (1 - b);
        const double scale = std::pow(2.0, i + 0.5);
        V(q, m) = scale * fa * gb * std::pow(hb, i);
        double dr = dfa * gb;
        if (i > 0) dr *= std::pow(hb, i - 1);
        double dt = dfa * gb * 0.5 * (1 + a);
        if (i > 0) dt *= std::pow(hb, i - 1);
        double tmp = dgb * std::pow(hb, i);
        if (i > 0) tmp -= 0.5 * i * gb * std::pow(hb, i - 1);
        dt += fa * tmp;
        Vr(q, m) = scale * dr;
        Vt(q, m) = scale * dt;
      }
  }
}

void WedgeBasis::tabulate_line(const Eigen::VectorXd& s, Eigen::MatrixXd& V, Eigen::MatrixXd& Vs) const {
  V.resize(s.size(), N_ + 1);
  Vs.resize(s.size(), N_ + 1);
  for (Eigen::Index q = 0; q < s.size(); ++q)
    for (int j = 0; j <= N_; ++j) {
      V(q, j) = jacobi_p(j, 0, 0, s(q));
      Vs(q, j) = jacobi_p_deriv(j, 0, 0, s(q));
    }
}

Tabulation WedgeBasis::tabulate(const Eigen::MatrixXd& rst) const {
  const Eigen::Index np = rst.rows();
  Eigen::MatrixX2d rt(np, 2);
  rt.col(0) = rst.col(0);
  rt.col(1) = rst.col(2);
  Eigen::MatrixXd Tv, Tr, Tt, Lv, Ls;
  tabulate_tri(rt, Tv, Tr, Tt);
  tabulate_line(rst.col(1), Lv, Ls);
  Tabulation T;
  T.V.resize(np, np_);
  T.Vr.resize(np, np_);
  T.Vs.resize(np, np_);
  T.Vt.resize(np, np_);
  for (Eigen::Index q = 0; q < np; ++q)
    for (int j = 0; j <= N_; ++j)
      for (int m = 0; m < ntri_; ++m) {
        const int idx = m + ntri_ * j;
        T.V(q, idx) = Tv(q, m) * Lv(q, j);
        T.Vr(q, idx) = Tr(q, m) * Lv(q, j);
        T.Vs(q, idx) = Tv(q, m) * Ls(q, j);
        T.Vt(q, idx) = Tt(q, m) * Lv(q, j);
      }
  return T;
}

// ----------------------------------------------------------------- pyramid

PyramidBasis::PyramidBasis(int N) : Basis(ElemType::pyramid, N) {
  const QuadratureRule gl = gauss_legendre_1d(N + 2);
  for (int k = 0; k <= N; ++k) {
    levels_.push_back(gauss_legendre_1d(k + 1));
    lagr_.emplace_back(levels_.back().points.col(0));
    double s = 0.0;
    for (Eigen::Index q = 0; q < gl.size(); ++q) {
      const double c = gl.points(q, 0);
      const double p = jacobi_p(N - k, 2.0 * k + 3.0, 0.0, c);
      s += gl.weights(q) * std::pow(0.5 * (1 - c), 2 * k + 2) * p * p;
    }
    nrm_.push_back(std::sqrt(s));
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= k; ++i) idx_.push_back({k, i, j});
  }
}

Eigen::Vector2d PyramidBasis::node_ab(int m) const {
  const Index& id = idx_.at(m);
  return {levels_[id.k].points(id.i, 0), levels_[id.k].points(id.j, 0)};
}

double PyramidBasis::c_factor(int k, double c) const {
  return std::pow(0.5 * (1 - c), k) * jacobi_p(N_ - k, 2.0 * k + 3.0, 0.0, c) / nrm_[k];
}

double PyramidBasis::c_factor_deriv(int k, double c) const {
  const double h = 0.5 * (1 - c);
  const double p = jacobi_p(N_ - k, 2.0 * k + 3.0, 0.0, c);
  const double dp = jacobi_p_deriv(N_ - k, 2.0 * k + 3.0, 0.0, c);
  double d = std::pow(h, k) * dp;
  if (k > 0) d -= 0.5 * k * std::pow(h, k - 1) * p;
  return d / nrm_[k];
}

Tabulation PyramidBasis::tabulate(const Eigen::MatrixXd& rst) const {
  const Eigen::Index np = rst.rows();
  Tabulation T;
  T.V.resize(np, np_);
  T.Vr.resize(np, np_);
  T.Vs.resize(np, np_);
  T.Vt.resize(np, np_);
  for (Eigen::Index q = 0; q < np; ++q) {
    const Vec3 abc = collapse(ElemType::pyramid, rst.row(q).transpose());
    const double a = abc(0), b = abc(1), c = abc(2);
    int m = 0;
    for (int k = 0; k <= N_; ++k) {
      const Eigen::VectorXd la = lagr_[k].values(a), lb = lagr_[k].values(b);
      const Eigen::VectorXd da = lagr_[k].derivatives(a), db = lagr_[k].derivatives(b);
      const Eigen::VectorXd& w = levels_[k].weights;
      const double cf = c_factor(k, c), dcf = c_factor_deriv(k, c);
      // ((1-c)/2)^(k-1) P / nrm, the factor left after d a / d r = 2/(1-c)
      const double cg =
          k > 0 ? std::pow(0.5 * (1 - c), k - 1) * jacobi_p(N_ - k, 2.0 * k + 3.0, 0.0, c) / nrm_[k] : 0.0;
      for (int j = 0; j <= k; ++j)
        for (int i = 0; i <= k; ++i, ++m) {
          const double s = 1.0 / std::sqrt(w(i) * w(j));
          const double vr = s * da(i) * lb(j) * cg;
          const double vs = s * la(i) * db(j) * cg;
          T.V(q, m) = s * la(i) * lb(j) * cf;
          T.Vr(q, m) = vr;
          T.Vs(q, m) = vs;
          T.Vt(q, m) = 0.5 * (1 + a) * vr + 0.5 * (1 + b) * vs + s * la(i) * lb(j) * dcf;
        }
    }
  }
  return T;
}

std::unique_ptr<Basis> make_basis(ElemType type, int N, Flavor flavor) {
  switch (type) {
    case ElemType::hex: return std::make_unique<HexBasis>(N, flavor);
    case ElemType::wedge: return std::make_unique<WedgeBasis>(N);
    case ElemType::pyramid: return std::make_unique<PyramidBasis>(N);
    case ElemType::tet: return std::make_unique<TetNodalBasis>(N);
  }
  return nullptr;
}

}  // namespace hdg
