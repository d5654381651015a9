#include "hybriddg/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>

#include "hybriddg/refelem.hpp"

namespace hdg {

void TraceOperator::apply(const double* u, Eigen::Index np, double* out) const {
  const Eigen::Map<const Eigen::VectorXd> uv(u, np);
  Eigen::Map<Eigen::VectorXd> ov(out, rows());
  if (dense)
    ov.noalias() = D * uv;
  else
    ov.noalias() = S * uv;
}

void TraceOperator::lift_add(const double* g, Eigen::Index np, double* r) const {
  const Eigen::Map<const Eigen::VectorXd> gv(g, rows());
  Eigen::Map<Eigen::VectorXd> rv(r, np);
  if (dense)
    rv.noalias() += D.transpose() * gv;
  else
    rv.noalias() += S.transpose() * gv;
}

QuadratureRule face_rule(FaceType ft, int N, Flavor flavor) {
  return ft == FaceType::tri ? triangle_rule(N) : quad_rule(N + 1, flavor == Flavor::lobatto);
}

ElementOperators::ElementOperators(ElemType type, int N, Flavor flavor)
    : type_(type), N_(N), flavor_(flavor), basis_(make_basis(type, N, flavor)) {
  if (N < 1) throw std::invalid_argument("ElementOperators: degree must be >= 1");
  const ReferenceElement& re = reference_element(type);
  for (const RefFace& f : re.faces) face_rules_.push_back(hdg::face_rule(f.type, N, flavor));
  switch (type) {
    case ElemType::hex: build_hex(); break;
    case ElemType::tet: build_tet(); break;
    case ElemType::wedge: build_wedge(); break;
    case ElemType::pyramid: build_pyramid(); break;
  }
  build_traces();
}

FaceType ElementOperators::face_type(int f) const { return reference_element(type_).faces.at(f).type; }

void ElementOperators::build_traces() {
  const ReferenceElement& re = reference_element(type_);
  const int np = size();
  face_pts_.resize(re.faces.size());
  traces_.resize(re.faces.size());
  for (std::size_t f = 0; f < re.faces.size(); ++f) {
    const FaceType ft = re.faces[f].type;
    const QuadratureRule& fr = face_rules_[f];
    const Eigen::Index nfq = fr.size();
    for (int o = 0; o < num_orientations(ft); ++o) {
      Eigen::MatrixX2d pts(nfq, 2);
      for (Eigen::Index q = 0; q < nfq; ++q) {
        Eigen::Vector2d p = orient_face_point(ft, o, fr.points(q, 0), fr.points(q, 1));
        // Quad rules are symmetric: snap to the exact rule point so that
        // Lagrange extraction stays exactly sparse.
        if (ft == FaceType::quad)
          for (Eigen::Index m = 0; m < nfq; ++m)
            if ((fr.points.row(m).transpose() - p).norm() < 1e-12) {
              p = fr.points.row(m).transpose();
              break;
            }
        pts.row(q) = p.transpose();
      }
      Eigen::MatrixXd rst(nfq, 3);
      for (Eigen::Index q = 0; q < nfq; ++q)
        rst.row(q) = face_to_reference(type_, static_cast<int>(f), pts(q, 0), pts(q, 1)).transpose();
      const Eigen::MatrixXd V = basis_->values(rst);

      TraceOperator op;
      if (type_ == ElemType::hex || type_ == ElemType::tet) {
        std::vector<Eigen::Triplet<double>> trip;
        if (type_ == ElemType::hex) {
          for (Eigen::Index q = 0; q < nfq; ++q)
            for (int j = 0; j < np; ++j)
              if (V(q, j) != 0.0) trip.emplace_back(static_cast<int>(q), j, V(q, j));
        } else {
          const auto& fn = static_cast<const TetNodalBasis&>(*basis_).face_nodes(static_cast<int>(f));
          for (Eigen::Index q = 0; q < nfq; ++q)
            for (int j : fn) trip.emplace_back(static_cast<int>(q), j, V(q, j));
        }
        op.S.resize(nfq, np);
        op.S.setFromTriplets(trip.begin(), trip.end());
        op.S.makeCompressed();
      } else {
        op.dense = true;
        op.D = V;
      }
      face_pts_[f].push_back(pts);
      traces_[f].push_back(std::move(op));
    }
  }
}

void ElementOperators::build_hex() {
  const auto& B = static_cast<const HexBasis&>(*basis_);
  D1 = B.line().diff_matrix();
  w1 = B.line_weights();
  const int n = N_ + 1;
  const Eigen::MatrixXd X = B.nodes();
  geom_pts_.points = X;
  geom_pts_.collapsed = X;
  geom_pts_.weights.resize(X.rows());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) geom_pts_.weights(i + n * (j + n * k)) = w1(i) * w1(j) * w1(k);
  geom_pts_.exactness = flavor_ == Flavor::lobatto ? 2 * N_ - 1 : 2 * N_ + 1;
  geom_pts_.convention = DegreeConvention::per_direction;
}

void ElementOperators::build_tet() {
  const auto& B = static_cast<const TetNodalBasis&>(*basis_);
  const Tabulation T = B.tabulate(B.nodes());
  Dr = T.Vr;
  Ds = T.Vs;
  Dt = T.Vt;
  M = B.mass();
  Minv = M.inverse();
  SrT = Dr.transpose() * M;
  SsT = Ds.transpose() * M;
  StT = Dt.transpose() * M;
  geom_pts_ = element_rule(ElemType::tet, N_);
}

void ElementOperators::build_wedge() {
  const auto& B = static_cast<const WedgeBasis&>(*basis_);
  const QuadratureRule tri = triangle_rule(N_);
  B.tabulate_tri(tri.points, Vq, Vqr, Vqt);
  wq = tri.weights;
  const QuadratureRule gl = gauss_legendre_1d(N_ + 1);
  B.tabulate_line(gl.points.col(0), Vl, Vls);
  wl = gl.weights;
  geom_pts_ = collapsed_rule(ElemType::wedge, N_ + 1);
}

void ElementOperators::build_pyramid() {
  const auto& B = static_cast<const PyramidBasis&>(*basis_);
  pyramid_weak_derivatives(B, Dr, Ds, Dt);
  const int np = B.size();
  geom_pts_.points.resize(np, 3);
  geom_pts_.collapsed.resize(np, 3);
  geom_pts_.weights = Eigen::VectorXd::Ones(np);
  for (int m = 0; m < np; ++m) {
    const Eigen::Vector2d ab = B.node_ab(m);
    const Vec3 abc(ab(0), ab(1), -1.0);
    geom_pts_.collapsed.row(m) = abc.transpose();
    geom_pts_.points.row(m) = duffy_map(ElemType::pyramid, abc).transpose();
  }
}

// Sum-factorised weak derivatives. Entries with trial level k >= test level n + 2
// vanish by orthogonality of the c-direction Jacobi factors; for the remaining
// entries the test level's GL points integrate the (a,b) products exactly.
void pyramid_weak_derivatives(const PyramidBasis& B, Eigen::MatrixXd& Dr, Eigen::MatrixXd& Ds,
                              Eigen::MatrixXd& Dt) {
  const int N = B.degree(), np = B.size();
  const QuadratureRule gc = gauss_legendre_1d(N + 2);
  Eigen::MatrixXd Mc = Eigen::MatrixXd::Zero(N + 1, N + 1), Md = Mc;
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k <= N; ++k)
      for (Eigen::Index q = 0; q < gc.size(); ++q) {
        const double c = gc.points(q, 0), h = 0.5 * (1 - c);
        // c-factor of test n is h^n Pn/nrm; trial derivative carries h^(k-1) Pk/nrm
        const double pn = jacobi_p(N - n, 2.0 * n + 3.0, 0.0, c) / B.c_norm(n);
        const double pk = jacobi_p(N - k, 2.0 * k + 3.0, 0.0, c) / B.c_norm(k);
        Mc(n, k) += gc.weights(q) * std::pow(h, n + k + 1) * pn * pk;
        Md(n, k) += gc.weights(q) * std::pow(h, n + 2) * pn * B.c_factor_deriv(k, c);
      }

  std::vector<Lagrange1D> lagr;
  for (int k = 0; k <= N; ++k) lagr.emplace_back(B.level_rule(k).points.col(0));

  Dr = Eigen::MatrixXd::Zero(np, np);
  Ds = Dr;
  Dt = Dr;
  const auto& idx = B.index();
  for (int p = 0; p < np; ++p) {
    const int n = idx[p].k;
    const QuadratureRule& tn = B.level_rule(n);
    const double al = tn.points(idx[p].i, 0), bm = tn.points(idx[p].j, 0);
    const double wl = tn.weights(idx[p].i), wm = tn.weights(idx[p].j);
    for (int k = 0; k <= std::min(N, n + 1); ++k) {
      const Eigen::VectorXd la = lagr[k].values(al), lb = lagr[k].values(bm);
      const Eigen::VectorXd da = lagr[k].derivatives(al), db = lagr[k].derivatives(bm);
      const QuadratureRule& tk = B.level_rule(k);
      for (int q = 0; q < np; ++q) {
        if (idx[q].k != k) continue;
        const int i = idx[q].i, j = idx[q].j;
        const double s = std::sqrt(wl * wm / (tk.weights(i) * tk.weights(j)));
        const double dr = s * da(i) * lb(j) * Mc(n, k);
        const double ds = s * la(i) * db(j) * Mc(n, k);
        const double dc = s * la(i) * lb(j) * Md(n, k);
        Dr(p, q) = dr;
        Ds(p, q) = ds;
        Dt(p, q) = 0.5 * (1 + al) * dr + 0.5 * (1 + bm) * ds + dc;
      }
    }
  }
}

}  // namespace hdg
