#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "hybriddg/operators.hpp"
#include "hybriddg/refelem.hpp"

using namespace hdg;

namespace {

// K(i,j) = int phi_i d_dir phi_j on the reference element, assembled from the
// operator bundle of each element type.
Eigen::MatrixXd weak_derivative(const ElementOperators& op, int dir) {
  const int np = op.size();
  switch (op.type()) {
    case ElemType::hex: {
      const int n = op.degree() + 1;
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(np, np);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const int row = i + n * (j + n * k);
            const double w = op.w1(i) * op.w1(j) * op.w1(k);
            const int idx[3] = {i, j, k};
            for (int m = 0; m < n; ++m) {
              int c[3] = {i, j, k};
              c[dir] = m;
              K(row, c[0] + n * (c[1] + n * c[2])) += w * op.D1(idx[dir], m);
            }
          }
      return K;
    }
    case ElemType::tet: {
      const Eigen::MatrixXd& D = dir == 0 ? op.Dr : (dir == 1 ? op.Ds : op.Dt);
      return op.M * D;
    }
    case ElemType::pyramid: return dir == 0 ? op.Dr : (dir == 1 ? op.Ds : op.Dt);
    case ElemType::wedge: {
      const Eigen::Index nt = op.Vq.cols(), nl = op.Vl.cols();
      const Eigen::Index qt = op.Vq.rows(), ql = op.Vl.rows();
      Eigen::MatrixXd V(qt * ql, np), Vd(qt * ql, np);
      Eigen::VectorXd w(qt * ql);
      for (Eigen::Index b = 0; b < ql; ++b)
        for (Eigen::Index a = 0; a < qt; ++a) {
          const Eigen::Index q = a + qt * b;
          w(q) = op.wq(a) * op.wl(b);
          for (Eigen::Index j = 0; j < nl; ++j)
            for (Eigen::Index m = 0; m < nt; ++m) {
              V(q, m + nt * j) = op.Vq(a, m) * op.Vl(b, j);
              const double d = dir == 0 ? op.Vqr(a, m) * op.Vl(b, j)
                                        : (dir == 1 ? op.Vq(a, m) * op.Vls(b, j) : op.Vqt(a, m) * op.Vl(b, j));
              Vd(q, m + nt * j) = d;
            }
        }
      return V.transpose() * w.asDiagonal() * Vd;
    }
  }
  return {};
}

// sum_f int_f phi_i phi_j n_dir, through the trace operators.
Eigen::MatrixXd boundary_term(const ElementOperators& op, int dir) {
  const ReferenceElement& re = reference_element(op.type());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(op.size(), op.size());
  for (int f = 0; f < op.num_faces(); ++f) {
    const Eigen::MatrixXd E = op.trace(f, 0).to_dense();
    const Eigen::VectorXd w = op.face_rule(f).weights * (re.faces[f].param_scale * re.faces[f].normal(dir));
    B += E.transpose() * w.asDiagonal() * E;
  }
  return B;
}

Eigen::VectorXd project_constant(const ElementOperators& op) {
  const QuadratureRule q = element_rule(op.type(), op.degree() + 1);
  return op.basis().values(q.points).transpose() * q.weights;
}

}  // namespace

TEST(HexOperators, LinearGaussDerivative) {
  const ElementOperators op(ElemType::hex, 1, Flavor::gauss);
  const double h = std::sqrt(3.0) / 2;
  EXPECT_NEAR(op.D1(0, 0), -h, 1e-14);
  EXPECT_NEAR(op.D1(0, 1), h, 1e-14);
  EXPECT_NEAR(op.D1(1, 0), -h, 1e-14);
  EXPECT_NEAR(op.D1(1, 1), h, 1e-14);
}

TEST(HexOperators, DifferentiatesPolynomialsExactly) {
  for (Flavor f : {Flavor::gauss, Flavor::lobatto})
    for (int N = 1; N <= 8; ++N) {
      const ElementOperators op(ElemType::hex, N, f);
      const Eigen::VectorXd x = static_cast<const HexBasis&>(op.basis()).line().nodes();
      const Eigen::VectorXd u = x.array().pow(N) + 2 * x.array();
      const Eigen::VectorXd du = N * x.array().pow(N - 1) + 2.0;
      EXPECT_LT((op.D1 * u - du).cwiseAbs().maxCoeff(), 1e-12 * N * N);
    }
}

TEST(HexOperators, FaceExtraction) {
  for (int N = 1; N <= 6; ++N) {
    const ElementOperators sem(ElemType::hex, N, Flavor::lobatto);
    for (int f = 0; f < 6; ++f)
      for (int o = 0; o < num_orientations(FaceType::quad); ++o) {
        const Eigen::MatrixXd E = sem.trace(f, o).to_dense();
        for (Eigen::Index q = 0; q < E.rows(); ++q) {
          EXPECT_NEAR(E.row(q).sum(), 1.0, 1e-14);
          EXPECT_NEAR(E.row(q).cwiseAbs().maxCoeff(), 1.0, 1e-14);  // a unit row: pure index selection
        }
      }
    const ElementOperators gl(ElemType::hex, N, Flavor::gauss);
    for (int f = 0; f < 6; ++f) {
      const Eigen::MatrixXd E = gl.trace(f, 0).to_dense();
      EXPECT_LT((E.rowwise().sum().array() - 1).abs().maxCoeff(), 1e-13);
    }
  }
}

TEST(TetOperators, DifferentiatesPolynomials) {
  for (int N = 1; N <= 6; ++N) {
    const ElementOperators op(ElemType::tet, N, Flavor::gauss);
    const Eigen::MatrixXd& X = static_cast<const TetNodalBasis&>(op.basis()).nodes();
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(op.size());
    EXPECT_LT((op.Dr * one).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((op.Dr * X.col(0) - one).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((op.Ds * X.col(1) - one).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((op.Dt * X.col(2) - one).cwiseAbs().maxCoeff(), 1e-12);
    if (N >= 2) {
      const Eigen::VectorXd r2 = X.col(0).array().square();
      EXPECT_LT((op.Dr * r2 - 2 * X.col(0)).cwiseAbs().maxCoeff(), 1e-11);
      const Eigen::VectorXd st = X.col(1).cwiseProduct(X.col(2));
      EXPECT_LT((op.Dt * st - X.col(1)).cwiseAbs().maxCoeff(), 1e-11);
    }
  }
}

TEST(TetOperators, FaceTracesInterpolateExactly) {
  for (int N = 1; N <= 5; ++N) {
    const ElementOperators op(ElemType::tet, N, Flavor::gauss);
    const Eigen::MatrixXd& X = static_cast<const TetNodalBasis&>(op.basis()).nodes();
    auto f = [N](double r, double s, double t) { return std::pow(r + 0.3 * s - 0.2 * t + 0.1, N); };
    Eigen::VectorXd u(op.size());
    for (int i = 0; i < op.size(); ++i) u(i) = f(X(i, 0), X(i, 1), X(i, 2));
    for (int fc = 0; fc < 4; ++fc)
      for (int o = 0; o < num_orientations(FaceType::tri); ++o) {
        const Eigen::MatrixX2d& P = op.face_points(fc, o);
        Eigen::VectorXd tr(P.rows());
        op.trace(fc, o).apply(u.data(), u.size(), tr.data());
        for (Eigen::Index q = 0; q < P.rows(); ++q) {
          const Vec3 x = face_to_reference(ElemType::tet, fc, P(q, 0), P(q, 1));
          EXPECT_NEAR(tr(q), f(x(0), x(1), x(2)), 1e-12);
        }
      }
  }
}

TEST(WedgeOperators, InterpolationMatchesBasis) {
  for (int N = 1; N <= 5; ++N) {
    const ElementOperators op(ElemType::wedge, N, Flavor::gauss);
    const QuadratureRule tri = triangle_rule(N), line = gauss_legendre_1d(N + 1);
    Eigen::MatrixXd X(tri.size() * line.size(), 3);
    for (Eigen::Index b = 0; b < line.size(); ++b)
      for (Eigen::Index a = 0; a < tri.size(); ++a)
        X.row(a + tri.size() * b) << tri.points(a, 0), line.points(b, 0), tri.points(a, 1);
    const Tabulation T = op.basis().tabulate(X);
    const Eigen::Index nt = op.Vq.cols();
    for (Eigen::Index b = 0; b < line.size(); ++b)
      for (Eigen::Index a = 0; a < tri.size(); ++a)
        for (int m = 0; m < op.size(); ++m) {
          const Eigen::Index q = a + tri.size() * b, mt = m % nt, ml = m / nt;
          EXPECT_NEAR(T.V(q, m), op.Vq(a, mt) * op.Vl(b, ml), 1e-12);
          EXPECT_NEAR(T.Vr(q, m), op.Vqr(a, mt) * op.Vl(b, ml), 1e-11);
          EXPECT_NEAR(T.Vs(q, m), op.Vq(a, mt) * op.Vls(b, ml), 1e-11);
          EXPECT_NEAR(T.Vt(q, m), op.Vqt(a, mt) * op.Vl(b, ml), 1e-11);
        }
  }
}

TEST(Operators, DiscreteIntegrationByParts) {
  // K + K^T equals the boundary form: the identity behind the skew/strong equivalence.
  // GLL quad faces underintegrate wedge and pyramid traces, so those are GL only.
  for (ElemType t : all_elem_types)
    for (Flavor f : {Flavor::gauss, Flavor::lobatto})
      for (int N = 1; N <= 4; ++N) {
        if (f == Flavor::lobatto && (t == ElemType::wedge || t == ElemType::pyramid)) continue;
        const ElementOperators op(t, N, f);
        for (int d = 0; d < 3; ++d) {
          const Eigen::MatrixXd K = weak_derivative(op, d);
          const Eigen::MatrixXd B = boundary_term(op, d);
          EXPECT_LT((K + K.transpose() - B).cwiseAbs().maxCoeff(), 1e-10 * B.cwiseAbs().maxCoeff())
              << to_string(t) << (f == Flavor::gauss ? " GL" : " SEM") << " N=" << N << " d=" << d;
        }
      }
}

TEST(Operators, LobattoFacesBreakIntegrationByPartsOnWedges) {
  const ElementOperators op(ElemType::wedge, 1, Flavor::lobatto);
  const Eigen::MatrixXd K = weak_derivative(op, 0), B = boundary_term(op, 0);
  EXPECT_GT((K + K.transpose() - B).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Operators, ConstantsHaveZeroDerivative) {
  for (ElemType t : all_elem_types)
    for (int N = 1; N <= 5; ++N) {
      const ElementOperators op(t, N, Flavor::gauss);
      const Eigen::VectorXd c = t == ElemType::hex || t == ElemType::tet ? Eigen::VectorXd::Ones(op.size())
                                                                         : project_constant(op);
      for (int d = 0; d < 3; ++d)
        EXPECT_LT((weak_derivative(op, d) * c).cwiseAbs().maxCoeff(), 1e-12) << to_string(t) << " " << N;
    }
}

TEST(PyramidOperators, MatchOverIntegratedQuadrature) {
  for (int N = 1; N <= 5; ++N) {
    const ElementOperators op(ElemType::pyramid, N, Flavor::gauss);
    ASSERT_EQ(op.Dr.rows(), op.size());
    ASSERT_EQ(op.Dr.cols(), op.size());
    const QuadratureRule q = collapsed_rule(ElemType::pyramid, N + 3);
    const Tabulation T = op.basis().tabulate(q.points);
    const Eigen::MatrixXd W = q.weights.asDiagonal();
    EXPECT_LT((T.V.transpose() * W * T.Vr - op.Dr).cwiseAbs().maxCoeff(), 1e-10) << N;
    EXPECT_LT((T.V.transpose() * W * T.Vs - op.Ds).cwiseAbs().maxCoeff(), 1e-10) << N;
    EXPECT_LT((T.V.transpose() * W * T.Vt - op.Dt).cwiseAbs().maxCoeff(), 1e-10) << N;
  }
}

TEST(PyramidOperators, DtOfTIsMassOnConstants) {
  for (int N = 1; N <= 5; ++N) {
    const ElementOperators op(ElemType::pyramid, N, Flavor::gauss);
    const QuadratureRule q = element_rule(ElemType::pyramid, N + 1);
    const Eigen::MatrixXd V = op.basis().values(q.points);
    const Eigen::VectorXd one = V.transpose() * q.weights;
    const Eigen::VectorXd t = V.transpose() * q.weights.cwiseProduct(q.points.col(2));
    // orthonormal basis: int phi * 1 equals the coefficients of 1
    EXPECT_LT((op.Dt * t - one).cwiseAbs().maxCoeff(), 1e-10) << N;
  }
}

TEST(WedgeOperators, ConstantStateHasNoVolumeDerivative) {
  const ElementOperators op(ElemType::wedge, 3, Flavor::gauss);
  const Eigen::VectorXd c = project_constant(op);
  for (int d = 0; d < 3; ++d) {
    EXPECT_LT((weak_derivative(op, d) * c).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((weak_derivative(op, d).transpose() * c - boundary_term(op, d) * c).cwiseAbs().maxCoeff(), 1e-12);
  }
}
