#include "hybriddg/dg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "hybriddg/refelem.hpp"

namespace hdg {

Formulation Formulation::from_string(const std::string& s) {
  if (s == "GL" || s == "gl" || s == "gauss") return gl();
  if (s == "SEM" || s == "sem" || s == "lobatto") return sem();
  throw std::invalid_argument("unknown formulation '" + s + "' (expected GL or SEM)");
}

Form Formulation::form(ElemType t) const {
  switch (t) {
    case ElemType::hex: return Form::strong;
    case ElemType::wedge: return Form::skew;
    case ElemType::pyramid: return flavor_ == Flavor::lobatto ? Form::skew : Form::strong;
    case ElemType::tet: return Form::strong;
  }
  return Form::strong;
}

namespace {

// out(i,j,k) = sum_l A(i,l) in(l,j,k) along `axis` of an n^3 array (index i + n(j + n k)).
void tensor_apply(const Eigen::MatrixXd& A, int n, int axis, const double* in, double* out, bool add) {
  const int s = axis == 0 ? 1 : (axis == 1 ? n : n * n);
  const int n3 = n * n * n;
  if (!add) std::fill(out, out + n3, 0.0);
  for (int base = 0; base < n3; ++base) {
    // visit each line once, starting from its first point
    if ((base / s) % n != 0) continue;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int l = 0; l < n; ++l) acc += A(i, l) * in[base + l * s];
      out[base + i * s] += acc;
    }
  }
}

}  // namespace

Discretization::Discretization(const HybridMesh& mesh, int N, Formulation form, AnalysisOptions opt)
    : mesh_(mesh), N_(N), form_(form), opt_(opt) {
  if (N < 1) throw std::invalid_argument("Discretization: degree must be >= 1");
  if (mesh.links.size() != mesh.elements.size())
    throw std::invalid_argument("Discretization: mesh connectivity has not been built");
  const int ne = mesh.size();
  elems_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const ElemType t = mesh.elements[e].type;
    if (!ops_.count(t)) ops_[t] = std::make_unique<ElementOperators>(t, N, form.flavor());
    Element& el = elems_[e];
    el.type = t;
    el.ops = ops_[t].get();
    el.np = el.ops->size();
    el.offset = ndof_;
    ndof_ += 4 * el.np;
    el.rho = mesh.material(e).rho;
    el.kappa = mesh.material(e).kappa;
    el.form = (opt.all_skew || t == ElemType::wedge) ? Form::skew : form.form(t);
    const int nf = num_faces(t);
    el.slots.resize(nf);
    std::set<int> nb;
    for (int f = 0; f < nf; ++f) {
      Slot& s = el.slots[f];
      s.nfq = static_cast<int>(el.ops->face_rule(f).size());
      s.trace_offset = ntrace_;
      ntrace_ += 4 * s.nfq;
      const FaceLink& l = mesh.links[e][f];
      s.nbr = l.nbr;
      s.nbr_face = l.nbr_face;
      if (l.nbr >= 0) nb.insert(l.nbr);
    }
    el.nbrs.assign(nb.begin(), nb.end());
  }
  // Shared face data is computed once, from the owner, at the owner's face points.
  for (int e = 0; e < ne; ++e) {
    const ElementMap map = mesh.element_map(e);
    for (int f = 0; f < num_faces(elems_[e].type); ++f) {
      if (!mesh.owns_face(e, f)) continue;
      const ElementOperators& op = *elems_[e].ops;
      const FaceGeometry g = face_geometry(map, f, op.face_points(f, 0));
      SharedFace sf;
      sf.wJs = op.face_rule(f).weights.cwiseProduct(g.dA);
      sf.n = g.normal;
      const int id = static_cast<int>(faces_.size());
      faces_.push_back(std::move(sf));
      Slot& s = elems_[e].slots[f];
      s.shared = id;
      s.owner = true;
      s.orient = 0;
      const FaceLink& l = mesh.links[e][f];
      if (l.nbr >= 0) {
        Slot& t = elems_[l.nbr].slots[l.nbr_face];
        if (t.nfq != s.nfq) throw std::logic_error("mismatched face point counts");
        t.shared = id;
        t.owner = false;
        t.orient = l.code;
      }
    }
  }
  for (int e = 0; e < ne; ++e) setup_element(e);
  trace_.assign(ntrace_, 0.0);
}

const ElementOperators& Discretization::ops(ElemType t) const {
  const auto it = ops_.find(t);
  if (it == ops_.end()) throw std::out_of_range("no elements of type " + to_string(t));
  return *it->second;
}

Form Discretization::element_form(int e) const { return elems_.at(e).form; }

void Discretization::setup_element(int e) {
  Element& el = elems_[e];
  const ElementMap map = mesh_.element_map(e);
  const QuadratureRule& gp = el.ops->geometry_points();
  const Eigen::Index nq = gp.size();
  el.J.resize(nq);
  el.G.resize(9, nq);
  if (el.type == ElemType::wedge) el.lsc.resize(3, nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const Vec3 abc = gp.collapsed.row(q).transpose();
    const Mat3 Jm = map.jacobian(abc);
    const double J = Jm.determinant();
    if (!(J > 0)) throw MeshError("element " + std::to_string(e) + " has non-positive Jacobian");
    const Mat3 Gi = Jm.inverse();
    el.J(q) = J;
    double scale = 1.0;
    switch (el.type) {
      case ElemType::hex: scale = gp.weights(q) * J; break;
      case ElemType::pyramid: scale = J; break;
      case ElemType::wedge: scale = gp.weights(q); break;
      case ElemType::tet: scale = 1.0; break;
    }
    for (int d = 0; d < 3; ++d)
      for (int c = 0; c < 3; ++c) el.G(3 * d + c, q) = scale * Gi(d, c);
    if (el.type == ElemType::wedge) {
      const Vec3 gx = Gi.transpose() * map.det_gradient_rst(abc);
      el.lsc.col(q) = gp.weights(q) * gx / (2.0 * J);
    }
  }
  if (el.type == ElemType::hex) el.wJ = gp.weights.cwiseProduct(el.J);
  if (el.type == ElemType::tet) {
    const double spread = (el.J.array() - el.J(0)).abs().maxCoeff();
    if (spread > 1e-10 * el.J(0)) throw MeshError("tetrahedron with non-affine map");
  }
  if (el.type == ElemType::wedge) {
    el.face_isqrtJ.resize(el.slots.size());
    for (std::size_t f = 0; f < el.slots.size(); ++f) {
      const auto& pts = el.ops->face_points(static_cast<int>(f), el.slots[f].orient);
      Eigen::VectorXd v(pts.rows());
      for (Eigen::Index q = 0; q < pts.rows(); ++q) {
        const Vec3 rst = face_to_reference(ElemType::wedge, static_cast<int>(f), pts(q, 0), pts(q, 1));
        v(q) = 1.0 / std::sqrt(map.det(collapse(ElemType::wedge, rst)));
      }
      el.face_isqrtJ[f] = v;
    }
  }
}

void Discretization::compute_traces(int e, const Eigen::VectorXd& U) const {
  const Element& el = elems_[e];
  const double* u = U.data() + el.offset;
  for (std::size_t f = 0; f < el.slots.size(); ++f) {
    const Slot& s = el.slots[f];
    const TraceOperator& T = el.ops->trace(static_cast<int>(f), s.orient);
    double* out = trace_.data() + s.trace_offset;
    for (int c = 0; c < 4; ++c) T.apply(u + c * el.np, el.np, out + c * s.nfq);
    if (el.type == ElemType::wedge) {
      const Eigen::VectorXd& w = el.face_isqrtJ[f];
      for (int c = 0; c < 4; ++c)
        for (int q = 0; q < s.nfq; ++q) out[c * s.nfq + q] *= w(q);
    }
  }
}

Penalties flux_penalties(const Material& minus, const Material& plus) {
  if (!(minus.rho > 0 && minus.kappa > 0 && plus.rho > 0 && plus.kappa > 0))
    throw std::invalid_argument("flux_penalties: materials must be positive");
  const double z = 0.5 * (minus.impedance() + plus.impedance());
  return {1.0 / z, z};
}

double Discretization::tau_p(int e, int f) const {
  const Slot& s = elems_.at(e).slots.at(f);
  const Material& m = mesh_.material(e);
  return opt_.penalty_scale * flux_penalties(m, s.nbr >= 0 ? mesh_.material(s.nbr) : m).tau_p;
}

double Discretization::tau_u(int e, int f) const {
  const Slot& s = elems_.at(e).slots.at(f);
  const Material& m = mesh_.material(e);
  return opt_.penalty_scale * flux_penalties(m, s.nbr >= 0 ? mesh_.material(s.nbr) : m).tau_u;
}

void Discretization::element_residual(int e, const Eigen::VectorXd& U, double* r) const {
  const Element& el = elems_[e];
  const double* u = U.data() + el.offset;
  std::fill(r, r + 4 * el.np, 0.0);
  switch (el.type) {
    case ElemType::hex: volume_hex(el, u, r); break;
    case ElemType::tet: volume_tet(el, u, r); break;
    case ElemType::wedge: volume_wedge(el, u, r); break;
    case ElemType::pyramid: volume_pyramid(el, u, r); break;
  }
  thread_local std::vector<double> g;
  const bool strong = el.form == Form::strong;
  for (std::size_t f = 0; f < el.slots.size(); ++f) {
    const Slot& s = el.slots[f];
    const int nq = s.nfq;
    const double* own = trace_.data() + s.trace_offset;
    const double* nb = nullptr;
    if (s.nbr >= 0) nb = trace_.data() + elems_[s.nbr].slots[s.nbr_face].trace_offset;
    const SharedFace& sf = faces_[s.shared];
    const double sign = s.owner ? 1.0 : -1.0;
    const double tp = tau_p(e, static_cast<int>(f)), tu = tau_u(e, static_cast<int>(f));
    g.resize(4 * nq);
    for (int q = 0; q < nq; ++q) {
      const double pm = own[q];
      const Vec3 um(own[nq + q], own[2 * nq + q], own[3 * nq + q]);
      double pp;
      Vec3 up;
      if (nb) {
        pp = nb[q];
        up = Vec3(nb[nq + q], nb[2 * nq + q], nb[3 * nq + q]);
      } else {
        pp = -pm;
        up = um;
      }
      const Vec3 n = sign * sf.n.col(q);
      const double w = sf.wJs(q);
      const double jp = pp - pm;
      const Vec3 ju = up - um;
      const double fp = strong ? 0.5 * (tp * jp - n.dot(ju)) : 0.5 * tp * jp - 0.5 * n.dot(up + um);
      const double fu = 0.5 * (tu * ju.dot(n) - jp);
      g[q] = w * fp;
      for (int c = 0; c < 3; ++c) g[(c + 1) * nq + q] = w * fu * n(c);
    }
    if (el.type == ElemType::wedge) {
      const Eigen::VectorXd& is = el.face_isqrtJ[f];
      for (int c = 0; c < 4; ++c)
        for (int q = 0; q < nq; ++q) g[c * nq + q] *= is(q);
    }
    const TraceOperator& T = el.ops->trace(static_cast<int>(f), s.orient);
    for (int c = 0; c < 4; ++c) T.lift_add(g.data() + c * nq, el.np, r + c * el.np);
  }
}

void Discretization::volume_hex(const Element& el, const double* u, double* r) const {
  const int n = N_ + 1, np = el.np;
  const Eigen::MatrixXd& D = el.ops->D1;
  thread_local std::vector<double> buf;
  buf.resize(4 * np);
  double* d0 = buf.data();
  double* F = buf.data() + np;  // 3 arrays
  const auto& G = el.G;         // w J dr_d/dx_c
  if (el.form == Form::strong) {
    // GLL collocation differentiates the contravariant flux J G u itself, so the
    // summation-by-parts identity cancels the volume and surface quadrature errors.
    const bool conservative = form_.flavor() == Flavor::lobatto;
    for (int d = 0; d < 3; ++d) {
      tensor_apply(D, n, d, u, d0, false);  // d_d p
      for (int c = 0; c < 3; ++c)
        for (int i = 0; i < np; ++i) r[(c + 1) * np + i] -= G(3 * d + c, i) * d0[i];
      if (conservative) {
        for (int i = 0; i < np; ++i)
          F[i] = (G(3 * d, i) * u[np + i] + G(3 * d + 1, i) * u[2 * np + i] + G(3 * d + 2, i) * u[3 * np + i]) *
                 el.J(i) / el.wJ(i);
        tensor_apply(D, n, d, F, d0, false);
        for (int i = 0; i < np; ++i) r[i] -= el.wJ(i) / el.J(i) * d0[i];
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        tensor_apply(D, n, d, u + (c + 1) * np, d0, false);  // d_d u_c
        for (int i = 0; i < np; ++i) r[i] -= G(3 * d + c, i) * d0[i];
      }
    }
  } else {
    const Eigen::MatrixXd DT = D.transpose();
    for (int d = 0; d < 3; ++d) {
      for (int i = 0; i < np; ++i)
        F[d * np + i] = G(3 * d, i) * u[np + i] + G(3 * d + 1, i) * u[2 * np + i] + G(3 * d + 2, i) * u[3 * np + i];
      tensor_apply(DT, n, d, F + d * np, r, true);
      tensor_apply(D, n, d, u, d0, false);
      for (int c = 0; c < 3; ++c)
        for (int i = 0; i < np; ++i) r[(c + 1) * np + i] -= G(3 * d + c, i) * d0[i];
    }
  }
}

void Discretization::volume_tet(const Element& el, const double* u, double* r) const {
  const int np = el.np;
  const ElementOperators& op = *el.ops;
  const double J = el.J(0);
  Mat3 G;
  for (int d = 0; d < 3; ++d)
    for (int c = 0; c < 3; ++c) G(d, c) = el.G(3 * d + c, 0);
  using MapV = Eigen::Map<const Eigen::VectorXd>;
  using MapO = Eigen::Map<Eigen::VectorXd>;
  const MapV p(u, np);
  Eigen::MatrixXd gref(np, 3);
  gref.col(0).noalias() = op.Dr * p;
  gref.col(1).noalias() = op.Ds * p;
  gref.col(2).noalias() = op.Dt * p;
  const Eigen::MatrixXd gp = gref * G;  // columns d p / d x_c
  for (int c = 0; c < 3; ++c) MapO(r + (c + 1) * np, np).noalias() -= J * (op.M * gp.col(c));
  if (el.form == Form::strong) {
    Eigen::VectorXd div = Eigen::VectorXd::Zero(np);
    for (int c = 0; c < 3; ++c) {
      const MapV uc(u + (c + 1) * np, np);
      div.noalias() += G(0, c) * (op.Dr * uc) + G(1, c) * (op.Ds * uc) + G(2, c) * (op.Dt * uc);
    }
    MapO(r, np).noalias() -= J * (op.M * div);
  } else {
    const MapV u1(u + np, np), u2(u + 2 * np, np), u3(u + 3 * np, np);
    const Eigen::VectorXd Fr = G(0, 0) * u1 + G(0, 1) * u2 + G(0, 2) * u3;
    const Eigen::VectorXd Fs = G(1, 0) * u1 + G(1, 1) * u2 + G(1, 2) * u3;
    const Eigen::VectorXd Ft = G(2, 0) * u1 + G(2, 1) * u2 + G(2, 2) * u3;
    MapO(r, np).noalias() += J * (op.SrT * Fr + op.SsT * Fs + op.StT * Ft);
  }
}

void Discretization::volume_wedge(const Element& el, const double* u, double* r) const {
  const ElementOperators& op = *el.ops;
  const int ntri = static_cast<int>(op.Vq.cols()), nl = N_ + 1;
  const Eigen::Index ntq = op.Vq.rows();
  using MapM = Eigen::Map<const Eigen::MatrixXd>;
  using MapO = Eigen::Map<Eigen::MatrixXd>;
  // values of all four fields and reference derivatives of p at the cubature points
  Eigen::MatrixXd Q[4];
  for (int c = 0; c < 4; ++c) Q[c] = op.Vq * MapM(u + c * el.np, ntri, nl) * op.Vl.transpose();
  const MapM P(u, ntri, nl);
  const Eigen::MatrixXd Pr = op.Vqr * P * op.Vl.transpose();
  const Eigen::MatrixXd Ps = op.Vq * P * op.Vls.transpose();
  const Eigen::MatrixXd Pt = op.Vqt * P * op.Vl.transpose();
  Eigen::MatrixXd Fr(ntq, nl), Fs(ntq, nl), Ft(ntq, nl), F4(ntq, nl);
  Eigen::MatrixXd gu[3] = {Eigen::MatrixXd(ntq, nl), Eigen::MatrixXd(ntq, nl), Eigen::MatrixXd(ntq, nl)};
  for (int l = 0; l < nl; ++l)
    for (Eigen::Index q = 0; q < ntq; ++q) {
      const Eigen::Index m = q + ntq * l;
      double f[3] = {0, 0, 0}, f4 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double uc = Q[c + 1](q, l);
        for (int d = 0; d < 3; ++d) f[d] += el.G(3 * d + c, m) * uc;
        f4 -= el.lsc(c, m) * uc;
        gu[c](q, l) = el.G(c, m) * Pr(q, l) + el.G(3 + c, m) * Ps(q, l) + el.G(6 + c, m) * Pt(q, l) -
                      el.lsc(c, m) * Q[0](q, l);
      }
      Fr(q, l) = f[0];
      Fs(q, l) = f[1];
      Ft(q, l) = f[2];
      F4(q, l) = f4;
    }
  MapO(r, ntri, nl).noalias() += op.Vqr.transpose() * Fr * op.Vl + op.Vq.transpose() * Fs * op.Vls +
                                 op.Vqt.transpose() * Ft * op.Vl + op.Vq.transpose() * F4 * op.Vl;
  for (int c = 0; c < 3; ++c)
    MapO(r + (c + 1) * el.np, ntri, nl).noalias() -= op.Vq.transpose() * gu[c] * op.Vl;
}

void Discretization::volume_pyramid(const Element& el, const double* u, double* r) const {
  const int np = el.np;
  const ElementOperators& op = *el.ops;
  using MapV = Eigen::Map<const Eigen::VectorXd>;
  using MapO = Eigen::Map<Eigen::VectorXd>;
  const auto& JG = el.G;
  const MapV p(u, np);
  const Eigen::VectorXd pr = op.Dr * p, ps = op.Ds * p, pt = op.Dt * p;
  for (int c = 0; c < 3; ++c) {
    MapO rc(r + (c + 1) * np, np);
    rc.array() -= JG.row(c).transpose().array() * pr.array() + JG.row(3 + c).transpose().array() * ps.array() +
                  JG.row(6 + c).transpose().array() * pt.array();
  }
  MapO rp(r, np);
  if (el.form == Form::strong) {
    for (int c = 0; c < 3; ++c) {
      const MapV uc(u + (c + 1) * np, np);
      const Eigen::VectorXd ur = op.Dr * uc, us = op.Ds * uc, ut = op.Dt * uc;
      rp.array() -= JG.row(c).transpose().array() * ur.array() + JG.row(3 + c).transpose().array() * us.array() +
                    JG.row(6 + c).transpose().array() * ut.array();
    }
  } else {
    Eigen::VectorXd F[3];
    for (int d = 0; d < 3; ++d) {
      F[d] = Eigen::VectorXd::Zero(np);
      for (int c = 0; c < 3; ++c)
        F[d].array() += JG.row(3 * d + c).transpose().array() * MapV(u + (c + 1) * np, np).array();
    }
    rp.noalias() += op.Dr.transpose() * F[0] + op.Ds.transpose() * F[1] + op.Dt.transpose() * F[2];
  }
}

void Discretization::apply_mass_inverse(const Element& el, double* r) const {
  const int np = el.np;
  for (int c = 0; c < 4; ++c) {
    Eigen::Map<Eigen::VectorXd> v(r + c * np, np);
    switch (el.type) {
      case ElemType::hex: v.array() /= el.wJ.array(); break;
      case ElemType::pyramid: v.array() /= el.J.array(); break;
      case ElemType::tet: v = (el.ops->Minv * v) / el.J(0); break;
      case ElemType::wedge: break;
    }
    v *= c == 0 ? el.kappa : 1.0 / el.rho;
  }
}

void Discretization::residual(const Eigen::VectorXd& U, Eigen::VectorXd& R) const {
  if (U.size() != ndof_) throw std::invalid_argument("residual: state has wrong size");
  R.resize(ndof_);
  for (int e = 0; e < num_elements(); ++e) compute_traces(e, U);
  for (int e = 0; e < num_elements(); ++e) element_residual(e, U, R.data() + elems_[e].offset);
}

void Discretization::rhs(const Eigen::VectorXd& U, Eigen::VectorXd& dU) const {
  residual(U, dU);
  for (int e = 0; e < num_elements(); ++e) apply_mass_inverse(elems_[e], dU.data() + elems_[e].offset);
}

void Discretization::rhs(const Eigen::VectorXd& U, const std::vector<int>& elems, Eigen::VectorXd& dU) const {
  if (dU.size() != ndof_) dU.setZero(ndof_);
  thread_local std::vector<char> mark;
  mark.assign(num_elements(), 0);
  for (int e : elems) {
    mark[e] = 1;
    for (int k : elems_[e].nbrs) mark[k] = 1;
  }
  for (int e = 0; e < num_elements(); ++e)
    if (mark[e]) compute_traces(e, U);
  for (int e : elems) {
    double* r = dU.data() + elems_[e].offset;
    element_residual(e, U, r);
    apply_mass_inverse(elems_[e], r);
  }
}

Eigen::MatrixXd Discretization::assemble_residual(Eigen::Index max_dofs) const {
  if (ndof_ > max_dofs)
    throw std::length_error("assemble_residual: " + std::to_string(ndof_) + " dofs exceeds the limit of " +
                            std::to_string(max_dofs));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ndof_, ndof_);
  Eigen::VectorXd U = Eigen::VectorXd::Zero(ndof_);
  std::fill(trace_.begin(), trace_.end(), 0.0);
  std::vector<double> r;
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elems_[e];
    std::vector<int> touched{e};
    touched.insert(touched.end(), el.nbrs.begin(), el.nbrs.end());
    for (int j = 0; j < 4 * el.np; ++j) {
      const Eigen::Index col = el.offset + j;
      U(col) = 1.0;
      compute_traces(e, U);
      for (int k : touched) {
        r.resize(4 * elems_[k].np);
        element_residual(k, U, r.data());
        for (int i = 0; i < 4 * elems_[k].np; ++i) A(elems_[k].offset + i, col) = r[i];
      }
      U(col) = 0.0;
    }
    compute_traces(e, U);
  }
  return A;
}

Eigen::MatrixXd Discretization::element_mass(int e) const {
  const Element& el = elems_.at(e);
  switch (el.type) {
    case ElemType::hex: return el.wJ.asDiagonal();
    case ElemType::pyramid: return el.J.asDiagonal();
    case ElemType::tet: return el.J(0) * el.ops->M;
    case ElemType::wedge: return Eigen::MatrixXd::Identity(el.np, el.np);
  }
  return {};
}

Eigen::MatrixXd Discretization::element_surface_mass(int e) const {
  const Element& el = elems_.at(e);
  Eigen::MatrixXd Ms = Eigen::MatrixXd::Zero(el.np, el.np);
  for (std::size_t f = 0; f < el.slots.size(); ++f) {
    const Slot& s = el.slots[f];
    const Eigen::MatrixXd E = el.ops->trace(static_cast<int>(f), s.orient).to_dense();
    Eigen::VectorXd w = faces_[s.shared].wJs;
    if (el.type == ElemType::wedge) w = w.cwiseProduct(el.face_isqrtJ[f].cwiseAbs2());
    Ms.noalias() += E.transpose() * w.asDiagonal() * E;
  }
  return Ms;
}

std::vector<Eigen::MatrixXd> Discretization::state_mass_blocks() const {
  std::vector<Eigen::MatrixXd> blocks;
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elems_[e];
    const Eigen::MatrixXd Mk = element_mass(e);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4 * el.np, 4 * el.np);
    B.block(0, 0, el.np, el.np) = Mk / el.kappa;
    for (int c = 1; c < 4; ++c) B.block(c * el.np, c * el.np, el.np, el.np) = el.rho * Mk;
    blocks.push_back(std::move(B));
  }
  return blocks;
}

Eigen::VectorXd Discretization::apply_mass(const Eigen::VectorXd& U) const {
  Eigen::VectorXd out(ndof_);
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elems_[e];
    for (int c = 0; c < 4; ++c) {
      const Eigen::Map<const Eigen::VectorXd> v(U.data() + el.offset + c * el.np, el.np);
      Eigen::Map<Eigen::VectorXd> o(out.data() + el.offset + c * el.np, el.np);
      const double m = c == 0 ? 1.0 / el.kappa : el.rho;
      switch (el.type) {
        case ElemType::hex: o = m * el.wJ.cwiseProduct(v); break;
        case ElemType::pyramid: o = m * el.J.cwiseProduct(v); break;
        case ElemType::tet: o = m * el.J(0) * (el.ops->M * v); break;
        case ElemType::wedge: o = m * v; break;
      }
    }
  }
  return out;
}

double Discretization::energy(const Eigen::VectorXd& U) const { return U.dot(apply_mass(U)); }

namespace {

struct ErrorTab {
  QuadratureRule rule;
  Eigen::MatrixXd V;
};

}  // namespace

Eigen::VectorXd Discretization::project(const FieldFunction& fn) const {
  Eigen::VectorXd U(ndof_);
  std::map<ElemType, ErrorTab> tabs;
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elems_[e];
    const ElementMap map = mesh_.element_map(e);
    double* u = U.data() + el.offset;
    const int np = el.np;
    if (el.type == ElemType::hex || el.type == ElemType::tet) {
      const Eigen::MatrixXd X = el.type == ElemType::hex
                                    ? static_cast<const HexBasis&>(el.ops->basis()).nodes()
                                    : static_cast<const TetNodalBasis&>(el.ops->basis()).nodes();
      for (int i = 0; i < np; ++i) {
        const FieldValue v = fn(map.point(collapse(el.type, X.row(i).transpose())));
        u[i] = v.p;
        for (int c = 0; c < 3; ++c) u[(c + 1) * np + i] = v.u(c);
      }
      continue;
    }
    auto it = tabs.find(el.type);
    if (it == tabs.end()) {
      ErrorTab t;
      t.rule = collapsed_rule(el.type, N_ + 3);
      t.V = el.ops->basis().values(t.rule.points);
      it = tabs.emplace(el.type, std::move(t)).first;
    }
    const ErrorTab& t = it->second;
    std::fill(u, u + 4 * np, 0.0);
    for (Eigen::Index q = 0; q < t.rule.size(); ++q) {
      const Vec3 abc = t.rule.collapsed.row(q).transpose();
      const double J = map.det(abc);
      const FieldValue v = fn(map.point(abc));
      const double vals[4] = {v.p, v.u(0), v.u(1), v.u(2)};
      for (int i = 0; i < np; ++i) {
        const double w = el.type == ElemType::wedge ? t.rule.weights(q) * t.V(q, i) * std::sqrt(J)
                                                    : t.rule.weights(q) * J * t.V(q, i) / el.J(i);
        for (int c = 0; c < 4; ++c) u[c * np + i] += w * vals[c];
      }
    }
  }
  return U;
}

Eigen::MatrixXd Discretization::evaluate(int e, const Eigen::VectorXd& U, const Eigen::MatrixXd& rst) const {
  const Element& el = elems_.at(e);
  const Eigen::MatrixXd V = el.ops->basis().values(rst);
  const Eigen::Map<const Eigen::MatrixXd> C(U.data() + el.offset, el.np, 4);
  Eigen::MatrixXd out = V * C;
  if (el.type == ElemType::wedge) {
    const ElementMap map = mesh_.element_map(e);
    for (Eigen::Index q = 0; q < rst.rows(); ++q)
      out.row(q) /= std::sqrt(map.det(collapse(ElemType::wedge, rst.row(q).transpose())));
  }
  return out;
}

Discretization::Error Discretization::l2_error(const Eigen::VectorXd& U, const FieldFunction& exact) const {
  std::map<ElemType, ErrorTab> tabs;
  double ep = 0.0, eu = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elems_[e];
    auto it = tabs.find(el.type);
    if (it == tabs.end()) {
      ErrorTab t;
      t.rule = collapsed_rule(el.type, N_ + 3);
      t.V = el.ops->basis().values(t.rule.points);
      it = tabs.emplace(el.type, std::move(t)).first;
    }
    const ErrorTab& t = it->second;
    const ElementMap map = mesh_.element_map(e);
    const Eigen::Map<const Eigen::MatrixXd> C(U.data() + el.offset, el.np, 4);
    const Eigen::MatrixXd vals = t.V * C;
    for (Eigen::Index q = 0; q < t.rule.size(); ++q) {
      const Vec3 abc = t.rule.collapsed.row(q).transpose();
      const double J = map.det(abc);
      const double s = el.type == ElemType::wedge ? 1.0 / std::sqrt(J) : 1.0;
      const FieldValue v = exact(map.point(abc));
      const double w = t.rule.weights(q) * J;
      ep += w * std::pow(s * vals(q, 0) - v.p, 2);
      for (int c = 0; c < 3; ++c) eu += w * std::pow(s * vals(q, c + 1) - v.u(c), 2);
    }
  }
  return {std::sqrt(ep), std::sqrt(eu)};
}

}  // namespace hdg
