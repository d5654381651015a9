#include "hybriddg/timeint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hybriddg/dg.hpp"

namespace hdg {

DGSystem::DGSystem(const Discretization& d) : d_(d), all_(d.num_elements()) {
  for (int e = 0; e < d.num_elements(); ++e) all_[e] = e;
}
Eigen::Index DGSystem::size() const { return d_.num_dofs(); }
int DGSystem::num_blocks() const { return d_.num_elements(); }
Eigen::Index DGSystem::block_offset(int b) const { return d_.offset(b); }
Eigen::Index DGSystem::block_size(int b) const { return 4 * d_.np(b); }
const std::vector<int>& DGSystem::block_neighbors(int b) const { return d_.neighbors(b); }
void DGSystem::evaluate(double, const Eigen::VectorXd& U, const std::vector<int>& blocks,
                        Eigen::VectorXd& dU) const {
  if (static_cast<int>(blocks.size()) == num_blocks())
    d_.rhs(U, dU);
  else
    d_.rhs(U, blocks, dU);
}

std::array<double, 3> ab_weights(const double* nodes, int m, double t0, double t1) {
  if (m < 1 || m > 3) throw std::invalid_argument("ab_weights: need 1 to 3 history nodes");
  std::array<double, 3> w{0.0, 0.0, 0.0};
  // two-point Gauss rule is exact for the quadratic Lagrange polynomials
  const double g = 1.0 / std::sqrt(3.0);
  const double mid = 0.5 * (t0 + t1) - nodes[0], half = 0.5 * (t1 - t0);
  for (double x : {-g, g}) {
    const double t = mid + half * x;
    for (int j = 0; j < m; ++j) {
      double l = 1.0;
      for (int k = 0; k < m; ++k)
        if (k != j) l *= (t - (nodes[k] - nodes[0])) / ((nodes[j] - nodes[0]) - (nodes[k] - nodes[0]));
      w[j] += half * l;
    }
  }
  return w;
}

void ab3_step(Eigen::VectorXd& u, double dt, const Eigen::VectorXd& f0, const Eigen::VectorXd& f1,
              const Eigen::VectorXd& f2) {
  u += dt * (23.0 / 12.0 * f0 - 16.0 / 12.0 * f1 + 5.0 / 12.0 * f2);
}

namespace {

// One SSP-RK3 step; f0 = F(t, U) is supplied by the caller.
void ssp_rk3_step(const BlockSystem& sys, const std::vector<int>& all, Eigen::VectorXd& U, double t, double h,
                  const Eigen::VectorXd& f0, Eigen::VectorXd& work, Eigen::VectorXd& f) {
  work = U + h * f0;
  f.resize(U.size());
  sys.evaluate(t + h, work, all, f);
  work = 0.75 * U + 0.25 * (work + h * f);
  sys.evaluate(t + 0.5 * h, work, all, f);
  U = (U + 2.0 * (work + h * f)) / 3.0;
}

std::vector<int> all_blocks(const BlockSystem& sys) {
  std::vector<int> all(sys.num_blocks());
  for (int b = 0; b < sys.num_blocks(); ++b) all[b] = b;
  return all;
}

}  // namespace

RunStats run_ab3(const BlockSystem& sys, Eigen::VectorXd& U, double t0, double t_final, double dt,
                 const StepObserver& observer) {
  if (!(dt > 0)) throw std::invalid_argument("run_ab3: dt must be positive");
  const std::vector<int> all = all_blocks(sys);
  std::array<Eigen::VectorXd, 3> f;
  for (auto& v : f) v = Eigen::VectorXd::Zero(sys.size());
  Eigen::VectorXd work, g;
  std::array<double, 3> tf{0, 0, 0};
  RunStats st;
  double t = t0;
  int nhist = 0;
  if (observer) observer(0, t, U);
  while (t < t_final - 1e-12 * std::max(1.0, std::abs(t_final))) {
    const double h = std::min(dt, t_final - t);
    std::rotate(f.rbegin(), f.rbegin() + 1, f.rend());
    std::rotate(tf.rbegin(), tf.rbegin() + 1, tf.rend());
    sys.evaluate(t, U, all, f[0]);
    tf[0] = t;
    ++st.rhs_evaluations;
    nhist = std::min(nhist + 1, 3);
    const bool uniform = h == dt && tf[0] - tf[1] == dt;
    if (nhist < 3) {
      // third-order start-up keeps the global error O(dt^3)
      ssp_rk3_step(sys, all, U, t, h, f[0], work, g);
      st.rhs_evaluations += 2;
    } else if (uniform) {
      ab3_step(U, h, f[0], f[1], f[2]);
    } else {
      const auto w = ab_weights(tf.data(), nhist, t, t + h);
      for (int j = 0; j < nhist; ++j) U += w[j] * f[j];
    }
    t += h;
    ++st.steps;
    if (observer) observer(st.steps, t, U);
  }
  st.t_end = t;
  return st;
}

LevelPlan assign_mrab_levels(const std::vector<double>& dt_local, int L,
                             const std::vector<std::vector<int>>& neighbors) {
  if (L < 1) throw std::invalid_argument("assign_mrab_levels: need at least one level");
  if (dt_local.empty()) throw std::invalid_argument("assign_mrab_levels: empty input");
  LevelPlan p;
  p.num_levels = L;
  p.dt_min = *std::min_element(dt_local.begin(), dt_local.end());
  if (!(p.dt_min > 0)) throw std::invalid_argument("assign_mrab_levels: time steps must be positive");
  p.level_dt.assign(L + 1, 0.0);
  for (int lev = 1; lev <= L; ++lev) p.level_dt[lev] = std::ldexp(p.dt_min, L - lev);
  p.level.resize(dt_local.size());
  for (std::size_t b = 0; b < dt_local.size(); ++b) {
    int k = 0;  // largest k with 2^k dt_min <= dt_K
    while (k < L - 1 && std::ldexp(p.dt_min, k + 1) <= dt_local[b] * (1 + 1e-12)) ++k;
    p.level[b] = L - k;
  }
  if (!neighbors.empty()) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t b = 0; b < p.level.size(); ++b)
        for (int n : neighbors[b])
          if (p.level[b] < p.level[n] - 1) {
            p.level[b] = p.level[n] - 1;
            changed = true;
          }
    }
  }
  p.count.assign(L + 1, 0);
  for (int l : p.level) ++p.count[l];
  return p;
}

MultirateAB::MultirateAB(const BlockSystem& sys, LevelPlan plan) : sys_(sys), plan_(std::move(plan)) {
  if (static_cast<int>(plan_.level.size()) != sys.num_blocks())
    throw std::invalid_argument("MultirateAB: plan does not match the system");
  for (int b = 0; b < sys.num_blocks(); ++b) {
    const int lb = plan_.level[b];
    if (lb < 1 || lb > plan_.num_levels) throw std::invalid_argument("MultirateAB: level out of range");
    for (int n : sys.block_neighbors(b))
      if (std::abs(lb - plan_.level[n]) > 1)
        throw std::invalid_argument("MultirateAB: neighbouring blocks " + std::to_string(b) + " and " +
                                    std::to_string(n) + " differ by more than one level");
  }
}

RunStats MultirateAB::run(Eigen::VectorXd& U, double t0, double t_final, const StepObserver& observer) {
  const int L = plan_.num_levels, nb = sys_.num_blocks();
  const int nsub = 1 << (L - 1);
  struct History {
    std::array<double, 3> t{0, 0, 0};
    int m = 0;
    double t_base = 0.0;
  };
  std::vector<History> hist(nb);
  std::array<Eigen::VectorXd, 3> F;
  for (auto& v : F) v = Eigen::VectorXd::Zero(sys_.size());
  Eigen::VectorXd base = U, dU = Eigen::VectorXd::Zero(sys_.size());
  for (auto& h : hist) h.t_base = t0;

  // Pushes dU (evaluated at t) into the history of block b.
  auto record = [&](int b, double t) {
    History& hb = hist[b];
    const Eigen::Index o = sys_.block_offset(b), n = sys_.block_size(b);
    for (int j = 2; j > 0; --j) {
      F[j].segment(o, n) = F[j - 1].segment(o, n);
      hb.t[j] = hb.t[j - 1];
    }
    F[0].segment(o, n) = dU.segment(o, n);
    hb.t[0] = t;
    hb.m = std::min(hb.m + 1, 3);
  };
  // State of block b at time t from its base state and AB extrapolant.
  auto advance = [&](int b, double t) {
    const History& h = hist[b];
    const Eigen::Index o = sys_.block_offset(b), n = sys_.block_size(b);
    U.segment(o, n) = base.segment(o, n);
    if (h.m == 0 || t == h.t_base) return;
    const auto w = ab_weights(h.t.data(), h.m, h.t_base, t);
    for (int j = 0; j < h.m; ++j) U.segment(o, n) += w[j] * F[j].segment(o, n);
  };
  auto due_at = [&](int b, int s) { return s % (1 << (L - plan_.level[b])) == 0; };

  RunStats st;
  st.block_evaluations.assign(L + 1, 0);
  const double dt_macro = plan_.level_dt[1];
  const double tol = 1e-12 * std::max(1.0, std::abs(t_final));
  double T = t0;
  if (observer) observer(0, T, U);

  // Start-up: global SSP-RK3 at dt_min over two steps of the coarsest occupied
  // level, recording each block's history at its own step times. Skipped when
  // the run is too short to contain it.
  int s0 = 0;
  {
    int coarsest = L;
    for (int b = 0; b < nb; ++b) coarsest = std::min(coarsest, plan_.level[b]);
    const int n_rk = 2 << (L - coarsest);
    const int macro = (n_rk + nsub - 1) / nsub;
    if (t0 + macro * dt_macro <= t_final + tol) {
      const std::vector<int> all = all_blocks(sys_);
      Eigen::VectorXd work, g;
      for (int k = 0; k < n_rk; ++k) {
        const double t = T + (k % nsub) * plan_.dt_min;
        sys_.evaluate(t, U, all, dU);
        for (int b = 0; b < nb; ++b)
          if (due_at(b, k % nsub)) {
            record(b, t);
            ++st.block_evaluations[plan_.level[b]];
          }
        ssp_rk3_step(sys_, all, U, t, plan_.dt_min, dU, work, g);
        st.startup_evaluations += 2 * nb;
        if ((k + 1) % nsub == 0) {
          T += dt_macro;
          ++st.steps;
          if (observer) observer(st.steps, T, U);
        }
      }
      s0 = n_rk % nsub;
      base = U;
      for (auto& h : hist) h.t_base = T + s0 * plan_.dt_min;
    }
  }

  std::vector<int> due;
  std::vector<char> mark(nb);
  while (T < t_final - tol) {
    const double alpha = s0 > 0 ? 1.0 : std::min(1.0, (t_final - T) / dt_macro);
    const double h = alpha * plan_.dt_min;
    for (int s = s0; s < nsub; ++s) {
      const double t = (s == 0) ? T : T + s * h;
      due.clear();
      std::fill(mark.begin(), mark.end(), 0);
      for (int b = 0; b < nb; ++b)
        if (due_at(b, s)) {
          due.push_back(b);
          mark[b] = 1;
        }
      for (int b : due)
        for (int n : sys_.block_neighbors(b))
          if (!mark[n]) {
            mark[n] = 2;
            advance(n, t);
          }
      for (int b : due) advance(b, t);
      sys_.evaluate(t, U, due, dU);
      for (int b : due) {
        record(b, t);
        const Eigen::Index o = sys_.block_offset(b), n = sys_.block_size(b);
        base.segment(o, n) = U.segment(o, n);
        hist[b].t_base = t;
        ++st.block_evaluations[plan_.level[b]];
      }
    }
    s0 = 0;
    T = (alpha < 1.0) ? t_final : T + dt_macro;
    for (int b = 0; b < nb; ++b) advance(b, T);
    ++st.steps;
    if (observer) observer(st.steps, T, U);
  }
  st.t_end = T;
  return st;
}

}  // namespace hdg
