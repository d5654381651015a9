#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

namespace hdg {

class Discretization;

// A semi-discrete system dU/dt = F(t, U) split into blocks with local coupling.
class BlockSystem {
 public:
  virtual ~BlockSystem() = default;
  virtual Eigen::Index size() const = 0;
  virtual int num_blocks() const = 0;
  virtual Eigen::Index block_offset(int b) const = 0;
  virtual Eigen::Index block_size(int b) const = 0;
  virtual const std::vector<int>& block_neighbors(int b) const = 0;
  // Writes dU on `blocks` only, reading U on those blocks and their neighbours.
  virtual void evaluate(double t, const Eigen::VectorXd& U, const std::vector<int>& blocks,
                        Eigen::VectorXd& dU) const = 0;
};

class DGSystem final : public BlockSystem {
 public:
  explicit DGSystem(const Discretization& d);
  Eigen::Index size() const override;
  int num_blocks() const override;
  Eigen::Index block_offset(int b) const override;
  Eigen::Index block_size(int b) const override;
  const std::vector<int>& block_neighbors(int b) const override;
  void evaluate(double t, const Eigen::VectorXd& U, const std::vector<int>& blocks,
                Eigen::VectorXd& dU) const override;

 private:
  const Discretization& d_;
  std::vector<int> all_;
};

// Integrals over [t0, t1] of the Lagrange polynomials on the history times
// `nodes` (most recent first, m <= 3 entries).
std::array<double, 3> ab_weights(const double* nodes, int m, double t0, double t1);

// u += dt (23/12 f0 - 16/12 f1 + 5/12 f2)
void ab3_step(Eigen::VectorXd& u, double dt, const Eigen::VectorXd& f0, const Eigen::VectorXd& f1,
              const Eigen::VectorXd& f2);

using StepObserver = std::function<void(int step, double t, const Eigen::VectorXd& U)>;

struct RunStats {
  int steps = 0;            // (macro) steps taken
  long rhs_evaluations = 0;  // full-system evaluations (single rate)
  std::vector<long> block_evaluations;  // per level, multirate only
  long startup_evaluations = 0;         // extra Runge-Kutta stages of the multirate start-up, in blocks
  double t_end = 0.0;
};

// Single-rate AB3; the first two steps use SSP-RK3 so the scheme stays third order.
// The final step is shortened to land on t_final.
RunStats run_ab3(const BlockSystem& sys, Eigen::VectorXd& U, double t0, double t_final, double dt,
                 const StepObserver& observer = {});

struct LevelPlan {
  int num_levels = 1;           // L
  double dt_min = 0.0;
  std::vector<double> level_dt;  // index 1..L, level_dt[lev] = 2^(L-lev) dt_min; entry 0 unused
  std::vector<int> level;        // per block, 1 (coarsest) .. L (finest)
  std::vector<int> count;        // blocks per level, index 1..L
};

// Bins dt_local into levels (dt_{lev-1} <= dt_K ...: the coarsest level whose step
// does not exceed dt_K), then refines blocks until neighbours differ by at most one level.
LevelPlan assign_mrab_levels(const std::vector<double>& dt_local, int L,
                             const std::vector<std::vector<int>>& neighbors = {});

// Multirate AB3: each level advances with its own step; neighbours that are not
// due are evaluated through their own AB extrapolant.
class MultirateAB {
 public:
  MultirateAB(const BlockSystem& sys, LevelPlan plan);
  const LevelPlan& plan() const { return plan_; }
  // Macro step = level-1 step; the last macro step is shortened (ratios kept).
  RunStats run(Eigen::VectorXd& U, double t0, double t_final, const StepObserver& observer = {});

 private:
  const BlockSystem& sys_;
  LevelPlan plan_;
};

}  // namespace hdg
