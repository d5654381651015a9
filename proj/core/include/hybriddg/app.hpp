#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hybriddg/dg.hpp"
#include "hybriddg/mesh.hpp"
#include "hybriddg/stability.hpp"

namespace hdg {

struct RunConfig {
  std::string mesh = "hex:4";  // generator spec ("hex:4", "hybrid:2") or .msh path
  int N = 2;
  std::string formulation = "GL";
  double cfl = 0.5;
  int levels = 1;
  double t_final = 0.3;
  std::vector<int> resolutions{2, 4, 8};
  std::map<int, Material> materials;
  std::string output_dir = ".";
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" text; '#' starts a comment. Materials as "material.<tag> = rho kappa".
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Standing wave in the unit cube with p = 0 on the boundary (rho = kappa = 1).
FieldValue cavity_solution(const Vec3& x, double t);
FieldFunction cavity_at(double t);

// Mesh from the config with its material table applied.
HybridMesh build_mesh(const RunConfig& cfg);

struct EnergySample {
  int step = 0;
  double t = 0.0, energy = 0.0;
};

struct SolveResult {
  Eigen::Index dofs = 0;
  double dt_min = 0.0;
  int steps = 0;
  long rhs_evaluations = 0;
  std::vector<long> level_evaluations;
  std::vector<int> level_counts;
  double t_end = 0.0;
  Discretization::Error error;
  std::vector<EnergySample> energy;
  double max_energy_increase = 0.0;  // largest step-to-step increase relative to the initial energy
};

// Runs the cavity problem from its projected initial state to cfg.t_final.
// With cfg.levels > 1 the multirate integrator is used.
SolveResult solve_cavity(const HybridMesh& mesh, const RunConfig& cfg, bool track_energy = true);

// Least-squares slope of -log(error) against k log 2 (h halves at each step).
double convergence_rate(const std::vector<double>& errors);

struct ConvergenceRow {
  std::string mesh;
  double h = 0.0;
  Eigen::Index dofs = 0;
  double err_p = 0.0, err_u = 0.0;
  double err = 0.0;  // whole state, sqrt(err_p^2 + err_u^2)
};
struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double rate_p = 0.0, rate_u = 0.0, rate = 0.0;  // pressure, velocity, whole state
};
// Meshes "<cfg.mesh>:<n>" for n in cfg.resolutions; cfg.mesh names a generator.
ConvergenceTable convergence_study(const RunConfig& cfg);

// CSV writers: header row, comma separated, full-precision scientific notation.
void write_constants_csv(std::ostream& out, int max_N);
void write_convergence_csv(std::ostream& out, const ConvergenceTable& t);
void write_energy_csv(std::ostream& out, const SolveResult& r);
void write_solve_summary_csv(std::ostream& out, const RunConfig& cfg, const SolveResult& r);

void write_timestep_plan_csv(std::ostream& out, const Discretization& d, double cfl, int levels);
void write_eigenvalues_csv(std::ostream& out, const Spectrum& s);
// One row: the spectral radius, the symmetric/skew radii and the four real-part bounds.
void write_bounds_csv(std::ostream& out, const Discretization& d, const Spectrum& s, const SpectralBounds& b);

}  // namespace hdg
