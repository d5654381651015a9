// Command-line driver: cavity runs, convergence studies, spectra, constants tables
// and MRAB timestep plans. Every subcommand writes CSV into the output directory.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hybriddg/app.hpp"
#include "hybriddg/stability.hpp"
#include "hybriddg/timeint.hpp"

namespace fs = std::filesystem;
using namespace hdg;

namespace {

struct Overrides {
  std::string config, mesh, formulation, resolutions, output;
  std::string N, cfl, levels, t_final;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Config file with key = value lines");
  cmd->add_option("-m,--mesh", o.mesh, "Generator (hex:4, wedge:2, pyramid:2, tet:2, hybrid:2) or .msh file");
  cmd->add_option("-N,--order", o.N, "Polynomial degree");
  cmd->add_option("-f,--formulation", o.formulation, "GL or SEM");
  cmd->add_option("--cfl", o.cfl, "CFL constant C in the local timestep");
  cmd->add_option("-l,--levels", o.levels, "Number of MRAB levels (1 = single rate)");
  cmd->add_option("-T,--t-final", o.t_final, "Final time");
  cmd->add_option("-o,--output", o.output, "Output directory");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  const std::pair<const char*, const std::string*> keys[] = {
      {"mesh", &o.mesh},     {"formulation", &o.formulation}, {"N", &o.N},
      {"cfl", &o.cfl},       {"levels", &o.levels},           {"t_final", &o.t_final},
      {"output_dir", &o.output}, {"resolutions", &o.resolutions}};
  for (const auto& [k, v] : keys)
    if (!v->empty()) set_config_value(cfg, k, *v);
  fs::create_directories(cfg.output_dir);
  return cfg;
}

std::ofstream open_csv(const RunConfig& cfg, const std::string& name) {
  const fs::path p = fs::path(cfg.output_dir) / name;
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void run_solve(const RunConfig& cfg) {
  const HybridMesh mesh = build_mesh(cfg);
  const SolveResult r = solve_cavity(mesh, cfg);
  auto s = open_csv(cfg, "solve.csv");
  write_solve_summary_csv(s, cfg, r);
  auto e = open_csv(cfg, "energy.csv");
  write_energy_csv(e, r);
  fmt::print("{} elements, {} dofs, N={} {}\n", mesh.size(), r.dofs, cfg.N, cfg.formulation);
  fmt::print("dt_min {:.4e}, {} steps to t={:.4f}\n", r.dt_min, r.steps, r.t_end);
  fmt::print("L2 error p {:.4e}  u {:.4e}\n", r.error.p, r.error.u);
  fmt::print("largest relative energy increase per step {:.3e}\n", r.max_energy_increase);
}

void run_converge(const RunConfig& cfg) {
  const ConvergenceTable t = convergence_study(cfg);
  auto out = open_csv(cfg, "convergence.csv");
  write_convergence_csv(out, t);
  for (const auto& r : t.rows)
    fmt::print("{:>12}  h={:.4f}  dofs={:>8}  p {:.4e}  u {:.4e}\n", r.mesh, r.h, r.dofs, r.err_p, r.err_u);
  fmt::print("rates: p {:.3f}  u {:.3f}  state {:.3f}\n", t.rate_p, t.rate_u, t.rate);
}

void run_spectra(const RunConfig& cfg, double penalty_scale) {
  const HybridMesh mesh = build_mesh(cfg);
  const Discretization d(mesh, cfg.N, Formulation::from_string(cfg.formulation), {false, penalty_scale});
  const Spectrum s = compute_spectrum(d);
  const SpectralBounds b = spectral_bounds(d);
  auto ev = open_csv(cfg, "eigenvalues.csv");
  write_eigenvalues_csv(ev, s);
  auto bo = open_csv(cfg, "bounds.csv");
  write_bounds_csv(bo, d, s, b);
  fmt::print("{} dofs, N={} {}\n", d.num_dofs(), cfg.N, cfg.formulation);
  fmt::print("rho(M^-1 A)       {:.4f}   max Re {:.3e}\n", s.rho, s.max_real);
  fmt::print("rho(M^-1 A^s)     {:.4f}\n", s.rho_sym);
  fmt::print("element C_T bound {:.4f}\n", b.re_element);
  fmt::print("computed C_T      {:.4f}\n", b.re_computed);
  fmt::print("analytic C_T      {:.4f}\n", b.re_analytic);
  fmt::print("rho(M^-1 A^k)     {:.4f}   imaginary bound {:.4f}\n", s.rho_skew, b.im);
}

void run_constants(const RunConfig& cfg, int max_N) {
  auto out = open_csv(cfg, "constants.csv");
  write_constants_csv(out, max_N);
  const char* names[] = {"trace (full)", "trace (SEM)", "Markov"};
  for (int k = 0; k < 3; ++k) {
    fmt::print("{}\n", names[k]);
    for (ElemType t : all_elem_types) {
      fmt::print("  {:<8}", to_string(t));
      for (int N = 1; N <= max_N; ++N) {
        const double v = k == 2 ? markov_constant(t, N)
                                : computed_trace_constant(t, N, k == 0 ? TraceMode::full : TraceMode::sem);
        fmt::print(" {:9.2f}", v);
      }
      fmt::print("\n");
    }
  }
}

void run_plan(const RunConfig& cfg) {
  const HybridMesh mesh = build_mesh(cfg);
  const Discretization d(mesh, cfg.N, Formulation::from_string(cfg.formulation));
  auto out = open_csv(cfg, "timestep_plan.csv");
  write_timestep_plan_csv(out, d, cfg.cfl, cfg.levels);
  std::vector<std::vector<int>> nbrs(d.num_elements());
  for (int e = 0; e < d.num_elements(); ++e) nbrs[e] = d.neighbors(e);
  const LevelPlan plan = assign_mrab_levels(local_timesteps(d, cfg.cfl), cfg.levels, nbrs);
  fmt::print("dt_min {:.4e}\n", plan.dt_min);
  for (int lev = 1; lev <= plan.num_levels; ++lev)
    fmt::print("level {}  dt {:.4e}  elements {}\n", lev, plan.level_dt[lev], plan.count[lev]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order DG acoustics on hybrid meshes"};
  app.require_subcommand(1);

  Overrides solve_o, conv_o, spec_o, const_o, plan_o;
  auto* solve = app.add_subcommand("solve", "Run the cavity problem and report errors and energy");
  add_run_options(solve, solve_o);
  auto* conv = app.add_subcommand("converge", "Convergence study over a generator's resolutions");
  add_run_options(conv, conv_o);
  conv->add_option("-r,--resolutions", conv_o.resolutions, "Comma-separated cells per axis, e.g. 2,4,8");
  auto* spec = app.add_subcommand("spectra", "Eigenvalues of M^-1 A and the spectral bounds");
  add_run_options(spec, spec_o);
  double penalty_scale = 1.0;
  spec->add_option("--penalty-scale", penalty_scale, "Scale both flux penalties (0 gives the skew operator)");
  auto* cons = app.add_subcommand("constants", "Trace and Markov constants of the reference elements");
  cons->add_option("-o,--output", const_o.output, "Output directory");
  int max_N = 9;
  cons->add_option("--max-N", max_N, "Largest degree")->check(CLI::Range(1, 12));
  auto* plan = app.add_subcommand("timestep-plan", "Local timesteps and MRAB level assignment");
  add_run_options(plan, plan_o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) run_solve(resolve(solve_o));
    if (*conv) run_converge(resolve(conv_o));
    if (*spec) run_spectra(resolve(spec_o), penalty_scale);
    if (*cons) run_constants(resolve(const_o), max_N);
    if (*plan) run_plan(resolve(plan_o));
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
