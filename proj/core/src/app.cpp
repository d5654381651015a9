#include "hybriddg/app.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hybriddg/timeint.hpp"

namespace hdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) throw ConfigError("bad value for '" + key + "': " + value);
  return v;
}

std::string sci(double v) { return fmt::format("{:.17e}", v); }

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mesh") {
    cfg.mesh = value;
  } else if (key == "N") {
    cfg.N = parse_number<int>(key, value);
  } else if (key == "formulation") {
    Formulation::from_string(value);  // validates
    cfg.formulation = value;
  } else if (key == "cfl") {
    cfg.cfl = parse_number<double>(key, value);
  } else if (key == "levels") {
    cfg.levels = parse_number<int>(key, value);
  } else if (key == "t_final") {
    cfg.t_final = parse_number<double>(key, value);
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "resolutions") {
    cfg.resolutions.clear();
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) cfg.resolutions.push_back(parse_number<int>(key, trim(item)));
  } else if (key.rfind("material.", 0) == 0) {
    const int tag = parse_number<int>(key, key.substr(9));
    std::istringstream is(value);
    Material m;
    if (!(is >> m.rho >> m.kappa) || m.rho <= 0 || m.kappa <= 0)
      throw ConfigError("material needs positive 'rho kappa': " + value);
    cfg.materials[tag] = m;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
  if (cfg.N < 1) throw ConfigError("N must be at least 1");
  if (cfg.levels < 1) throw ConfigError("levels must be at least 1");
  if (!(cfg.cfl > 0)) throw ConfigError("cfl must be positive");
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected key = value", lineno));
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("config line {}: {}", lineno, e.what()));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

FieldValue cavity_solution(const Vec3& x, double t) {
  using std::numbers::pi;
  const double w = std::sqrt(3.0) * pi;
  const double sx = std::sin(pi * x(0)), sy = std::sin(pi * x(1)), sz = std::sin(pi * x(2));
  const double cx = std::cos(pi * x(0)), cy = std::cos(pi * x(1)), cz = std::cos(pi * x(2));
  FieldValue v;
  v.p = sx * sy * sz * std::cos(w * t);
  // rho du/dt = -grad p
  const double a = -pi * std::sin(w * t) / w;
  v.u = a * Vec3(cx * sy * sz, sx * cy * sz, sx * sy * cz);
  return v;
}

FieldFunction cavity_at(double t) {
  return [t](const Vec3& x) { return cavity_solution(x, t); };
}

HybridMesh build_mesh(const RunConfig& cfg) {
  HybridMesh mesh = make_mesh(cfg.mesh);
  for (const auto& [tag, m] : cfg.materials) mesh.materials[tag] = m;
  return mesh;
}

SolveResult solve_cavity(const HybridMesh& mesh, const RunConfig& cfg, bool track_energy) {
  const Discretization d(mesh, cfg.N, Formulation::from_string(cfg.formulation));
  const DGSystem sys(d);
  Eigen::VectorXd U = d.project(cavity_at(0.0));
  const std::vector<double> dt_local = local_timesteps(d, cfg.cfl);

  SolveResult res;
  res.dofs = d.num_dofs();
  double e0 = 0.0, prev = 0.0;
  StepObserver obs;
  if (track_energy)
    obs = [&](int step, double t, const Eigen::VectorXd& V) {
      const double e = d.energy(V);
      if (step == 0) e0 = e;
      else res.max_energy_increase = std::max(res.max_energy_increase, (e - prev) / e0);
      prev = e;
      res.energy.push_back({step, t, e});
    };

  RunStats st;
  if (cfg.levels == 1) {
    res.dt_min = *std::min_element(dt_local.begin(), dt_local.end());
    st = run_ab3(sys, U, 0.0, cfg.t_final, res.dt_min, obs);
    res.rhs_evaluations = st.rhs_evaluations;
  } else {
    std::vector<std::vector<int>> nbrs(d.num_elements());
    for (int e = 0; e < d.num_elements(); ++e) nbrs[e] = d.neighbors(e);
    MultirateAB mrab(sys, assign_mrab_levels(dt_local, cfg.levels, nbrs));
    res.dt_min = mrab.plan().dt_min;
    res.level_counts = mrab.plan().count;
    st = mrab.run(U, 0.0, cfg.t_final, obs);
    res.level_evaluations = st.block_evaluations;
  }
  res.steps = st.steps;
  res.t_end = st.t_end;
  res.error = d.l2_error(U, cavity_at(st.t_end));
  return res;
}

double convergence_rate(const std::vector<double>& errors) {
  if (errors.size() < 2) throw std::invalid_argument("convergence_rate: need at least two errors");
  const double n = static_cast<double>(errors.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double x = k * std::log(2.0), y = -std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(const RunConfig& cfg) {
  if (cfg.resolutions.size() < 3) throw ConfigError("a convergence study needs at least three resolutions");
  ConvergenceTable table;
  std::vector<double> ep, eu, es;
  for (int n : cfg.resolutions) {
    RunConfig c = cfg;
    c.mesh = fmt::format("{}:{}", cfg.mesh, n);
    const SolveResult r = solve_cavity(build_mesh(c), c, false);
    const double err = std::hypot(r.error.p, r.error.u);
    table.rows.push_back({c.mesh, 1.0 / n, r.dofs, r.error.p, r.error.u, err});
    ep.push_back(r.error.p);
    eu.push_back(r.error.u);
    es.push_back(err);
  }
  table.rate = convergence_rate(es);
  table.rate_p = convergence_rate(ep);
  table.rate_u = convergence_rate(eu);
  return table;
}

void write_constants_csv(std::ostream& out, int max_N) {
  fmt::print(out, "element,N,trace_full,trace_sem,markov,trace_analytic,trace_analytic_sem\n");
  for (ElemType t : all_elem_types)
    for (int N = 1; N <= max_N; ++N)
      fmt::print(out, "{},{},{},{},{},{},{}\n", to_string(t), N, sci(computed_trace_constant(t, N, TraceMode::full)),
                 sci(computed_trace_constant(t, N, TraceMode::sem)), sci(markov_constant(t, N)),
                 sci(analytic_trace_constant(t, N, TraceMode::full)),
                 sci(analytic_trace_constant(t, N, TraceMode::sem)));
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& t) {
  fmt::print(out, "mesh,h,dofs,error,error_p,error_u\n");
  for (const auto& r : t.rows)
    fmt::print(out, "{},{},{},{},{},{}\n", r.mesh, sci(r.h), r.dofs, sci(r.err), sci(r.err_p), sci(r.err_u));
}

void write_energy_csv(std::ostream& out, const SolveResult& r) {
  fmt::print(out, "step,t,energy\n");
  for (const auto& s : r.energy) fmt::print(out, "{},{},{}\n", s.step, sci(s.t), sci(s.energy));
}

void write_solve_summary_csv(std::ostream& out, const RunConfig& cfg, const SolveResult& r) {
  fmt::print(out, "mesh,N,formulation,levels,cfl,dofs,dt_min,steps,t_end,error_p,error_u,max_energy_increase\n");
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{}\n", cfg.mesh, cfg.N, cfg.formulation, cfg.levels, sci(cfg.cfl),
             r.dofs, sci(r.dt_min), r.steps, sci(r.t_end), sci(r.error.p), sci(r.error.u),
             sci(r.max_energy_increase));
}

void write_timestep_plan_csv(std::ostream& out, const Discretization& d, double cfl, int levels) {
  const std::vector<double> dt = local_timesteps(d, cfl);
  std::vector<std::vector<int>> nbrs(d.num_elements());
  for (int e = 0; e < d.num_elements(); ++e) nbrs[e] = d.neighbors(e);
  const LevelPlan plan = assign_mrab_levels(dt, levels, nbrs);
  fmt::print(out, "element,type,dt_local,level,level_dt\n");
  for (int e = 0; e < d.num_elements(); ++e)
    fmt::print(out, "{},{},{},{},{}\n", e, to_string(d.mesh().elements[e].type), sci(dt[e]), plan.level[e],
               sci(plan.level_dt[plan.level[e]]));
}

void write_eigenvalues_csv(std::ostream& out, const Spectrum& s) {
  fmt::print(out, "real,imag\n");
  for (const auto& z : s.eigenvalues) fmt::print(out, "{},{}\n", sci(z.real()), sci(z.imag()));
}

void write_bounds_csv(std::ostream& out, const Discretization& d, const Spectrum& s, const SpectralBounds& b) {
  fmt::print(out,
             "N,formulation,dofs,rho,max_real,rho_sym,rho_skew,bound_element,bound_computed,bound_analytic,"
             "bound_imag\n");
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", d.degree(), d.formulation().name(), d.num_dofs(), sci(s.rho),
             sci(s.max_real), sci(s.rho_sym), sci(s.rho_skew), sci(b.re_element), sci(b.re_computed),
             sci(b.re_analytic), sci(b.im));
}

}  // namespace hdg
