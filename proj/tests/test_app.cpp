#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "hybriddg/app.hpp"

using namespace hdg;

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# cavity run\n"
      "mesh = hybrid:4\n"
      "N=3\n"
      "formulation = SEM   # lobatto\n"
      "\n"
      "cfl = 0.25\n"
      "levels = 5\n"
      "t_final = 1.5\n"
      "resolutions = 2, 4,8,16\n"
      "material.2 = 2.0 8.0\n"
      "output_dir = out\n");
  const RunConfig c = parse_config(in);
  EXPECT_EQ(c.mesh, "hybrid:4");
  EXPECT_EQ(c.N, 3);
  EXPECT_EQ(c.formulation, "SEM");
  EXPECT_DOUBLE_EQ(c.cfl, 0.25);
  EXPECT_EQ(c.levels, 5);
  EXPECT_DOUBLE_EQ(c.t_final, 1.5);
  EXPECT_EQ(c.resolutions, (std::vector<int>{2, 4, 8, 16}));
  ASSERT_EQ(c.materials.count(2), 1u);
  EXPECT_DOUBLE_EQ(c.materials.at(2).kappa, 8.0);
  EXPECT_DOUBLE_EQ(c.materials.at(2).wave_speed(), 2.0);
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, Defaults) {
  const RunConfig c;
  EXPECT_DOUBLE_EQ(c.cfl, 0.5);
  EXPECT_DOUBLE_EQ(c.t_final, 0.3);
  EXPECT_EQ(c.levels, 1);
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_config(in);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(error_of("N = 2\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("N = two\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("\n\nformulation = LGL\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("N 2\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("cfl = -1\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("material.1 = 1\n").find("line 1"), std::string::npos);
}

TEST(Cavity, PointValues) {
  EXPECT_NEAR(cavity_solution(Vec3(0.5, 0.5, 0.5), 0.0).p, 1.0, 1e-15);
  EXPECT_NEAR(cavity_solution(Vec3(0.5, 0.5, 0.5), 0.0).u.norm(), 0.0, 1e-15);
  const double tq = 1.0 / (2 * std::sqrt(3.0));
  EXPECT_NEAR(cavity_solution(Vec3(0.3, 0.7, 0.1), tq).p, 0.0, 1e-15);
  EXPECT_NEAR(cavity_solution(Vec3(0.0, 0.4, 0.9), 0.37).p, 0.0, 1e-15);
}

TEST(Cavity, SatisfiesAcousticSystem) {
  // second differences: p_tt = lap p, and du/dt = -grad p
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-4;
  for (int k = 0; k < 10; ++k) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const double t = u(rng);
    auto p = [](const Vec3& y, double s) { return cavity_solution(y, s).p; };
    const double ptt = (p(x, t + h) - 2 * p(x, t) + p(x, t - h)) / (h * h);
    double lap = 0;
    for (int d = 0; d < 3; ++d) {
      const Vec3 e = Vec3::Unit(d) * h;
      lap += (p(x + e, t) - 2 * p(x, t) + p(x - e, t)) / (h * h);
    }
    EXPECT_NEAR(ptt, lap, 1e-5 * std::max(1.0, std::abs(lap)));
    const Vec3 ut = (cavity_solution(x, t + h).u - cavity_solution(x, t - h).u) / (2 * h);
    for (int d = 0; d < 3; ++d) {
      const Vec3 e = Vec3::Unit(d) * h;
      const double gp = (p(x + e, t) - p(x - e, t)) / (2 * h);
      EXPECT_NEAR(ut(d), -gp, 1e-6);
    }
  }
}

TEST(Errors, ProjectionError) {
  const HybridMesh m = uniform_mesh(ElemType::hex, 4);
  const Discretization d(m, 4, Formulation::gl());
  const Eigen::VectorXd U = d.project(cavity_at(0.0));
  const Discretization::Error e = d.l2_error(U, cavity_at(0.0));
  EXPECT_GT(e.p, 0.0);
  EXPECT_LT(e.p, std::pow(0.25, 5));
  // the discrete function measured against its own values
  const Discretization::Error z = d.l2_error(Eigen::VectorXd::Zero(d.num_dofs()), [](const Vec3&) { return FieldValue{}; });
  EXPECT_EQ(z.p, 0.0);
  EXPECT_EQ(z.u, 0.0);
}

TEST(Errors, DecreaseUnderRefinement) {
  for (ElemType t : all_elem_types) {
    double prev = 1e300;
    for (int n : {1, 2, 4}) {
      const HybridMesh m = uniform_mesh(t, n);
      const Discretization d(m, 2, Formulation::gl());
      const double e = d.l2_error(d.project(cavity_at(0.1)), cavity_at(0.1)).p;
      EXPECT_LT(e, prev) << to_string(t);
      prev = e;
    }
  }
}

TEST(Convergence, RateIsLeastSquaresSlope) {
  EXPECT_NEAR(convergence_rate({1.0, 0.125, 0.015625}), 3.0, 1e-12);
  EXPECT_NEAR(convergence_rate({1.0, 0.25}), 2.0, 1e-12);
  EXPECT_NEAR(convergence_rate({1.0, 0.3, 0.0625}), 2.0, 1e-12);
  EXPECT_THROW(convergence_rate({1.0}), std::invalid_argument);
}

TEST(Convergence, GaussHexQuadratic) {
  RunConfig cfg;
  cfg.mesh = "hex";
  cfg.N = 2;
  cfg.resolutions = {2, 4, 8};
  const ConvergenceTable t = convergence_study(cfg);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_GE(t.rate_p, 2.5);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LT(t.rows[i].err_p, t.rows[i - 1].err_p);
  cfg.resolutions = {2, 4};
  EXPECT_THROW(convergence_study(cfg), ConfigError);
}

TEST(Csv, HeaderAndScientificNotation) {
  const std::regex sci(R"(-?\d\.\d{17}e[+-]\d{2,3})");
  std::ostringstream out;
  write_constants_csv(out, 2);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "element,N,trace_full,trace_sem,markov,trace_analytic,trace_analytic_sem");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string f;
    int col = 0;
    while (std::getline(fields, f, ',')) {
      if (col++ >= 2) {
        EXPECT_TRUE(std::regex_match(f, sci)) << f;
      }
    }
    EXPECT_EQ(col, 7);
  }
  EXPECT_EQ(rows, 8);
}

TEST(Solve, DeterministicAndConsistent) {
  RunConfig cfg;
  cfg.mesh = "wedge:2";
  cfg.N = 2;
  cfg.t_final = 0.1;
  const HybridMesh m = build_mesh(cfg);
  const SolveResult a = solve_cavity(m, cfg), b = solve_cavity(m, cfg);
  EXPECT_EQ(a.error.p, b.error.p);
  EXPECT_EQ(a.error.u, b.error.u);
  EXPECT_DOUBLE_EQ(a.t_end, 0.1);
  EXPECT_EQ(a.rhs_evaluations, a.steps + 4);  // two SSP-RK3 start-up steps
  std::ostringstream s;
  write_solve_summary_csv(s, cfg, a);
  EXPECT_EQ(s.str().substr(0, 5), "mesh,");
}
