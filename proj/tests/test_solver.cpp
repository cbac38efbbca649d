#include "stride/solver.hpp"
#include "stride/transcription.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

using namespace stride;

namespace {

TranscribedProblem bound_problem() {
  // minimize (x - 3)^2 subject to x >= 5
  TranscribedProblem p;
  p.num_vars = 1;
  p.layout = {{"x", 0, 1}};
  p.lower = Eigen::VectorXd::Constant(1, 5.0);
  p.upper = Eigen::VectorXd::Constant(1, kInfinity);
  const Expr x = p.pool.var(0);
  p.cost_root = square(x - 3.0).id();
  p.validate();
  return p;
}

TranscribedProblem simplex_problem() {
  // minimize x.x subject to sum(x) = 1, dim 4
  TranscribedProblem p;
  p.num_vars = 4;
  p.layout = {{"x", 0, 4}};
  p.lower = Eigen::VectorXd::Constant(4, -kInfinity);
  p.upper = Eigen::VectorXd::Constant(4, kInfinity);
  Expr cost = square(p.pool.var(0));
  Expr sum = p.pool.var(0);
  for (int i = 1; i < 4; ++i) {
    cost = cost + square(p.pool.var(i));
    sum = sum + p.pool.var(i);
  }
  p.cost_root = cost.id();
  p.equalities.push_back({(sum - 1.0).id(), ConvexityTag::Affine, ConstraintFamily::InitialState, -1, -1});
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("active bound: min (x-3)^2 with x >= 5") {
  const TranscribedProblem p = bound_problem();
  SolveOptions opt;
  opt.optimality_tolerance = 1e-8;
  const SolveResult r = solve(p, opt);
  REQUIRE(r.converged());
  CHECK(r.solution[0] == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(r.objective == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("equality-constrained symmetric QP") {
  const TranscribedProblem p = simplex_problem();
  SolveOptions opt;
  opt.feasibility_tolerance = 1e-9;
  opt.optimality_tolerance = 1e-8;
  const SolveResult r = solve(p, opt);
  REQUIRE(r.converged());
  for (int i = 0; i < 4; ++i) CHECK(r.solution[i] == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(r.constraint_violation <= 1e-9);
}

TEST_CASE("random small QP against the closed-form KKT solution") {
  // minimize sum_i (a_i.x - b_i)^2 + c.x subject to A x = d, 5 vars, 2 eq
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 5, m_ls = 7, m_eq = 2;

  Eigen::MatrixXd a(m_ls, n), big_a(m_eq, n);
  Eigen::VectorXd b(m_ls), c(n), d(m_eq);
  for (int i = 0; i < m_ls; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
    b(i) = u(rng);
  }
  for (int j = 0; j < n; ++j) c(j) = 0.3 * u(rng);
  for (int i = 0; i < m_eq; ++i) {
    for (int j = 0; j < n; ++j) big_a(i, j) = u(rng);
    d(i) = u(rng);
  }

  TranscribedProblem p;
  p.num_vars = n;
  p.layout = {{"x", 0, n}};
  p.lower = Eigen::VectorXd::Constant(n, -kInfinity);
  p.upper = Eigen::VectorXd::Constant(n, kInfinity);
  Expr cost = p.pool.constant(0.0);
  for (int i = 0; i < m_ls; ++i) {
    Expr row = p.pool.constant(-b(i));
    for (int j = 0; j < n; ++j) row = row + p.pool.scale(a(i, j), p.pool.var(j));
    cost = cost + square(row);
  }
  for (int j = 0; j < n; ++j) cost = cost + p.pool.scale(c(j), p.pool.var(j));
  p.cost_root = cost.id();
  for (int i = 0; i < m_eq; ++i) {
    Expr row = p.pool.constant(-d(i));
    for (int j = 0; j < n; ++j) row = row + p.pool.scale(big_a(i, j), p.pool.var(j));
    p.equalities.push_back({row.id(), ConvexityTag::Affine, ConstraintFamily::InitialState, -1, -1});
  }
  p.validate();

  // closed form: [2 Q  A^T; A 0] [x; nu] = [-c + 2 A_ls^T b; d], Q = A_ls^T A_ls
  const Eigen::MatrixXd q = a.transpose() * a;
  Eigen::MatrixXd kkt(n + m_eq, n + m_eq);
  kkt.setZero();
  kkt.topLeftCorner(n, n) = 2.0 * q;
  kkt.topRightCorner(n, m_eq) = big_a.transpose();
  kkt.bottomLeftCorner(m_eq, n) = big_a;
  Eigen::VectorXd rhs(n + m_eq);
  rhs.head(n) = 2.0 * a.transpose() * b - c;
  rhs.tail(m_eq) = d;
  const Eigen::VectorXd x_star = kkt.fullPivLu().solve(rhs).head(n);

  SolveOptions opt;
  opt.feasibility_tolerance = 1e-10;
  opt.optimality_tolerance = 1e-10;
  opt.max_iterations = 500;
  const SolveResult r = solve(p, opt);
  REQUIRE(r.converged());
  for (int j = 0; j < n; ++j) CHECK(std::abs(r.solution[j] - x_star(j)) <= 1e-8);
}

TEST_CASE("deterministic iterate sequences") {
  const TranscribedProblem p = simplex_problem();
  SolveOptions opt;
  std::ostringstream log1, log2;
  opt.iteration_log = &log1;
  const SolveResult r1 = solve(p, opt);
  opt.iteration_log = &log2;
  const SolveResult r2 = solve(p, opt);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.work_units == r2.work_units);
  CHECK(log1.str() == log2.str());
  REQUIRE(r1.solution.size() == r2.solution.size());
  for (std::size_t i = 0; i < r1.solution.size(); ++i) CHECK(r1.solution[i] == r2.solution[i]);
}

TEST_CASE("contradictory equalities are declared infeasible") {
  TranscribedProblem p;
  p.num_vars = 1;
  p.layout = {{"x", 0, 1}};
  p.lower = Eigen::VectorXd::Constant(1, -kInfinity);
  p.upper = Eigen::VectorXd::Constant(1, kInfinity);
  const Expr x = p.pool.var(0);
  p.cost_root = square(x).id();
  p.equalities.push_back({(x - 0.0).id(), ConvexityTag::Affine, ConstraintFamily::InitialState, -1, -1});
  p.equalities.push_back({(x - 1.0).id(), ConvexityTag::Affine, ConstraintFamily::InitialState, -1, -1});
  p.validate();
  const SolveResult r = solve(p);
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("non-finite start point is rejected with a diagnostic") {
  const TranscribedProblem p = simplex_problem();
  SolveOptions opt;
  opt.warm_start = std::vector<double>{std::nan(""), 0.0, 0.0, 0.0};
  const SolveResult r = solve(p, opt);
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK(r.diagnostic.find("non-finite") != std::string::npos);
}

TEST_CASE("wall-time limit returns the best iterate") {
  const TranscribedProblem p = simplex_problem();
  SolveOptions opt;
  opt.max_wall_time = 1e-9;
  const SolveResult r = solve(p, opt);
  CHECK(r.status == SolveStatus::TimedOut);
  CHECK(r.solution.size() == 4);
}

TEST_CASE("baseline flat one-step instance converges and validates") {
  Terrain t;
  const Vec3 ax1(0.2, 0, 0), ax2(0, 0.125, 0);
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, 0.15, 0), ax1, ax2, 0.5));
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, -0.15, 0), ax1, ax2, 0.5));
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0.45, 0.175, 0), ax1, Vec3(0, 0.15, 0), 0.5));
  t.start_surfaces = {0, 1};
  t.step_sequence = {2};

  const TranscriptionOptions topt;
  const HorizonSpec h = HorizonSpec::make(1, Foot::Left, 8);
  CentroidalState x0;
  x0.com = Vec3(0, 0, 0.78);
  CentroidalState goal;
  goal.com = t.surfaces[2].center() + Vec3(0, 0, 0.78);
  const TranscribedProblem p = build_baseline(h, t, x0, goal, topt);

  HorizonContext ctx;
  ctx.x_init = x0;
  ctx.x_goal = goal;
  std::tie(ctx.left, ctx.right) = initial_footsteps(t);
  ctx.step_surfaces = {2};
  SolveOptions opt;
  opt.warm_start = default_initial_guess(p, t, ctx, topt);
  const SolveResult r = solve(p, opt);
  REQUIRE(r.converged());
  const MotionPlan plan = extract_plan(p, r.solution);
  const ResidualReport rep = evaluate_residuals(plan, t, topt.robot.mass, topt.robot.gravity);
  CHECK(rep.dynamics <= opt.feasibility_tolerance);
  CHECK(rep.friction <= opt.feasibility_tolerance);
  CHECK(rep.polytope <= opt.feasibility_tolerance);
  CHECK(rep.surface <= opt.feasibility_tolerance);
  CHECK(rep.timing <= opt.feasibility_tolerance);
}
