#include "stride/transcription.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace stride;

namespace {

// two flat side-by-side start patches and one step surface coinciding with
// the left patch: a stance that can stay exactly where it is
Terrain static_terrain() {
  Terrain t;
  const Vec3 ax1(0.2, 0, 0), ax2(0, 0.12, 0);
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, 0.12, 0), ax1, ax2, 0.5));
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, -0.12, 0), ax1, ax2, 0.5));
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, 0.12, 0), ax1, ax2, 0.5));
  t.start_surfaces = {0, 1};
  t.step_sequence = {2};
  return t;
}

/// Hand-built stationary decision vector: CoM fixed above the right foot,
/// all weight on the right foot's four corners, the left foot "lands" at its
/// own start position.
std::vector<double> static_vector(const TranscribedProblem& p, const TranscriptionOptions& opt,
                                  const Terrain& terrain) {
  const auto& st = p.structure;
  std::vector<double> x(p.num_vars, 0.0);
  const Vec3 com = terrain.surfaces[1].center() + Vec3(0, 0, 0.78);
  for (const KnotRef& knot : st.state_knots) {
    x[knot.offset + 0] = com.x();
    x[knot.offset + 1] = com.y();
    x[knot.offset + 2] = com.z();
  }
  const double f_corner = opt.robot.mass * opt.robot.gravity.norm() / 4.0;
  for (const PhaseStructure& ph : st.phases) {
    for (int k = 0; k < ph.spec.knot_count; ++k)
      for (std::size_t c = 0; c < ph.contacts.size(); ++c)
        if (ph.contacts[c].foot == Foot::Right) x[ph.control_offsets[k] + 3 * c + 2] = f_corner;
  }
  const Vec3 p1 = terrain.surfaces[0].center();
  for (int j = 0; j < 3; ++j) x[st.footstep_offsets[0] + j] = p1(j);
  for (const PhaseStructure& ph : st.phases) x[ph.duration_var] = 0.3;
  return x;
}

}  // namespace

TEST_CASE("horizon spec cycles phases and alternates the swing foot") {
  const HorizonSpec h = HorizonSpec::make(2, Foot::Left, 8);
  REQUIRE(h.phases.size() == 6);
  CHECK(h.phases[0].kind == PhaseKind::PreSwing);
  CHECK(h.phases[1].kind == PhaseKind::Swing);
  CHECK(h.phases[2].kind == PhaseKind::PostLanding);
  // first step swings left: the stance is the right foot
  CHECK(h.phases[1].active_feet == std::vector<Foot>{Foot::Right});
  CHECK(h.phases[4].active_feet == std::vector<Foot>{Foot::Left});
  CHECK(h.effective_t_max() == doctest::Approx(2.4));

  HorizonSpec bad = h;
  bad.phases[4].active_feet = {Foot::Right};
  CHECK_THROWS_AS(bad.validate(), StructuralError);
}

TEST_CASE("baseline layout and constraint counts for n=1, N_k=2") {
  const Terrain terrain = static_terrain();
  const HorizonSpec h = HorizonSpec::make(1, Foot::Left, 2);
  CentroidalState x0;
  x0.com = Vec3(0, 0, 0.78);
  const TranscribedProblem p = build_baseline(h, terrain, x0, x0);

  // states: 7 knots x 9 = 63; controls: (8+4+8) contacts x 2 knots x 3 = 120;
  // footsteps 3; times 3
  CHECK(p.num_vars == 63 + 120 + 3 + 3);
  std::map<std::string, int> slices;
  for (const NamedSlice& s : p.layout) slices[s.name] = s.length;
  CHECK(slices["X"] == 63);
  CHECK(slices["U"] == 120);
  CHECK(slices["P"] == 3);
  CHECK(slices["T"] == 3);
  CHECK(slices["PSI"] == 0);

  // equalities: initial 9 + dynamics 9 rows x 6 intervals + plane 1
  CHECK(p.equalities.size() == 9 + 54 + 1);
  // inequalities: timing 1 (total-duration cap; monotonicity is a bound on
  //               the duration variables) + surface bounds 4 + reachability 6
  //             + CoM polytope (3x2 + 3x1 + 3x2) knots*feet x 6 = 90
  //             + friction (2x8 + 2x4 + 2x8) x 4 = 160
  CHECK(p.inequalities.size() == 1 + 4 + 6 + 90 + 160);

  std::map<ConstraintFamily, int> families;
  for (const auto& row : p.equalities) ++families[row.family];
  for (const auto& row : p.inequalities) ++families[row.family];
  CHECK(families[ConstraintFamily::InitialState] == 9);
  CHECK(families[ConstraintFamily::Dynamics] == 54);
  CHECK(families[ConstraintFamily::Timing] == 1);
  CHECK(families[ConstraintFamily::SurfacePlane] == 1);
  CHECK(families[ConstraintFamily::SurfaceBounds] == 4);
  CHECK(families[ConstraintFamily::Reachability] == 6);
  CHECK(families[ConstraintFamily::ComPolytope] == 90);
  CHECK(families[ConstraintFamily::FrictionCone] == 160);

  // baseline emits nonconvex dynamics rows at every interval knot
  int nonconvex = 0;
  for (const auto& row : p.equalities)
    if (row.tag == ConvexityTag::Nonconvex) ++nonconvex;
  CHECK(nonconvex == 54);
}

TEST_CASE("missing step surface raises a structural error naming the step") {
  const Terrain terrain = static_terrain();  // one step only
  const HorizonSpec h = HorizonSpec::make(2, Foot::Left, 2);
  CentroidalState x0;
  try {
    build_baseline(h, terrain, x0, x0);
    FAIL("expected StructuralError");
  } catch (const StructuralError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("stationary stance satisfies the transcribed dynamics exactly") {
  const Terrain terrain = static_terrain();
  const TranscriptionOptions opt;
  const HorizonSpec h = HorizonSpec::make(1, Foot::Left, 2);
  CentroidalState x0;
  x0.com = terrain.surfaces[1].center() + Vec3(0, 0, 0.78);
  const TranscribedProblem p = build_baseline(h, terrain, x0, x0, opt);
  const std::vector<double> x = static_vector(p, opt, terrain);

  TranscribedProblem::EvalBuffer buf;
  p.forward(x, buf);
  double dyn = 0.0;
  for (const auto& row : p.equalities)
    if (row.family == ConstraintFamily::Dynamics) dyn = std::max(dyn, std::abs(buf.values[row.root]));
  CHECK(dyn <= 1e-10);
  // the full problem is feasible at this point
  CHECK(p.max_violation(buf) <= 1e-10);

  // and the extracted plan passes the independent validator
  const MotionPlan plan = extract_plan(p, x);
  const ResidualReport rep = evaluate_residuals(plan, terrain, opt.robot.mass, opt.robot.gravity);
  CHECK(rep.dynamics <= 1e-10);
  CHECK(rep.max() <= 1e-10);

  // scaling one force up strictly grows the dynamics residual
  MotionPlan bumped = plan;
  bumped.forces[0][0][4] *= 2.0;  // a right-foot corner in pre-swing
  const ResidualReport worse = evaluate_residuals(bumped, terrain, opt.robot.mass, opt.robot.gravity);
  CHECK(worse.dynamics > rep.dynamics);
}

TEST_CASE("forward Euler dynamics step") {
  CentroidalState x;
  x.com = Vec3(0, 0, 1);
  const Vec3 g(0, 0, 9.81);

  SUBCASE("free fall drops the vertical velocity") {
    const CentroidalState next = dynamics_step(x, {}, {}, 0.1, 95.0, g);
    CHECK(next.com_velocity.z() == doctest::Approx(-0.981));
    CHECK(next.com == x.com);
  }
  SUBCASE("gravity-cancelling force below the CoM leaves velocity and momentum") {
    const Vec3 f(0, 0, 95.0 * 9.81);
    const CentroidalState next = dynamics_step(x, {f}, {Vec3(0, 0, 0)}, 0.1, 95.0, g);
    CHECK(next.com_velocity.norm() <= 1e-12);
    CHECK(next.angular_momentum.norm() <= 1e-12);
  }
  SUBCASE("symmetric lever arms cancel") {
    const Vec3 f(0, 0, 0.5 * 95.0 * 9.81);
    const CentroidalState next =
        dynamics_step(x, {f, f}, {Vec3(0.3, 0, 0), Vec3(-0.3, 0, 0)}, 0.1, 95.0, g);
    CHECK(next.angular_momentum.norm() <= 1e-12);
  }
  SUBCASE("mismatched force and contact lists are structural errors") {
    CHECK_THROWS_AS(dynamics_step(x, {Vec3::Zero()}, {}, 0.1, 95.0, g), StructuralError);
    CHECK_THROWS_AS(dynamics_step(x, {}, {}, 0.0, 95.0, g), StructuralError);
  }
}

TEST_CASE("swing spline") {
  SUBCASE("equal endpoints peak exactly at the clearance") {
    const SwingSpline s = swing_spline(Vec3(1, 2, 0.3), Vec3(1, 2, 0.3), 0.05, 0.5);
    CHECK(s.position(0.0) == Vec3(1, 2, 0.3));
    CHECK(s.position(0.5) == Vec3(1, 2, 0.3));
    CHECK(s.position(0.25).z() == doctest::Approx(0.35).epsilon(1e-12));
  }
  SUBCASE("different endpoint heights interpolate exactly") {
    const Vec3 a(0, 0, 0.0), b(0.3, 0.1, 0.2);
    const SwingSpline s = swing_spline(a, b, 0.07, 0.8);
    CHECK((s.position(0.0) - a).norm() <= 1e-12);
    CHECK((s.position(0.8) - b).norm() <= 1e-12);
    // dense sampling: apex reaches clearance above the higher endpoint
    double apex = -1e9;
    for (const Vec3& p : s.sample(101)) apex = std::max(apex, p.z());
    CHECK(apex >= 0.2 + 0.07 - 1e-9);
  }
  SUBCASE("non-positive durations are rejected") {
    CHECK_THROWS_AS(swing_spline(Vec3::Zero(), Vec3::Zero(), 0.05, 0.0), std::invalid_argument);
  }
}

TEST_CASE("constraint and cost derivatives match central differences") {
  const Terrain terrain = static_terrain();
  const TranscriptionOptions opt;
  const HorizonSpec h = HorizonSpec::make(1, Foot::Left, 2);
  CentroidalState x0;
  x0.com = terrain.surfaces[1].center() + Vec3(0, 0, 0.78);
  const TranscribedProblem p = build_baseline(h, terrain, x0, x0, opt);

  HorizonContext ctx;
  ctx.x_init = x0;
  ctx.x_goal = x0;
  std::tie(ctx.left, ctx.right) = initial_footsteps(terrain);
  ctx.step_surfaces = {2};
  const std::vector<double> base = default_initial_guess(p, terrain, ctx, opt);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const auto check_root = [&](std::int32_t root, const std::vector<double>& x) {
    const SparseGradient g = p.pool.gradient(root, x);
    for (const auto& [var, val] : g.entries) {
      std::vector<double> xp = x;
      const double step = 1e-6 * std::max(1.0, std::abs(x[var]));
      xp[var] += step;
      const double up = p.pool.value(root, xp);
      xp[var] -= 2 * step;
      const double down = p.pool.value(root, xp);
      const double fd = (up - down) / (2 * step);
      CHECK(std::abs(val - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x = base;
    for (double& v : x) v += u(rng);
    // one row of every family plus the cost
    std::map<ConstraintFamily, std::int32_t> pick;
    for (const auto& row : p.equalities) pick[row.family] = row.root;
    for (const auto& row : p.inequalities) pick[row.family] = row.root;
    for (const auto& [fam, root] : pick) check_root(root, x);
    check_root(p.cost_root, x);
  }
}

TEST_CASE("initial guess encodes a structurally valid vector") {
  const Terrain terrain = static_terrain();
  const TranscriptionOptions opt;
  const HorizonSpec h = HorizonSpec::make(1, Foot::Left, 4);
  CentroidalState x0;
  x0.com = terrain.surfaces[1].center() + Vec3(0, 0, 0.78);
  const TranscribedProblem p = build_baseline(h, terrain, x0, x0, opt);
  HorizonContext ctx;
  ctx.x_init = x0;
  ctx.x_goal = x0;
  std::tie(ctx.left, ctx.right) = initial_footsteps(terrain);
  ctx.step_surfaces = {2};
  const std::vector<double> guess = default_initial_guess(p, terrain, ctx, opt);
  REQUIRE(static_cast<int>(guess.size()) == p.num_vars);
  // initial state is pinned
  TranscribedProblem::EvalBuffer buf;
  p.forward(guess, buf);
  for (const auto& row : p.equalities)
    if (row.family == ConstraintFamily::InitialState) CHECK(std::abs(buf.values[row.root]) <= 1e-12);
  // timing monotone in the guess
  const MotionPlan plan = extract_plan(p, guess);
  CHECK_NOTHROW(plan.validate());
}
