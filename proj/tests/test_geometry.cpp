#include "stride/geometry.hpp"
#include "stride/terrain_io.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace stride;

namespace {

ContactSurface unit_square() {
  return ContactSurface::from_vertices(
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, 0.5);
}

ContactSurface random_patch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 center(2.0 * u(rng), 2.0 * u(rng), 0.5 * u(rng));
  const Eigen::Quaterniond q =
      Eigen::Quaterniond(1.0 + u(rng), 0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng)).normalized();
  const Mat3 rot = q.toRotationMatrix();
  const double l1 = 0.2 + 0.3 * std::abs(u(rng));
  const double l2 = 0.15 + 0.3 * std::abs(u(rng));
  const Vec3 a1 = rot * Vec3(l1, 0, 0);
  // skew the second border to get a genuine parallelogram
  const Vec3 a2 = rot * Vec3(0.3 * l1 * u(rng), l2, 0);
  return ContactSurface::from_center_axes(center, a1, a2, 0.7);
}

}  // namespace

TEST_CASE("centroidal state flattens in (c, cdot, L) order") {
  CentroidalState x;
  x.com = Vec3(1, 2, 3);
  x.com_velocity = Vec3(4, 5, 6);
  x.angular_momentum = Vec3(7, 8, 9);
  const Vec9 v = x.flatten();
  for (int i = 0; i < 9; ++i) CHECK(v(i) == i + 1);
  const CentroidalState q = CentroidalState::unflatten(v);
  CHECK(q.com == x.com);
  CHECK(q.angular_momentum == x.angular_momentum);
  CHECK(x.all_finite());
}

TEST_CASE("surface validation rejects broken patches") {
  CHECK_THROWS_AS(ContactSurface::from_vertices(
                      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0.5), Vec3(0, 1, 0)}, 0.5),
                  StructuralError);
  CHECK_THROWS_AS(ContactSurface::from_vertices(
                      {Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, 0.5),
                  StructuralError);
  // trapezoid: V3-V4 != V2-V1
  CHECK_THROWS_AS(ContactSurface::from_vertices(
                      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1.5, 1, 0), Vec3(0, 1, 0)}, 0.5),
                  StructuralError);
}

TEST_CASE("unit square halfplanes") {
  const SurfaceHalfplanes hp = surface_to_halfplanes(unit_square());
  CHECK(hp.d.isApprox(Vec3(0, 0, 1)));
  CHECK(hp.e == doctest::Approx(0.0));
  // all vertices satisfy S v <= s with equality on incident edges
  const ContactSurface s = unit_square();
  for (const Vec3& v : s.vertices) {
    const Eigen::Vector4d r = hp.S * v - hp.s;
    CHECK(r.maxCoeff() <= 1e-12);
    int active = 0;
    for (int i = 0; i < 4; ++i)
      if (std::abs(r(i)) < 1e-12) ++active;
    CHECK(active == 2);
  }
  // center strictly inside
  const Eigen::Vector4d rc = hp.S * s.center() - hp.s;
  CHECK(rc.maxCoeff() < -0.4);
}

TEST_CASE("point 1mm outside an edge violates exactly one inequality") {
  const ContactSurface s = unit_square();
  const SurfaceHalfplanes hp = surface_to_halfplanes(s);
  // midpoint of edge V1->V2, offset along the outward edge normal
  const Vec3 mid = 0.5 * (s.vertices[0] + s.vertices[1]);
  const Vec3 outward = (s.vertices[1] - s.vertices[0]).cross(s.unit_normal).normalized();
  const Vec3 p = mid + 1e-3 * outward;
  const Eigen::Vector4d r = hp.S * p - hp.s;
  int violated = 0;
  for (int i = 0; i < 4; ++i)
    if (r(i) > 0) ++violated;
  CHECK(violated == 1);
  CHECK(r.maxCoeff() == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("on-surface parameterization") {
  const ContactSurface s = unit_square();
  CHECK(on_surface_point(s, 0, 0) == s.vertices[0]);
  CHECK(on_surface_point(s, 0.5, 0.5).isApprox(s.center()));
  CHECK_THROWS_AS(on_surface_point(s, -0.1, 0.5), std::out_of_range);
  CHECK_THROWS_AS(on_surface_point(s, 0.5, 1.1), std::out_of_range);
}

TEST_CASE("random on-surface points satisfy halfplane containment") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ContactSurface s = random_patch(rng);
    const SurfaceHalfplanes hp = surface_to_halfplanes(s);
    const double a1 = u01(rng), a2 = u01(rng);
    const Vec3 p = on_surface_point(s, a1, a2);
    CHECK(std::abs(hp.d.dot(p) - hp.e) <= 1e-9);
    CHECK((hp.S * p - hp.s).maxCoeff() <= 1e-9);
    // inverse parameterization recovers alpha
    const Eigen::Vector2d a = surface_alphas(s, p);
    CHECK(std::abs(a(0) - a1) <= 1e-9);
    CHECK(std::abs(a(1) - a2) <= 1e-9);
  }
}

TEST_CASE("contact-foot frame on flat ground") {
  const ContactSurface s = unit_square();
  Footstep f;
  f.position = Vec3::Zero();
  bool fallback = true;
  const RigidTransform t = contact_foot_frame(f, s, &fallback);
  CHECK_FALSE(fallback);
  CHECK(t.rotation.isApprox(Mat3::Identity()));
  CHECK(t.translation == Vec3::Zero());

  f.position = Vec3(1, 2, 0);
  const RigidTransform t2 = contact_foot_frame(f, s);
  CHECK(t2.rotation.isApprox(Mat3::Identity()));
  CHECK(t2.translation == Vec3(1, 2, 0));
  CHECK(t2.to_local(Vec3(1, 2, 0)) == Vec3::Zero());
}

TEST_CASE("10-degree pitch surface maps its normal to +z") {
  const double angle = 10.0 * M_PI / 180.0;
  const Eigen::AngleAxisd rot(angle, Vec3::UnitY());
  const ContactSurface s = ContactSurface::from_center_axes(
      Vec3(0.5, 0, 0.1), rot * Vec3(0.2, 0, 0), rot * Vec3(0, 0.2, 0), 0.5);
  Footstep f;
  f.position = s.center();
  const RigidTransform t = contact_foot_frame(f, s);
  CHECK((t.rotate_to_local(s.unit_normal) - Vec3(0, 0, 1)).norm() <= 1e-12);
  // right-handed
  CHECK(t.rotation.determinant() == doctest::Approx(1.0));
}

TEST_CASE("frame falls back to the y-axis when the normal is along x") {
  // vertical patch with normal = +x
  const ContactSurface s = ContactSurface::from_center_axes(Vec3(0, 0, 1), Vec3(0, 0.2, 0),
                                                            Vec3(0, 0, 0.2), 0.5);
  REQUIRE(s.unit_normal.isApprox(Vec3(1, 0, 0)));
  bool fallback = false;
  const Mat3 r = surface_rotation(s, &fallback);
  CHECK(fallback);
  CHECK(r.col(2).isApprox(Vec3(1, 0, 0)));
  CHECK(r.determinant() == doctest::Approx(1.0));
}

TEST_CASE("frame round trip within 1e-10") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const ContactSurface s = random_patch(rng);
    Footstep f;
    f.position = s.center();
    const RigidTransform t = contact_foot_frame(f, s);
    const Vec3 p(u(rng), u(rng), u(rng));
    CHECK((t.to_world(t.to_local(p)) - p).norm() <= 1e-10);
    const RigidTransform anchored = surface_anchored_frame(s, s.vertices[0]);
    CHECK((anchored.to_world(anchored.to_local(p)) - p).norm() <= 1e-10);
  }
}

TEST_CASE("kinematic polytope boxes") {
  const KinematicPolytope box = KinematicPolytope::box(Vec3(-1, -1, 0), Vec3(1, 1, 2));
  CHECK(box.size() == 6);
  CHECK(box.contains(Vec3(0, 0, 1)));
  CHECK_FALSE(box.contains(Vec3(0, 0, 2.5)));
  CHECK(box.max_violation(Vec3(0, 0, 2.5)) == doctest::Approx(0.5));
  CHECK_NOTHROW(box.validate());

  KinematicPolytope open;  // half space: unbounded
  open.rows.resize(1, 3);
  open.rows.row(0) = Vec3(0, 0, 1).transpose();
  open.offsets.resize(1);
  open.offsets(0) = 1.0;
  CHECK_THROWS_AS(open.validate(), StructuralError);
}

TEST_CASE("phase spec validation") {
  PhaseSpec swing{PhaseKind::Swing, {Foot::Left}, 8};
  CHECK_NOTHROW(swing.validate());
  swing.active_feet = {Foot::Left, Foot::Right};
  CHECK_THROWS_AS(swing.validate(), StructuralError);
  PhaseSpec pre{PhaseKind::PreSwing, {Foot::Left}, 8};
  CHECK_THROWS_AS(pre.validate(), StructuralError);
}

TEST_CASE("terrain JSON round trip") {
  Terrain t;
  t.surfaces = {unit_square(),
                ContactSurface::from_center_axes(Vec3(1.5, 0, 0.25), Vec3(0.2, 0, 0.05),
                                                 Vec3(0, 0.2, 0), 0.9)};
  t.start_surfaces = {0, 0};
  t.step_sequence = {1, 1};
  const std::string json = terrain_to_json(t);
  std::istringstream in(json);
  const Terrain back = load_terrain(in);
  REQUIRE(back.surfaces.size() == 2);
  CHECK(back.step_sequence == t.step_sequence);
  for (int i = 0; i < 4; ++i) CHECK(back.surfaces[1].vertices[i] == t.surfaces[1].vertices[i]);
  CHECK(back.surfaces[1].friction == 0.9);

  Terrain bad = t;
  bad.step_sequence = {5};
  CHECK_THROWS_AS(bad.validate(), StructuralError);
}

TEST_CASE("foot corners and phase layouts") {
  FootGeometry foot;
  const auto corners = foot.local_corners();
  CHECK(corners[0] == Vec3(0.1, 0.05, 0));
  Vec3 sum = Vec3::Zero();
  for (const Vec3& c : corners) sum += c;
  CHECK(sum.norm() == 0.0);
}
