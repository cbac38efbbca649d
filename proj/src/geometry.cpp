#include "stride/geometry.hpp"

#include <cmath>

namespace stride {

Vec9 CentroidalState::flatten() const {
  Vec9 v;
  v.segment<3>(0) = com;
  v.segment<3>(3) = com_velocity;
  v.segment<3>(6) = angular_momentum;
  return v;
}

CentroidalState CentroidalState::unflatten(const Vec9& v) {
  CentroidalState x;
  x.com = v.segment<3>(0);
  x.com_velocity = v.segment<3>(3);
  x.angular_momentum = v.segment<3>(6);
  return x;
}

bool CentroidalState::all_finite() const { return flatten().allFinite(); }

Vec3 ContactSurface::center() const {
  return 0.25 * (vertices[0] + vertices[1] + vertices[2] + vertices[3]);
}

ContactSurface ContactSurface::from_vertices(const std::array<Vec3, 4>& v, double mu) {
  ContactSurface s;
  s.vertices = v;
  const Vec3 n = (v[1] - v[0]).cross(v[3] - v[0]);
  if (n.norm() < 1e-12) throw StructuralError("contact surface has degenerate borders");
  s.unit_normal = n.normalized();
  s.friction = mu;
  s.validate();
  return s;
}

ContactSurface ContactSurface::from_center_axes(const Vec3& center, const Vec3& half_axis1,
                                                const Vec3& half_axis2, double mu) {
  std::array<Vec3, 4> v;
  v[0] = center - half_axis1 - half_axis2;
  v[1] = center + half_axis1 - half_axis2;
  v[2] = center + half_axis1 + half_axis2;
  v[3] = center - half_axis1 + half_axis2;
  return from_vertices(v, mu);
}

void ContactSurface::validate() const {
  if (friction < 0.0) throw StructuralError("friction coefficient must be >= 0");
  const Vec3 r1 = border1();
  const Vec3 r2 = border2();
  if (r1.norm() < 1e-12 || r2.norm() < 1e-12) throw StructuralError("surface borders must be nonzero");
  if (std::abs(unit_normal.norm() - 1.0) > 1e-12) throw StructuralError("surface normal must be unit length");
  if (std::abs(unit_normal.dot(r1)) > 1e-9 || std::abs(unit_normal.dot(r2)) > 1e-9)
    throw StructuralError("surface normal must be orthogonal to the borders");
  for (const Vec3& v : vertices)
    if (std::abs(unit_normal.dot(v - vertices[0])) > 1e-9) throw StructuralError("surface vertices not coplanar");
  // parallelogram: V3 - V4 == V2 - V1
  if (((vertices[2] - vertices[3]) - r1).norm() > 1e-7)
    throw StructuralError("surface must be a parallelogram (V3-V4 == V2-V1)");
}

SurfaceHalfplanes surface_to_halfplanes(const ContactSurface& surface) {
  SurfaceHalfplanes hp;
  hp.d = surface.unit_normal;
  hp.e = hp.d.dot(surface.vertices[0]);
  for (int i = 0; i < 4; ++i) {
    const Vec3& a = surface.vertices[i];
    const Vec3& b = surface.vertices[(i + 1) % 4];
    // inward edge normal within the plane, written as outward row: n_out.p <= n_out.a
    const Vec3 edge = b - a;
    const Vec3 outward = edge.cross(surface.unit_normal).normalized();
    hp.S.row(i) = outward.transpose();
    hp.s(i) = outward.dot(a);
  }
  return hp;
}

Vec3 on_surface_point(const ContactSurface& surface, double alpha1, double alpha2) {
  if (!(alpha1 >= 0.0 && alpha1 <= 1.0 && alpha2 >= 0.0 && alpha2 <= 1.0))
    throw std::out_of_range("on_surface_point: alpha outside [0,1]");
  return surface.vertices[0] + alpha1 * surface.border1() + alpha2 * surface.border2();
}

Eigen::Vector2d surface_alphas(const ContactSurface& surface, const Vec3& point) {
  const Vec3 r1 = surface.border1();
  const Vec3 r2 = surface.border2();
  const Vec3 rhs = point - surface.vertices[0];
  Eigen::Matrix2d gram;
  gram << r1.dot(r1), r1.dot(r2), r1.dot(r2), r2.dot(r2);
  const Eigen::Vector2d b(r1.dot(rhs), r2.dot(rhs));
  return gram.ldlt().solve(b);
}

SurfaceDistance surface_distance(const ContactSurface& surface, const Vec3& point) {
  const SurfaceHalfplanes hp = surface_to_halfplanes(surface);
  SurfaceDistance d;
  d.plane = hp.d.dot(point) - hp.e;
  d.boundary = (hp.S * point - hp.s).maxCoeff();
  return d;
}

const ContactSurface& Terrain::surface(int idx) const {
  if (idx < 0 || idx >= static_cast<int>(surfaces.size()))
    throw StructuralError("terrain surface index " + std::to_string(idx) + " out of range");
  return surfaces[idx];
}

void Terrain::validate() const {
  const auto check = [&](int idx) {
    if (idx < 0 || idx >= static_cast<int>(surfaces.size()))
      throw StructuralError("terrain references invalid surface index " + std::to_string(idx));
  };
  check(start_surfaces.first);
  check(start_surfaces.second);
  for (int idx : step_sequence) check(idx);
  for (const ContactSurface& s : surfaces) s.validate();
}

Mat3 surface_rotation(const ContactSurface& surface, bool* used_y_fallback) {
  const Vec3 z = surface.unit_normal;
  Vec3 x_proj = Vec3::UnitX() - z.x() * z;
  bool fallback = false;
  if (x_proj.norm() < 1e-9) {
    x_proj = Vec3::UnitY() - z.y() * z;
    fallback = true;
  }
  if (used_y_fallback) *used_y_fallback = fallback;
  const Vec3 x = x_proj.normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

RigidTransform contact_foot_frame(const Footstep& stance_foot, const ContactSurface& stance_surface,
                                  bool* used_y_fallback) {
  RigidTransform t;
  t.rotation = surface_rotation(stance_surface, used_y_fallback);
  t.translation = stance_foot.position;
  return t;
}

RigidTransform surface_anchored_frame(const ContactSurface& surface, const Vec3& origin) {
  const Vec3 x = surface.border1().normalized();
  const Vec3 z = surface.unit_normal;
  const Vec3 y = z.cross(x);
  RigidTransform t;
  t.rotation.col(0) = x;
  t.rotation.col(1) = y;
  t.rotation.col(2) = z;
  t.translation = origin;
  return t;
}

KinematicPolytope KinematicPolytope::box(const Vec3& lower, const Vec3& upper) {
  KinematicPolytope p;
  p.rows.resize(6, 3);
  p.offsets.resize(6);
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 r = Vec3::Zero();
    r(axis) = 1.0;
    p.rows.row(2 * axis) = r.transpose();
    p.offsets(2 * axis) = upper(axis);
    p.rows.row(2 * axis + 1) = -r.transpose();
    p.offsets(2 * axis + 1) = -lower(axis);
  }
  return p;
}

bool KinematicPolytope::contains(const Vec3& p, double tol) const {
  return max_violation(p) <= tol;
}

double KinematicPolytope::max_violation(const Vec3& p) const {
  return (rows * p - offsets).maxCoeff();
}

void KinematicPolytope::validate(double box_half_width) const {
  if (rows.rows() != offsets.size()) throw StructuralError("polytope rows/offsets size mismatch");
  // nonempty: coarse grid over the bounding box
  bool found = false;
  const int n = 17;
  for (int i = 0; i < n && !found; ++i)
    for (int j = 0; j < n && !found; ++j)
      for (int k = 0; k < n && !found; ++k) {
        const Vec3 p(-box_half_width + 2 * box_half_width * i / (n - 1),
                     -box_half_width + 2 * box_half_width * j / (n - 1),
                     -box_half_width + 2 * box_half_width * k / (n - 1));
        if (contains(p, 1e-9)) found = true;
      }
  if (!found) throw StructuralError("polytope appears empty over the probe box");
  // bounded: every probe direction must be blocked by some row
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Vec3 d = Vec3(i, j, k).normalized();
        if ((rows * d).maxCoeff() < 1e-9)
          throw StructuralError("polytope is unbounded along a probe direction");
      }
}

const char* to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::PreSwing: return "pre_swing";
    case PhaseKind::Swing: return "swing";
    case PhaseKind::PostLanding: return "post_landing";
  }
  return "?";
}

std::array<Vec3, 4> FootGeometry::local_corners() const {
  return {Vec3(half_length, half_width, 0.0), Vec3(half_length, -half_width, 0.0),
          Vec3(-half_length, -half_width, 0.0), Vec3(-half_length, half_width, 0.0)};
}

void PhaseSpec::validate() const {
  if (knot_count < 1) throw StructuralError("phase knot count must be >= 1");
  const auto feet = active_feet.size();
  if (kind == PhaseKind::Swing) {
    if (feet != 1) throw StructuralError("swing phase must have exactly one active foot");
  } else {
    if (feet != 2) throw StructuralError("double-support phase must have both feet active");
  }
}

}  // namespace stride
