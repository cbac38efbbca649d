#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stride {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;

/// Thrown when an input violates a structural contract (wrong dimensions,
/// missing surfaces, inconsistent layouts). Distinct from planning failures,
/// which are reported as results.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Centroidal state

/// CoM position, CoM velocity and angular momentum about the CoM.
struct CentroidalState {
  Vec3 com = Vec3::Zero();               // m
  Vec3 com_velocity = Vec3::Zero();      // m/s
  Vec3 angular_momentum = Vec3::Zero();  // kg m^2/s

  Vec9 flatten() const;
  static CentroidalState unflatten(const Vec9& v);
  bool all_finite() const;
};

// ---------------------------------------------------------------------------
// Contact surfaces and terrain

/// Planar parallelogram patch. Vertices are ordered counter-clockwise when
/// viewed along the outward normal; border1 = V2-V1, border2 = V4-V1.
struct ContactSurface {
  std::array<Vec3, 4> vertices{};
  Vec3 unit_normal = Vec3::UnitZ();
  double friction = 0.5;

  Vec3 border1() const { return vertices[1] - vertices[0]; }
  Vec3 border2() const { return vertices[3] - vertices[0]; }
  Vec3 center() const;

  /// Builds a surface from vertices, deriving the normal and validating the
  /// patch (coplanar to 1e-9, parallelogram, nonzero borders).
  static ContactSurface from_vertices(const std::array<Vec3, 4>& v, double mu = 0.5);

  /// Axis-aligned construction: center, in-plane axes scaled to half-extents.
  static ContactSurface from_center_axes(const Vec3& center, const Vec3& half_axis1,
                                         const Vec3& half_axis2, double mu = 0.5);

  void validate() const;
};

/// Plane equality d.p = e plus the four inward boundary inequalities S p <= s.
struct SurfaceHalfplanes {
  Vec3 d = Vec3::UnitZ();
  double e = 0.0;
  Eigen::Matrix<double, 4, 3> S;
  Eigen::Matrix<double, 4, 1> s;
};

SurfaceHalfplanes surface_to_halfplanes(const ContactSurface& surface);

/// Point at V1 + a1*border1 + a2*border2. Throws std::out_of_range for
/// alphas outside [0,1].
Vec3 on_surface_point(const ContactSurface& surface, double alpha1, double alpha2);

/// Inverse of on_surface_point for an (approximately) on-plane point.
Eigen::Vector2d surface_alphas(const ContactSurface& surface, const Vec3& point);

/// Signed distances of a point to a surface: plane offset and the largest
/// boundary-inequality violation (<= 0 means inside).
struct SurfaceDistance {
  double plane = 0.0;
  double boundary = 0.0;
};
SurfaceDistance surface_distance(const ContactSurface& surface, const Vec3& point);

struct Terrain {
  std::vector<ContactSurface> surfaces;
  std::pair<int, int> start_surfaces{0, 0};  // (left, right)
  std::vector<int> step_sequence;

  const ContactSurface& surface(int idx) const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// Frames

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 to_local(const Vec3& world) const { return rotation.transpose() * (world - translation); }
  Vec3 to_world(const Vec3& local) const { return rotation * local + translation; }
  Vec3 rotate_to_local(const Vec3& world_dir) const { return rotation.transpose() * world_dir; }
  Vec3 rotate_to_world(const Vec3& local_dir) const { return rotation * local_dir; }
};

struct Footstep {
  Vec3 position = Vec3::Zero();
  int surface_index = 0;
  double yaw = 0.0;  // fixed zero
};

/// Rotation aligning z with the surface normal and x with the projected world
/// x-axis (the zero-yaw footstep orientation). Falls back to the world y-axis
/// when the normal is within 1e-9 of the world x-axis; `used_y_fallback`
/// reports which branch was taken.
Mat3 surface_rotation(const ContactSurface& surface, bool* used_y_fallback = nullptr);

/// Frame at the stance foot oriented with its surface (zero-yaw convention).
RigidTransform contact_foot_frame(const Footstep& stance_foot, const ContactSurface& stance_surface,
                                  bool* used_y_fallback = nullptr);

/// Frame at `origin` whose tangent axes follow the surface borders rather
/// than the world axes. This is the normalization frame for oracle samples:
/// it co-rotates with the scene, so encodings are invariant under rigid
/// scene transforms.
RigidTransform surface_anchored_frame(const ContactSurface& surface, const Vec3& origin);

// ---------------------------------------------------------------------------
// Kinematic polytopes and phase structure

/// Convex polytope A x <= b in a local frame.
struct KinematicPolytope {
  Eigen::Matrix<double, Eigen::Dynamic, 3> rows;
  Eigen::VectorXd offsets;

  static KinematicPolytope box(const Vec3& lower, const Vec3& upper);

  int size() const { return static_cast<int>(offsets.size()); }
  bool contains(const Vec3& p, double tol = 0.0) const;
  double max_violation(const Vec3& p) const;

  /// Load-time sanity check: nonempty (grid search over a bounding box) and
  /// bounded (no sampled recession direction escapes all rows).
  void validate(double box_half_width = 2.0) const;
};

enum class Foot { Left, Right };
inline Foot other(Foot f) { return f == Foot::Left ? Foot::Right : Foot::Left; }
inline const char* to_string(Foot f) { return f == Foot::Left ? "L" : "R"; }

enum class PhaseKind { PreSwing, Swing, PostLanding };
const char* to_string(PhaseKind k);

/// Rectangular foot; contact points are the four corners in the foot frame.
struct FootGeometry {
  double half_length = 0.1;
  double half_width = 0.05;

  std::array<Vec3, 4> local_corners() const;
};

struct PhaseSpec {
  PhaseKind kind = PhaseKind::PreSwing;
  std::vector<Foot> active_feet;  // both feet for double support, one for swing
  int knot_count = 8;

  void validate() const;
};

}  // namespace stride
