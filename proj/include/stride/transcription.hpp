#pragma once

#include "stride/problem.hpp"

#include <array>
#include <optional>
#include <vector>

namespace stride {

struct RobotModel {
  double mass = 95.0;             // kg
  Vec3 gravity{0.0, 0.0, 9.81};   // subtracted in the velocity update
  FootGeometry foot;
  double nominal_com_height = 0.78;  // m, above the stance feet
};

/// Kinematic polytopes as configuration: axis-aligned boxes in the contact
/// frame. The reachability box is written for a left-foot swing (positive
/// lateral offset toward the swing side) and mirrored for the right foot.
struct KinematicConfig {
  Vec3 com_lower{-0.25, -0.30, 0.60};
  Vec3 com_upper{0.25, 0.30, 0.95};
  Vec3 reach_lower{-0.40, 0.15, -0.30};
  Vec3 reach_upper{0.40, 0.35, 0.30};

  KinematicPolytope com_polytope() const;
  KinematicPolytope reach_polytope(Foot swing_foot) const;
};

struct HorizonSpec {
  int steps = 1;
  int knots_per_phase = 8;
  double t_max = 0.0;  // <= 0 picks 1.2 s per step
  Foot swing_first = Foot::Left;
  std::vector<PhaseSpec> phases;

  static HorizonSpec make(int steps, Foot swing_first = Foot::Left, int knots_per_phase = 8,
                          double t_max = 0.0);
  double effective_t_max() const { return t_max > 0.0 ? t_max : 1.2 * steps; }
  void validate() const;
};

struct TranscriptionOptions {
  RobotModel robot;
  KinematicConfig kinematics;
  double accel_weight = 1.0;
  double momentum_weight = 1.0;
  double psi_weight = 1e-2;          // relative to the acceleration term
  double terminal_weight = 1.0;
  double min_knot_duration = 0.005;  // s; phase duration >= N_k * this
  double force_bound_factor = 3.0;   // per-component force bound, multiples of m*|g|
};

/// Per-cycle inputs: current state, goal, current foot placements and the
/// surface assigned to each horizon step.
struct HorizonContext {
  CentroidalState x_init;
  CentroidalState x_goal;
  Footstep left;
  Footstep right;
  std::vector<int> step_surfaces;
  Foot swing_first = Foot::Left;
};

/// Fidelity/timing choice for one horizon step.
struct StepModel {
  Fidelity fidelity = Fidelity::Full;
  bool fixed_timing = false;
  std::array<double, 3> phase_durations{};  // seconds per phase when fixed
};

/// Oracle guidance for the short-horizon problem: terminal targets replace
/// the goal cost and phase timings are boxed to (1 +/- epsilon) * t_tilde.
struct LgGuidance {
  CentroidalState x_star;
  Vec3 p_star = Vec3::Zero();
  std::array<double, 3> t_tilde{};
  double epsilon = 0.15;
};

/// Places both feet at the centers of the terrain start surfaces.
std::pair<Footstep, Footstep> initial_footsteps(const Terrain& terrain);

/// Full-model transcription over the whole horizon with free timings (Eq. 8
/// style baseline). Horizon steps must all have a surface in the terrain's
/// step sequence.
TranscribedProblem build_baseline(const HorizonSpec& horizon, const Terrain& terrain,
                                  const CentroidalState& x_init, const CentroidalState& x_goal,
                                  const TranscriptionOptions& options = {});

/// General entry point used by the planners: per-step fidelity and timing,
/// optional oracle guidance (short-horizon problems only).
TranscribedProblem build_horizon_problem(const HorizonSpec& horizon, const Terrain& terrain,
                                         const HorizonContext& context, const std::vector<StepModel>& models,
                                         const TranscriptionOptions& options,
                                         const LgGuidance* guidance = nullptr);

// ---------------------------------------------------------------------------
// Plans

struct MotionPlan {
  std::vector<PhaseStructure> phases;       // structure snapshot (contacts, specs)
  std::vector<std::vector<Vec9>> states;    // per phase: N_k+1 knots, relaxed phases padded with L=0
  std::vector<std::vector<std::vector<Vec3>>> forces;  // [phase][interval knot][contact]
  std::vector<Vec3> footsteps;              // per horizon step
  std::vector<double> switch_times;         // t^1..t^{N_ph}
  std::vector<double> tau;                  // per phase
  double t_max = 0.0;

  int phase_count() const { return static_cast<int>(phases.size()); }
  double duration() const { return switch_times.empty() ? 0.0 : switch_times.back(); }
  CentroidalState terminal_state() const;
  /// World position of a contact, substituting optimized footsteps.
  Vec3 contact_position(int phase, int contact) const;
  void validate() const;
};

MotionPlan extract_plan(const TranscribedProblem& problem, std::span<const double> solution);

/// First `steps*3` phases of a plan (the execution horizon is one step).
MotionPlan plan_prefix(const MotionPlan& plan, int steps);

/// Default cold-start guess: CoM interpolated from x_init toward a point
/// above the final step surface, uniform timings, gravity split equally over
/// the active contacts, footsteps at patch centers, psi at tight bounds.
std::vector<double> default_initial_guess(const TranscribedProblem& problem, const Terrain& terrain,
                                          const HorizonContext& context, const TranscriptionOptions& options);

/// Warm start for the next cycle: shift the previous solution one step
/// forward and pad the tail with the default guess.
std::vector<double> shifted_warm_start(const TranscribedProblem& next_problem, const MotionPlan& previous,
                                       const Terrain& terrain, const HorizonContext& next_context,
                                       const TranscriptionOptions& options);

/// Maps a plan with the same phase layout onto a problem's decision vector:
/// states truncate to the knot dimension, forces re-split between foot
/// models, psi auxiliaries sit at their tight lower bounds. This is the
/// projection used by the outer-approximation checks.
std::vector<double> encode_plan(const TranscribedProblem& problem, const MotionPlan& plan);

// ---------------------------------------------------------------------------
// Dynamics and validation

/// One forward-Euler step of the centroidal dynamics.
CentroidalState dynamics_step(const CentroidalState& x, const std::vector<Vec3>& forces,
                              const std::vector<Vec3>& contact_points, double tau, double mass,
                              const Vec3& gravity);

struct ResidualReport {
  double dynamics = 0.0;
  double friction = 0.0;
  double polytope = 0.0;  // CoM boxes and step reachability
  double surface = 0.0;
  double timing = 0.0;

  double max() const;
};

/// Infinity-norm residuals of every constraint family, evaluated directly
/// from a plan (independent of the transcription's expression graph).
ResidualReport evaluate_residuals(const MotionPlan& plan, const Terrain& terrain, double mass,
                                  const Vec3& gravity, const KinematicConfig& kinematics = {},
                                  double min_knot_duration = 0.005);

// ---------------------------------------------------------------------------
// Swing interpolation (not part of the NLP; used for export)

/// Piecewise-cubic swing trajectory: smooth-step interpolation in the plane,
/// two Hermite arcs in z through an apex `clearance` above the higher
/// endpoint, zero endpoint velocities.
class SwingSpline {
 public:
  SwingSpline(const Vec3& p_from, const Vec3& p_to, double clearance, double duration);

  Vec3 position(double t) const;
  std::vector<Vec3> sample(int count) const;
  double duration() const { return duration_; }
  double apex_height() const { return apex_z_; }

 private:
  Vec3 from_, to_;
  double duration_ = 0.0;
  double apex_z_ = 0.0;
};

SwingSpline swing_spline(const Vec3& p_from, const Vec3& p_to, double clearance, double duration);

}  // namespace stride
