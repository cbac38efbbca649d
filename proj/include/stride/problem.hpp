#pragma once

#include "stride/expr.hpp"
#include "stride/geometry.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace stride {

enum class ConvexityTag { Affine, ConvexQuadratic, Nonconvex };
const char* to_string(ConvexityTag t);

enum class ConstraintFamily {
  InitialState,
  Dynamics,
  Timing,
  SurfacePlane,
  SurfaceBounds,
  Reachability,
  ComPolytope,
  FrictionCone,
  TrustRegion,
};
const char* to_string(ConstraintFamily f);

struct ConstraintRow {
  std::int32_t root = -1;
  ConvexityTag tag = ConvexityTag::Affine;
  ConstraintFamily family = ConstraintFamily::Dynamics;
  std::int16_t phase = -1;  // emitting horizon phase, -1 for horizon-global rows
  std::int16_t knot = -1;
};

struct NamedSlice {
  std::string name;
  int offset = 0;
  int length = 0;
};

enum class Fidelity { Full, ComOnly, PontonRectangular, PontonPoint };
const char* to_string(Fidelity f);

/// One contact point of a phase. The world position is either a constant or
/// affine in a footstep decision variable (footstep center + fixed offset).
struct ContactDescriptor {
  Foot foot = Foot::Left;
  int corner = -1;  // 0..3 for rectangular feet, -1 for a point foot
  int surface = -1;
  bool is_constant = true;
  Vec3 position = Vec3::Zero();  // constant world position (offset included)
  int footstep = -1;             // step index when not constant
  Vec3 offset = Vec3::Zero();    // world offset added to the footstep variable
};

/// One psi+/psi- pair relaxing the bilinear product alpha*beta, where
/// alpha = (p_contact - com)[lever_axis] and beta = f[force_axis]; `sign` is
/// the coefficient of the product inside its cross-product component.
struct PsiCell {
  int psi_plus = -1;   // variable index
  int psi_minus = -1;  // variable index
  int contact = 0;
  int lever_axis = 0;
  int force_axis = 0;
  double sign = 1.0;
  int knot = 0;  // interval knot within the phase
};

struct PhaseStructure {
  PhaseSpec spec;
  Fidelity fidelity = Fidelity::Full;
  int step = -1;           // horizon step this phase belongs to
  int state_dim = 9;       // 9 full, 6 relaxed
  int first_knot = 0;      // global knot index of the phase's knot 0
  std::vector<ContactDescriptor> contacts;
  std::vector<int> control_offsets;  // per interval knot: first force variable
  std::vector<PsiCell> cells;        // Ponton phases only
  // Timing is parameterized by phase durations (switch times are their
  // cumulative sums), so monotonicity is a bound, not a constraint row.
  int duration_var = -1;  // -1 when the duration is fixed
  double duration_fixed = 0.0;
  int landing_surface = -1;  // surface of this step's footstep
};

struct KnotRef {
  int offset = 0;  // first variable of the knot
  int dim = 9;
};

/// Semantic index over the flat decision vector: global state knots, phases,
/// footsteps, timing variables. Built alongside the expression graph and used
/// for plan extraction, warm starts and diagnostics.
struct ProblemStructure {
  std::vector<KnotRef> state_knots;    // global knots 0..N_total
  std::vector<PhaseStructure> phases;  // phase q covers knots [first_knot, first_knot+N_k]
  std::vector<int> footstep_offsets;   // per horizon step; -1 when the step is not optimized
  std::vector<int> footstep_surfaces;  // terrain surface per horizon step
  double t_max = 0.0;
  double mass = 0.0;
  Vec3 gravity = Vec3::Zero();
  Foot swing_first = Foot::Left;
};

/// Sparse multi-phase NLP: expression-graph cost and constraint rows over a
/// flat decision vector with per-variable bounds. Immutable after building;
/// evaluation via external buffers is reentrant.
class TranscribedProblem {
 public:
  ExprPool pool;
  int num_vars = 0;
  std::vector<NamedSlice> layout;
  std::int32_t cost_root = -1;
  std::vector<ConstraintRow> equalities;    // h(x) == 0
  std::vector<ConstraintRow> inequalities;  // g(x) <= 0
  Eigen::VectorXd lower, upper;             // variable bounds
  ProblemStructure structure;

  struct EvalBuffer {
    std::vector<double> values;
    std::vector<double> adjoints;
  };

  void forward(std::span<const double> x, EvalBuffer& buf) const { pool.forward(x, buf.values); }
  double cost_value(const EvalBuffer& buf) const { return buf.values[cost_root]; }
  double row_value(const ConstraintRow& row, const EvalBuffer& buf) const { return buf.values[row.root]; }

  /// grad += cost_weight * grad(cost) + sum_i eq_w[i] * grad(eq_i)
  ///       + sum_j ineq_w[j] * grad(ineq_j), in one reverse sweep.
  void weighted_gradient(const EvalBuffer& buf, double cost_weight, std::span<const double> eq_weights,
                         std::span<const double> ineq_weights, std::span<double> grad,
                         std::vector<double>& adjoint_scratch) const;

  double max_equality_violation(const EvalBuffer& buf) const;
  double max_inequality_violation(const EvalBuffer& buf) const;
  double max_violation(const EvalBuffer& buf) const;

  /// Checks layout coverage, bound sizes and tag/degree consistency; throws
  /// StructuralError on violations.
  void validate() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace stride
