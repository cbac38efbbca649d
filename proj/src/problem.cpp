#include "stride/problem.hpp"

#include <algorithm>
#include <cmath>

namespace stride {

const char* to_string(ConvexityTag t) {
  switch (t) {
    case ConvexityTag::Affine: return "affine";
    case ConvexityTag::ConvexQuadratic: return "convex_quadratic";
    case ConvexityTag::Nonconvex: return "nonconvex";
  }
  return "?";
}

const char* to_string(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::InitialState: return "initial_state";
    case ConstraintFamily::Dynamics: return "dynamics";
    case ConstraintFamily::Timing: return "timing";
    case ConstraintFamily::SurfacePlane: return "surface_plane";
    case ConstraintFamily::SurfaceBounds: return "surface_bounds";
    case ConstraintFamily::Reachability: return "reachability";
    case ConstraintFamily::ComPolytope: return "com_polytope";
    case ConstraintFamily::FrictionCone: return "friction_cone";
    case ConstraintFamily::TrustRegion: return "trust_region";
  }
  return "?";
}

const char* to_string(Fidelity f) {
  switch (f) {
    case Fidelity::Full: return "full";
    case Fidelity::ComOnly: return "com_only";
    case Fidelity::PontonRectangular: return "ponton_rectangular";
    case Fidelity::PontonPoint: return "ponton_point";
  }
  return "?";
}

void TranscribedProblem::weighted_gradient(const EvalBuffer& buf, double cost_weight,
                                           std::span<const double> eq_weights,
                                           std::span<const double> ineq_weights, std::span<double> grad,
                                           std::vector<double>& adjoint_scratch) const {
  adjoint_scratch.assign(pool.size(), 0.0);
  if (cost_weight != 0.0) adjoint_scratch[cost_root] += cost_weight;
  for (std::size_t i = 0; i < equalities.size(); ++i)
    if (eq_weights[i] != 0.0) adjoint_scratch[equalities[i].root] += eq_weights[i];
  for (std::size_t i = 0; i < inequalities.size(); ++i)
    if (ineq_weights[i] != 0.0) adjoint_scratch[inequalities[i].root] += ineq_weights[i];
  pool.reverse(buf.values, adjoint_scratch, grad);
}

double TranscribedProblem::max_equality_violation(const EvalBuffer& buf) const {
  double v = 0.0;
  for (const ConstraintRow& row : equalities) v = std::max(v, std::abs(buf.values[row.root]));
  return v;
}

double TranscribedProblem::max_inequality_violation(const EvalBuffer& buf) const {
  double v = 0.0;
  for (const ConstraintRow& row : inequalities) v = std::max(v, buf.values[row.root]);
  return v;
}

double TranscribedProblem::max_violation(const EvalBuffer& buf) const {
  return std::max(max_equality_violation(buf), max_inequality_violation(buf));
}

void TranscribedProblem::validate() const {
  if (lower.size() != num_vars || upper.size() != num_vars)
    throw StructuralError("bound vectors do not match the decision-vector length");
  if (pool.num_vars() > num_vars) throw StructuralError("expression graph references variables beyond the layout");

  // named slices: disjoint, covering
  std::vector<NamedSlice> sorted = layout;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.offset < b.offset; });
  int cursor = 0;
  for (const NamedSlice& s : sorted) {
    if (s.offset != cursor) throw StructuralError("layout slice '" + s.name + "' leaves a gap or overlaps");
    cursor += s.length;
  }
  if (cursor != num_vars) throw StructuralError("layout slices do not cover the decision vector");

  const auto check_rows = [&](const std::vector<ConstraintRow>& rows) {
    for (const ConstraintRow& row : rows) {
      if (row.root < 0 || row.root >= pool.size()) throw StructuralError("constraint row with invalid root");
      const int deg = pool.polynomial_degree(row.root);
      if (row.tag == ConvexityTag::Affine && deg > 1)
        throw StructuralError("row tagged affine has polynomial degree > 1");
      if (row.tag == ConvexityTag::ConvexQuadratic && deg > 2)
        throw StructuralError("row tagged convex-quadratic has polynomial degree > 2");
    }
  };
  check_rows(equalities);
  check_rows(inequalities);

  for (int i = 0; i < num_vars; ++i)
    if (lower(i) > upper(i)) throw StructuralError("variable bound with lower > upper");
}

}  // namespace stride
