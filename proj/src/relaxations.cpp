#include "stride/relaxations.hpp"

#include <sstream>

namespace stride {

const char* to_string(RelaxationKind k) {
  switch (k) {
    case RelaxationKind::ComOnly: return "com_only";
    case RelaxationKind::PontonRectangular: return "ponton_rectangular";
    case RelaxationKind::PontonPoint: return "ponton_point";
  }
  return "?";
}

RelaxationKind relaxation_from_string(const std::string& name) {
  if (name == "com_only") return RelaxationKind::ComOnly;
  if (name == "ponton_rectangular") return RelaxationKind::PontonRectangular;
  if (name == "ponton_point") return RelaxationKind::PontonPoint;
  throw StructuralError("unknown relaxation kind: " + name);
}

Fidelity fidelity_of(RelaxationKind k) {
  switch (k) {
    case RelaxationKind::ComOnly: return Fidelity::ComOnly;
    case RelaxationKind::PontonRectangular: return Fidelity::PontonRectangular;
    case RelaxationKind::PontonPoint: return Fidelity::PontonPoint;
  }
  return Fidelity::ComOnly;
}

TightPsi tight_psi(double alpha, double beta) {
  return {(alpha + beta) * (alpha + beta), (alpha - beta) * (alpha - beta)};
}

double bilinear_from_psi(double psi_plus, double psi_minus) { return 0.25 * (psi_plus - psi_minus); }

Expr relax_bilinear(TranscribedProblem& problem, Expr alpha, Expr beta, int psi_plus_var, int psi_minus_var,
                    int phase, int knot) {
  auto& pool = problem.pool;
  const Expr psi_p = pool.var(psi_plus_var);
  const Expr psi_m = pool.var(psi_minus_var);
  problem.inequalities.push_back({(square(alpha + beta) - psi_p).id(), ConvexityTag::ConvexQuadratic,
                                  ConstraintFamily::TrustRegion, static_cast<std::int16_t>(phase),
                                  static_cast<std::int16_t>(knot)});
  problem.inequalities.push_back({(square(alpha - beta) - psi_m).id(), ConvexityTag::ConvexQuadratic,
                                  ConstraintFamily::TrustRegion, static_cast<std::int16_t>(phase),
                                  static_cast<std::int16_t>(knot)});
  return pool.scale(0.25, psi_p - psi_m);
}

TranscribedProblem build_prediction_horizon(RelaxationKind kind, const HorizonSpec& tail,
                                            const Terrain& terrain, const HorizonContext& context,
                                            const std::vector<double>& tau_per_phase,
                                            const TranscriptionOptions& options) {
  const int n_ph = 3 * tail.steps;
  if (static_cast<int>(tau_per_phase.size()) != n_ph)
    throw StructuralError("one tau value is required per prediction-horizon phase");
  std::vector<StepModel> models;
  for (int i = 0; i < tail.steps; ++i) {
    StepModel m;
    m.fidelity = fidelity_of(kind);
    m.fixed_timing = true;
    for (int r = 0; r < 3; ++r) {
      const double tau = tau_per_phase[3 * i + r];
      if (!(tau > 0.0)) throw StructuralError("fixed phase timings must be positive");
      m.phase_durations[r] = tau * tail.knots_per_phase;
    }
    models.push_back(m);
  }
  return build_horizon_problem(tail, terrain, context, models, options);
}

TranscribedProblem build_multi_fidelity(const HorizonSpec& horizon, const Terrain& terrain,
                                        const HorizonContext& context, RelaxationKind kind,
                                        const std::vector<std::array<double, 3>>& ph_phase_durations,
                                        const TranscriptionOptions& options) {
  if (static_cast<int>(ph_phase_durations.size()) != horizon.steps - 1)
    throw StructuralError("fixed phase durations required for every prediction-horizon step");
  std::vector<StepModel> models;
  models.push_back(StepModel{Fidelity::Full, false, {}});
  for (int i = 1; i < horizon.steps; ++i)
    models.push_back(StepModel{fidelity_of(kind), true, ph_phase_durations[i - 1]});
  return build_horizon_problem(horizon, terrain, context, models, options);
}

ComplexityReport model_complexity(std::optional<RelaxationKind> kind) {
  ComplexityReport r;
  const int feet = 2;
  const int polytope_rows = 6 * feet;
  if (!kind) {
    const int contacts = 4 * feet;
    r.model = "centroidal_dynamics";
    r.decision_variables = 9 + 3 * contacts;
    r.nonconvex_constraints = 9;  // forward-Euler rows: timing and lever-force products
    r.convex_constraints = 4 * contacts + polytope_rows;
    return r;
  }
  const bool point = *kind == RelaxationKind::PontonPoint;
  const int contacts = point ? feet : 4 * feet;
  const int cells =
      (*kind == RelaxationKind::ComOnly) ? 0 : contacts * 3 * 2;  // 2 bilinears per moment component
  r.model = to_string(*kind);
  r.decision_variables = 6 + 3 * contacts + cells;
  r.nonconvex_constraints = 0;
  r.convex_constraints = 6 + 4 * contacts + polytope_rows + 2 * cells;
  return r;
}

std::string complexity_csv() {
  std::ostringstream out;
  out << "model,decision_variables,nonconvex_constraints,convex_constraints\n";
  const auto row = [&](const ComplexityReport& r) {
    out << r.model << "," << r.decision_variables << "," << r.nonconvex_constraints << ","
        << r.convex_constraints << "\n";
  };
  row(model_complexity(std::nullopt));
  row(model_complexity(RelaxationKind::ComOnly));
  row(model_complexity(RelaxationKind::PontonRectangular));
  row(model_complexity(RelaxationKind::PontonPoint));
  return out.str();
}

}  // namespace stride
