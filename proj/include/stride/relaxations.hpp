#pragma once

#include "stride/transcription.hpp"

#include <optional>
#include <string>

namespace stride {

enum class RelaxationKind { ComOnly, PontonRectangular, PontonPoint };
const char* to_string(RelaxationKind k);
RelaxationKind relaxation_from_string(const std::string& name);
Fidelity fidelity_of(RelaxationKind k);

// ---------------------------------------------------------------------------
// Bilinear relaxation primitive: alpha*beta = 0.25*(psi+ - psi-) with
// psi+ >= (alpha+beta)^2 and psi- >= (alpha-beta)^2.

struct TightPsi {
  double plus = 0.0;
  double minus = 0.0;
};

/// psi values at their lower bounds; reconstructs alpha*beta exactly.
TightPsi tight_psi(double alpha, double beta);

/// Product recovered from psi values: 0.25*(psi+ - psi-).
double bilinear_from_psi(double psi_plus, double psi_minus);

/// Emits the two convex trust rows into `problem` for the given psi
/// variables and returns the product expression 0.25*(psi+ - psi-).
Expr relax_bilinear(TranscribedProblem& problem, Expr alpha, Expr beta, int psi_plus_var, int psi_minus_var,
                    int phase = -1, int knot = -1);

// ---------------------------------------------------------------------------
// Prediction-horizon builders

/// Standalone convex prediction-horizon fragment: the boundary state (c, cdot
/// of the execution-horizon terminal knot) enters as a fixed initial state,
/// phase timings are fixed to `tau_per_phase` (seconds per knot, one entry
/// per tail phase).
TranscribedProblem build_prediction_horizon(RelaxationKind kind, const HorizonSpec& tail,
                                            const Terrain& terrain, const HorizonContext& context,
                                            const std::vector<double>& tau_per_phase,
                                            const TranscriptionOptions& options = {});

/// Full multi-fidelity cycle problem: step 1 (the execution horizon) uses the
/// full centroidal model with free timings, the remaining steps use the
/// relaxed model with the given fixed absolute phase end times.
TranscribedProblem build_multi_fidelity(const HorizonSpec& horizon, const Terrain& terrain,
                                        const HorizonContext& context, RelaxationKind kind,
                                        const std::vector<std::array<double, 3>>& ph_phase_durations,
                                        const TranscriptionOptions& options = {});

// ---------------------------------------------------------------------------
// Knot-wise model complexity

// Counting convention (documented here once; the tests hand-enumerate it):
// one double-support knot, two feet, rectangular feet modeled as 4 contact
// points and point feet as 1. Decision variables = state dimension + force
// components + one slot per bilinear cell (a psi+/psi- pair). Constraints =
// forward-Euler rows + friction rows (4 per contact) + CoM polytope rows
// (6 per foot) + trust rows (2 per cell); rows containing products of
// decision variables count as non-convex.
struct ComplexityReport {
  std::string model;
  int decision_variables = 0;
  int nonconvex_constraints = 0;
  int convex_constraints = 0;
};

ComplexityReport model_complexity(std::optional<RelaxationKind> kind);

/// CSV table over the baseline and the three relaxations.
std::string complexity_csv();

}  // namespace stride
