#pragma once

#include "stride/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stride {

struct SolveOptions {
  double feasibility_tolerance = 1e-5;
  double optimality_tolerance = 1e-4;
  int max_iterations = 300;  // outer augmented-Lagrangian iterations
  double max_wall_time = 0.0;  // seconds; <= 0 means unlimited
  std::optional<std::vector<double>> warm_start;

  int inner_max_iterations = 60;   // Newton steps per outer iteration
  int cg_max_iterations = 150;     // Hessian-vector products per Newton step
  double initial_penalty = 10.0;
  double max_penalty = 1e10;
  std::ostream* iteration_log = nullptr;  // CSV: iteration,objective,feasibility,optimality

  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, Infeasible, TimedOut };
const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  std::vector<double> solution;
  double objective = kInfinity;
  // infinity norm of the projected Lagrangian gradient in the solver's
  // scaled space, normalized by max(1, |multipliers|_inf)
  double kkt_residual = kInfinity;
  double constraint_violation = kInfinity;
  double wall_time = 0.0;  // seconds, the solve call only
  int iterations = 0;      // total inner iterations
  std::uint64_t work_units = 0;  // deterministic effort proxy (expression-node visits)
  std::string diagnostic;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// Local solve of a transcribed problem. Augmented-Lagrangian outer loop
/// (PHR for inequalities) with a bound-projected L-BFGS inner solver.
/// Deterministic: identical problem, options and warm start produce the
/// identical iterate sequence.
SolveResult solve(const TranscribedProblem& problem, const SolveOptions& options = {});

}  // namespace stride
