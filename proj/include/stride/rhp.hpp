#pragma once

#include "stride/relaxations.hpp"
#include "stride/solver.hpp"
#include "stride/transcription.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stride {

enum class PlannerMode { BaselineFullModel, MultiFidelity, LocallyGuided };
const char* to_string(PlannerMode m);

enum class BudgetPolicy { EhDuration, Unlimited };
enum class TimeSource { WallClock, WorkUnits };

/// Everything a cycle needs to plan one step: state, current foot placements,
/// position in the step sequence.
struct CycleSituation {
  CentroidalState x_start;
  Footstep left;
  Footstep right;
  Foot swing_foot = Foot::Left;
  int cursor = 0;  // index of the next step in terrain.step_sequence
  Vec3 goal_com = Vec3::Zero();

  const Footstep& stance() const { return swing_foot == Foot::Left ? right : left; }
  const Footstep& swing() const { return swing_foot == Foot::Left ? left : right; }
};

/// Predicts oracle guidance (world frame) for a cycle; installed by the
/// locally-guided planner.
using LgPredictor = std::function<LgGuidance(const CycleSituation&, const Terrain&)>;

using SolveFn = std::function<SolveResult(const TranscribedProblem&, const SolveOptions&)>;

struct RhpConfig {
  PlannerMode mode = PlannerMode::BaselineFullModel;
  RelaxationKind relaxation = RelaxationKind::PontonPoint;  // MultiFidelity only
  int ph_steps = 1;   // prediction-horizon steps; the execution horizon is always one step
  int max_cycles = 28;
  BudgetPolicy budget_policy = BudgetPolicy::EhDuration;
  TimeSource time_source = TimeSource::WallClock;
  double work_unit_seconds = 5e-9;  // pseudo-time per expression-node visit
  int knots_per_phase = 8;
  SolveOptions solver;
  TranscriptionOptions transcription;
  LgPredictor lg_predictor;  // required in LocallyGuided mode
  double final_cycle_terminal_weight = 10.0;
  SolveFn solve_fn;  // test hook; defaults to stride::solve

  void validate() const;
};

enum class CycleOutcome { SuccessOnline, SuccessOffline, TimedOutButSolved, FailedToConverge };
const char* to_string(CycleOutcome o);

struct CycleRecord {
  int index = 0;
  CycleSituation situation;
  std::vector<int> surfaces_in_view;
  SolveResult solve;
  MotionPlan full_plan;  // whole-horizon solution (converged cycles)
  MotionPlan eh_plan;    // first step of full_plan: the executable slice
  double eh_duration = 0.0;
  std::optional<double> budget;  // absent: unlimited
  double solve_seconds = 0.0;    // per the configured time source
  CycleOutcome outcome = CycleOutcome::FailedToConverge;

  bool converged() const { return outcome != CycleOutcome::FailedToConverge; }
};

enum class EpisodeOutcome { SuccessOffline, SuccessOnline, TimeOut, FailToConverge };
const char* to_string(EpisodeOutcome o);

struct EpisodeRecord {
  std::string terrain_id;
  std::vector<CycleRecord> cycles;
  EpisodeOutcome outcome = EpisodeOutcome::FailToConverge;
  bool reached_goal = false;
  double mean_solve_time = 0.0;
  double std_solve_time = 0.0;
  double mean_budget = 0.0;  // over budgeted cycles
  int budgeted_cycles = 0;
};

/// Standing start above the terrain's start surfaces.
CentroidalState default_initial_state(const Terrain& terrain, const RobotModel& robot);

/// Goal: CoM centered above the final step surface at nominal height, zero
/// velocity and momentum.
CentroidalState goal_state(const Terrain& terrain, const RobotModel& robot);

CycleSituation initial_situation(const Terrain& terrain, const RobotModel& robot,
                                 Foot swing_first = Foot::Left);

/// Labels a cycle: converged & within budget -> SuccessOnline; converged with
/// no budget -> SuccessOffline; converged over budget -> TimedOutButSolved.
CycleOutcome classify_cycle(bool converged, double solve_seconds, const std::optional<double>& budget);

/// Plans one step: assembles EH [+ PH] per the mode, solves, classifies.
CycleRecord run_cycle(const RhpConfig& config, const Terrain& terrain, const CycleSituation& situation,
                      const std::optional<double>& budget, const MotionPlan* warm_plan);

/// Perfect-tracking handoff: the next cycle starts exactly at the EH terminal
/// state, the swing foot alternates and the cursor advances one surface.
/// Throws StructuralError when called on a failed cycle.
CycleSituation handoff(const CycleRecord& previous, const Terrain& terrain);

EpisodeRecord run_episode(const RhpConfig& config, const Terrain& terrain,
                          const std::string& terrain_id = "terrain");

/// Same loop from an arbitrary situation (used for recovery demonstrations).
EpisodeRecord run_episode_from(const RhpConfig& config, const Terrain& terrain, CycleSituation situation,
                               const std::string& terrain_id = "terrain");

EpisodeOutcome classify_episode(const std::vector<CycleRecord>& cycles, BudgetPolicy policy);

}  // namespace stride
