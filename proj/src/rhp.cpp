#include "stride/rhp.hpp"

#include <cmath>
#include <numeric>

namespace stride {

const char* to_string(PlannerMode m) {
  switch (m) {
    case PlannerMode::BaselineFullModel: return "baseline";
    case PlannerMode::MultiFidelity: return "multi_fidelity";
    case PlannerMode::LocallyGuided: return "locally_guided";
  }
  return "?";
}

const char* to_string(CycleOutcome o) {
  switch (o) {
    case CycleOutcome::SuccessOnline: return "success_online";
    case CycleOutcome::SuccessOffline: return "success_offline";
    case CycleOutcome::TimedOutButSolved: return "timed_out_but_solved";
    case CycleOutcome::FailedToConverge: return "failed_to_converge";
  }
  return "?";
}

const char* to_string(EpisodeOutcome o) {
  switch (o) {
    case EpisodeOutcome::SuccessOffline: return "success_offline";
    case EpisodeOutcome::SuccessOnline: return "success_online";
    case EpisodeOutcome::TimeOut: return "time_out";
    case EpisodeOutcome::FailToConverge: return "fail_to_converge";
  }
  return "?";
}

void RhpConfig::validate() const {
  if (ph_steps < 0) throw StructuralError("ph_steps must be >= 0");
  if (max_cycles < 1) throw StructuralError("max_cycles must be >= 1");
  if (mode == PlannerMode::LocallyGuided && !lg_predictor)
    throw StructuralError("locally-guided mode requires an oracle predictor");
}

CentroidalState default_initial_state(const Terrain& terrain, const RobotModel& robot) {
  const auto [left, right] = initial_footsteps(terrain);
  CentroidalState x;
  x.com = 0.5 * (left.position + right.position) + Vec3(0, 0, robot.nominal_com_height);
  return x;
}

CentroidalState goal_state(const Terrain& terrain, const RobotModel& robot) {
  if (terrain.step_sequence.empty()) throw StructuralError("terrain has no steps");
  CentroidalState x;
  x.com = terrain.surface(terrain.step_sequence.back()).center() + Vec3(0, 0, robot.nominal_com_height);
  return x;
}

CycleSituation initial_situation(const Terrain& terrain, const RobotModel& robot, Foot swing_first) {
  CycleSituation s;
  std::tie(s.left, s.right) = initial_footsteps(terrain);
  s.x_start = default_initial_state(terrain, robot);
  s.swing_foot = swing_first;
  s.cursor = 0;
  s.goal_com = goal_state(terrain, robot).com;
  return s;
}

CycleOutcome classify_cycle(bool converged, double solve_seconds, const std::optional<double>& budget) {
  if (!converged) return CycleOutcome::FailedToConverge;
  if (!budget) return CycleOutcome::SuccessOffline;
  return solve_seconds <= *budget ? CycleOutcome::SuccessOnline : CycleOutcome::TimedOutButSolved;
}

namespace {

constexpr std::array<double, 3> kDefaultStepDurations{0.25, 0.5, 0.25};

/// Fixed prediction-horizon phase durations: taken from the previous
/// solution shifted one step forward when warm data exists, otherwise the
/// default profile.
std::vector<std::array<double, 3>> ph_fixed_durations(int ph_steps, const MotionPlan* warm) {
  std::vector<std::array<double, 3>> out;
  if (warm && warm->phase_count() >= 3) {
    for (int i = 1; 3 * (i + 1) <= warm->phase_count() && static_cast<int>(out.size()) < ph_steps; ++i) {
      std::array<double, 3> durations{};
      bool ok = true;
      for (int r = 0; r < 3; ++r) {
        const int q = 3 * i + r;
        const double d = warm->switch_times[q] - (q > 0 ? warm->switch_times[q - 1] : 0.0);
        if (!(d > 0.02)) ok = false;
        durations[r] = d;
      }
      if (!ok) break;
      out.push_back(durations);
    }
  }
  while (static_cast<int>(out.size()) < ph_steps) out.push_back(kDefaultStepDurations);
  return out;
}

}  // namespace

CycleRecord run_cycle(const RhpConfig& config, const Terrain& terrain, const CycleSituation& situation,
                      const std::optional<double>& budget, const MotionPlan* warm_plan) {
  config.validate();
  CycleRecord rec;
  rec.situation = situation;
  rec.budget = budget;

  const int remaining = static_cast<int>(terrain.step_sequence.size()) - situation.cursor;
  if (remaining < 1) throw StructuralError("no steps remain at the terrain cursor");
  const int steps = config.mode == PlannerMode::LocallyGuided
                        ? 1
                        : std::min(1 + config.ph_steps, remaining);

  HorizonSpec horizon = HorizonSpec::make(steps, situation.swing_foot, config.knots_per_phase);

  HorizonContext ctx;
  ctx.x_init = situation.x_start;
  ctx.x_goal.com = situation.goal_com;
  ctx.left = situation.left;
  ctx.right = situation.right;
  ctx.swing_first = situation.swing_foot;
  for (int i = 0; i < steps; ++i) {
    const int s = terrain.step_sequence[situation.cursor + i];
    ctx.step_surfaces.push_back(s);
    rec.surfaces_in_view.push_back(s);
  }

  TranscriptionOptions options = config.transcription;
  if (remaining == 1) options.terminal_weight *= config.final_cycle_terminal_weight;

  TranscribedProblem problem;
  LgGuidance guidance;
  if (config.mode == PlannerMode::BaselineFullModel) {
    const std::vector<StepModel> models(steps, StepModel{});
    problem = build_horizon_problem(horizon, terrain, ctx, models, options);
  } else if (config.mode == PlannerMode::MultiFidelity) {
    if (steps == 1) {
      const std::vector<StepModel> models(1, StepModel{});
      problem = build_horizon_problem(horizon, terrain, ctx, models, options);
    } else {
      problem = build_multi_fidelity(horizon, terrain, ctx, config.relaxation,
                                     ph_fixed_durations(steps - 1, warm_plan), options);
    }
  } else {
    guidance = config.lg_predictor(situation, terrain);
    problem = build_horizon_problem(horizon, terrain, ctx, {StepModel{}}, options, &guidance);
  }

  SolveOptions solver_options = config.solver;
  std::vector<double> guess;
  if (config.mode != PlannerMode::LocallyGuided && warm_plan && warm_plan->phase_count() > 3) {
    guess = shifted_warm_start(problem, *warm_plan, terrain, ctx, options);
  } else {
    guess = default_initial_guess(problem, terrain, ctx, options);
    if (config.mode == PlannerMode::LocallyGuided) {
      // aim the cold start at the oracle targets
      const auto& st = problem.structure;
      for (int j = 0; j < 3; ++j) guess[st.footstep_offsets[0] + j] = guidance.p_star(j);
      for (int r = 0; r < 3; ++r) {
        const int dv = st.phases[r].duration_var;
        const double d = guidance.t_tilde[r] - (r > 0 ? guidance.t_tilde[r - 1] : 0.0);
        if (dv >= 0) guess[dv] = std::clamp(d, problem.lower(dv), problem.upper(dv));
      }
    }
  }
  solver_options.warm_start = std::move(guess);

  rec.solve = config.solve_fn ? config.solve_fn(problem, solver_options) : solve(problem, solver_options);
  rec.solve_seconds = config.time_source == TimeSource::WallClock
                          ? rec.solve.wall_time
                          : static_cast<double>(rec.solve.work_units) * config.work_unit_seconds;

  if (rec.solve.converged()) {
    rec.full_plan = extract_plan(problem, rec.solve.solution);
    rec.eh_plan = plan_prefix(rec.full_plan, 1);
    rec.eh_duration = rec.eh_plan.switch_times.back();
  }
  rec.outcome = classify_cycle(rec.solve.converged(), rec.solve_seconds, budget);
  return rec;
}

CycleSituation handoff(const CycleRecord& previous, const Terrain& terrain) {
  if (!previous.converged()) throw StructuralError("handoff from a failed cycle");
  CycleSituation next = previous.situation;
  next.x_start = previous.eh_plan.terminal_state();
  Footstep landed;
  landed.position = previous.eh_plan.footsteps.at(0);
  landed.surface_index = terrain.step_sequence.at(previous.situation.cursor);
  (previous.situation.swing_foot == Foot::Left ? next.left : next.right) = landed;
  next.swing_foot = other(previous.situation.swing_foot);
  next.cursor = previous.situation.cursor + 1;
  return next;
}

EpisodeOutcome classify_episode(const std::vector<CycleRecord>& cycles, BudgetPolicy policy) {
  bool any_failed = false;
  bool any_over_budget = false;
  for (const CycleRecord& c : cycles) {
    if (c.outcome == CycleOutcome::FailedToConverge) any_failed = true;
    if (c.outcome == CycleOutcome::TimedOutButSolved) any_over_budget = true;
  }
  if (any_failed) return EpisodeOutcome::FailToConverge;
  if (policy == BudgetPolicy::Unlimited) return EpisodeOutcome::SuccessOffline;
  return any_over_budget ? EpisodeOutcome::TimeOut : EpisodeOutcome::SuccessOnline;
}

EpisodeRecord run_episode(const RhpConfig& config, const Terrain& terrain, const std::string& terrain_id) {
  return run_episode_from(config, terrain, initial_situation(terrain, config.transcription.robot),
                          terrain_id);
}

EpisodeRecord run_episode_from(const RhpConfig& config, const Terrain& terrain, CycleSituation situation,
                               const std::string& terrain_id) {
  config.validate();
  terrain.validate();
  EpisodeRecord ep;
  ep.terrain_id = terrain_id;

  std::optional<double> budget;  // cycle 1: unlimited
  MotionPlan warm;
  bool have_warm = false;

  const int total_steps = static_cast<int>(terrain.step_sequence.size());
  int index = 0;
  while (situation.cursor < total_steps && index < config.max_cycles) {
    CycleRecord rec = run_cycle(config, terrain, situation, budget, have_warm ? &warm : nullptr);
    rec.index = index++;
    const bool ok = rec.converged();
    ep.cycles.push_back(rec);
    if (!ok) break;
    if (config.budget_policy == BudgetPolicy::EhDuration) budget = rec.eh_duration;
    warm = ep.cycles.back().full_plan;
    have_warm = true;
    situation = handoff(ep.cycles.back(), terrain);
  }
  ep.reached_goal = situation.cursor >= total_steps;
  ep.outcome = classify_episode(ep.cycles, config.budget_policy);

  double sum = 0.0, sum2 = 0.0, budget_sum = 0.0;
  for (const CycleRecord& c : ep.cycles) {
    sum += c.solve_seconds;
    sum2 += c.solve_seconds * c.solve_seconds;
    if (c.budget) {
      budget_sum += *c.budget;
      ++ep.budgeted_cycles;
    }
  }
  const double n = std::max<std::size_t>(ep.cycles.size(), 1);
  ep.mean_solve_time = sum / n;
  ep.std_solve_time = std::sqrt(std::max(0.0, sum2 / n - ep.mean_solve_time * ep.mean_solve_time));
  ep.mean_budget = ep.budgeted_cycles > 0 ? budget_sum / ep.budgeted_cycles : 0.0;
  return ep;
}

}  // namespace stride
