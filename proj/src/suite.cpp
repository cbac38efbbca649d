#include "stride/suite.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace stride {

using nlohmann::json;

std::uint64_t fnv1a_hash(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

RhpConfig ScenarioConfig::to_rhp_config(const OracleModel* oracle) const {
  RhpConfig c;
  c.mode = mode;
  c.relaxation = relaxation;
  c.ph_steps = ph_steps;
  c.max_cycles = max_cycles;
  c.budget_policy = budget_policy;
  c.time_source = time_source;
  c.knots_per_phase = knots_per_phase;
  c.solver = solver;
  c.transcription = transcription;
  if (mode == PlannerMode::LocallyGuided) {
    if (!oracle) throw StructuralError("scenario '" + name + "' needs an oracle model");
    c.lg_predictor = make_lg_predictor(*oracle, epsilon);
  }
  return c;
}

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

}  // namespace

MetricsRow aggregate_metrics(const ScenarioConfig& config, const std::vector<EpisodeRecord>& episodes) {
  MetricsRow row;
  row.config = config.name;
  row.mode = config.mode == PlannerMode::MultiFidelity
                 ? std::string("mf_") + to_string(config.relaxation)
                 : to_string(config.mode);
  row.ph_steps = config.mode == PlannerMode::LocallyGuided ? 0 : config.ph_steps;
  row.policy = config.budget_policy == BudgetPolicy::EhDuration ? "eh_duration" : "unlimited";
  row.episodes = static_cast<int>(episodes.size());

  int ep_online = 0, ep_timeout = 0, ep_fail = 0, ep_offline = 0;
  int cy_online = 0, cy_timeout = 0, cy_fail = 0, cy_converged = 0, cycles = 0;
  double s_sum = 0, s_sum2 = 0, b_sum = 0, b_sum2 = 0;
  int budgeted = 0;
  for (const EpisodeRecord& ep : episodes) {
    switch (ep.outcome) {
      case EpisodeOutcome::SuccessOnline:
        ++ep_online;
        ++ep_offline;
        break;
      case EpisodeOutcome::TimeOut:
        ++ep_timeout;
        ++ep_offline;
        break;
      case EpisodeOutcome::SuccessOffline:
        ++ep_offline;
        break;
      case EpisodeOutcome::FailToConverge: ++ep_fail; break;
    }
    for (const CycleRecord& c : ep.cycles) {
      ++cycles;
      s_sum += c.solve_seconds;
      s_sum2 += c.solve_seconds * c.solve_seconds;
      if (c.budget) {
        b_sum += *c.budget;
        b_sum2 += *c.budget * *c.budget;
        ++budgeted;
      }
      switch (c.outcome) {
        case CycleOutcome::SuccessOnline:
        case CycleOutcome::SuccessOffline:
          // unbudgeted converged cycles met every budget they were given
          ++cy_online;
          ++cy_converged;
          break;
        case CycleOutcome::TimedOutButSolved:
          ++cy_timeout;
          ++cy_converged;
          break;
        case CycleOutcome::FailedToConverge: ++cy_fail; break;
      }
    }
  }
  row.cycles = cycles;
  const double ne = std::max(row.episodes, 1);
  row.ep_success_offline = 100.0 * ep_offline / ne;
  row.ep_success_online = 100.0 * ep_online / ne;
  row.ep_time_out = 100.0 * ep_timeout / ne;
  row.ep_fail = 100.0 * ep_fail / ne;
  const double nc = std::max(cycles, 1);
  row.cy_success_offline = 100.0 * cy_converged / nc;
  row.cy_success_online = 100.0 * cy_online / nc;
  row.cy_time_out = 100.0 * cy_timeout / nc;
  row.cy_fail = 100.0 * cy_fail / nc;
  const double n_all = std::max(cycles, 1);
  row.solve_mean = s_sum / n_all;
  row.solve_std = std::sqrt(std::max(0.0, s_sum2 / n_all - row.solve_mean * row.solve_mean));
  if (budgeted > 0) {
    row.budget_mean = b_sum / budgeted;
    row.budget_std = std::sqrt(std::max(0.0, b_sum2 / budgeted - row.budget_mean * row.budget_mean));
  }
  return row;
}

std::string MetricsTable::to_csv() const {
  std::ostringstream out;
  out << "config,mode,ph_steps,policy,episodes,cycles,"
         "ep_success_offline,ep_success_online,ep_time_out,ep_fail_to_converge,"
         "cy_success_offline,cy_success_online,cy_time_out,cy_fail_to_converge,"
         "solve_time_mean_s,solve_time_std_s,budget_mean_s,budget_std_s\n";
  for (const MetricsRow& r : rows) {
    out << r.config << "," << r.mode << "," << r.ph_steps << "," << r.policy << "," << r.episodes << ","
        << r.cycles << "," << fmt(r.ep_success_offline) << "," << fmt(r.ep_success_online) << ","
        << fmt(r.ep_time_out) << "," << fmt(r.ep_fail) << "," << fmt(r.cy_success_offline) << ","
        << fmt(r.cy_success_online) << "," << fmt(r.cy_time_out) << "," << fmt(r.cy_fail) << ","
        << fmt(r.solve_mean, 9) << "," << fmt(r.solve_std, 9) << "," << fmt(r.budget_mean, 9) << ","
        << fmt(r.budget_std, 9) << "\n";
  }
  return out.str();
}

void MetricsTable::validate_partitions() const {
  for (const MetricsRow& r : rows) {
    if (r.episodes == 0) continue;
    const double ep_group = r.policy == "unlimited" ? r.ep_success_offline + r.ep_fail
                                                    : r.ep_success_online + r.ep_time_out + r.ep_fail;
    const double cy_group = r.cy_success_online + r.cy_time_out + r.cy_fail;
    if (std::abs(ep_group - 100.0) > 0.1 || std::abs(cy_group - 100.0) > 0.1)
      throw StructuralError("metrics taxonomy group does not sum to 100% for " + r.config);
  }
}

SuiteResult run_suite(const SuiteSpec& spec, const std::string& output_dir) {
  SuiteResult result;
  for (int t = 0; t < spec.terrain_count; ++t)
    result.terrains.push_back(
        generate_terrain(spec.terrain_class, spec.steps_per_terrain, spec.seed + t));

  std::vector<OracleModel> oracles(spec.configs.size());
  for (std::size_t c = 0; c < spec.configs.size(); ++c)
    if (spec.configs[c].mode == PlannerMode::LocallyGuided)
      oracles[c] = load_model(spec.configs[c].oracle_model_path);

  for (std::size_t c = 0; c < spec.configs.size(); ++c) {
    const ScenarioConfig& sc = spec.configs[c];
    const RhpConfig config = sc.to_rhp_config(&oracles[c]);
    std::vector<EpisodeRecord> eps;
    for (int t = 0; t < spec.terrain_count; ++t) {
      const std::string id = sc.name + "_t" + std::to_string(t);
      eps.push_back(run_episode(config, result.terrains[t], id));
    }
    result.table.rows.push_back(aggregate_metrics(sc, eps));
    result.episodes.push_back(std::move(eps));
  }

  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);
    std::ofstream csv(output_dir + "/metrics.csv");
    csv << result.table.to_csv();
    for (std::size_t c = 0; c < result.episodes.size(); ++c)
      for (const EpisodeRecord& ep : result.episodes[c])
        save_episode_log(ep, output_dir + "/" + ep.terrain_id + ".log.json");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Episode logs and replay

namespace {

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
Vec3 vec3_from(const json& a) { return Vec3(a[0], a[1], a[2]); }

json situation_json(const CycleSituation& s) {
  json j;
  j["x_start"] = json::array();
  const Vec9 x = s.x_start.flatten();
  for (int i = 0; i < 9; ++i) j["x_start"].push_back(x(i));
  j["left"] = {{"p", vec3_json(s.left.position)}, {"surface", s.left.surface_index}};
  j["right"] = {{"p", vec3_json(s.right.position)}, {"surface", s.right.surface_index}};
  j["swing"] = to_string(s.swing_foot);
  j["cursor"] = s.cursor;
  j["goal"] = vec3_json(s.goal_com);
  return j;
}

CycleSituation situation_from(const json& j) {
  CycleSituation s;
  Vec9 x;
  for (int i = 0; i < 9; ++i) x(i) = j.at("x_start")[i].get<double>();
  s.x_start = CentroidalState::unflatten(x);
  s.left.position = vec3_from(j.at("left").at("p"));
  s.left.surface_index = j.at("left").at("surface").get<int>();
  s.right.position = vec3_from(j.at("right").at("p"));
  s.right.surface_index = j.at("right").at("surface").get<int>();
  s.swing_foot = j.at("swing").get<std::string>() == "L" ? Foot::Left : Foot::Right;
  s.cursor = j.at("cursor").get<int>();
  s.goal_com = vec3_from(j.at("goal"));
  return s;
}

std::uint64_t situation_hash(const CycleSituation& s) {
  std::vector<double> blob;
  const Vec9 x = s.x_start.flatten();
  for (int i = 0; i < 9; ++i) blob.push_back(x(i));
  for (int i = 0; i < 3; ++i) blob.push_back(s.left.position(i));
  for (int i = 0; i < 3; ++i) blob.push_back(s.right.position(i));
  blob.push_back(s.cursor);
  blob.push_back(s.swing_foot == Foot::Left ? 1.0 : -1.0);
  return fnv1a_hash(blob.data(), blob.size() * sizeof(double));
}

}  // namespace

std::string episode_log_json(const EpisodeRecord& episode) {
  json j;
  j["schema_version"] = 1;
  j["terrain_id"] = episode.terrain_id;
  j["outcome"] = to_string(episode.outcome);
  j["reached_goal"] = episode.reached_goal;
  j["cycles"] = json::array();
  for (const CycleRecord& c : episode.cycles) {
    json jc;
    jc["index"] = c.index;
    jc["situation"] = situation_json(c.situation);
    jc["inputs_hash"] = situation_hash(c.situation);
    jc["surfaces_in_view"] = c.surfaces_in_view;
    jc["outcome"] = to_string(c.outcome);
    jc["status"] = to_string(c.solve.status);
    jc["objective"] = c.solve.objective;
    jc["kkt_residual"] = c.solve.kkt_residual;
    jc["violation"] = c.solve.constraint_violation;
    jc["iterations"] = c.solve.iterations;
    jc["wall_time"] = c.solve.wall_time;
    jc["work_units"] = c.solve.work_units;
    jc["solve_seconds"] = c.solve_seconds;
    if (c.budget) jc["budget"] = *c.budget;
    jc["eh_duration"] = c.eh_duration;
    j["cycles"].push_back(jc);
  }
  return j.dump(2);
}

void save_episode_log(const EpisodeRecord& episode, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write episode log: " + path);
  out << episode_log_json(episode) << "\n";
}

ReplayResult replay_episode_log(const RhpConfig& config, const Terrain& terrain,
                                const std::string& log_json) {
  ReplayResult result;
  const json j = json::parse(log_json);
  MotionPlan warm;
  bool have_warm = false;
  for (const auto& jc : j.at("cycles")) {
    const CycleSituation situation = situation_from(jc.at("situation"));
    std::optional<double> budget;
    if (jc.contains("budget")) budget = jc.at("budget").get<double>();
    const CycleRecord rec = run_cycle(config, terrain, situation, budget, have_warm ? &warm : nullptr);
    const std::string want_outcome = jc.at("outcome").get<std::string>();
    if (want_outcome != to_string(rec.outcome)) {
      result.ok = false;
      result.mismatch = "cycle " + std::to_string(jc.at("index").get<int>()) + ": outcome " +
                        to_string(rec.outcome) + " != " + want_outcome;
      return result;
    }
    if (rec.converged()) {
      const double want_objective = jc.at("objective").get<double>();
      if (rec.solve.objective != want_objective) {
        result.ok = false;
        result.mismatch = "cycle " + std::to_string(jc.at("index").get<int>()) + ": objective mismatch";
        return result;
      }
      warm = rec.full_plan;
      have_warm = true;
    } else {
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Trajectory export

namespace {

void write_full(std::ostream& out, double v) { out << std::setprecision(17) << v; }

}  // namespace

void export_trajectory(const EpisodeRecord& episode, const Terrain& terrain, const std::string& dir) {
  bool any = false;
  for (const CycleRecord& c : episode.cycles) any = any || c.converged();
  if (!any) throw StructuralError("export requires at least one converged cycle");
  std::filesystem::create_directories(dir);

  std::ofstream traj(dir + "/trajectory.csv");
  traj << "time,cycle,phase,knot,com_x,com_y,com_z,vel_x,vel_y,vel_z,L_x,L_y,L_z,n_contacts";
  constexpr int kMaxContacts = 8;
  for (int c = 0; c < kMaxContacts; ++c) traj << ",f" << c << "_x,f" << c << "_y,f" << c << "_z";
  traj << "\n";

  std::ofstream phases(dir + "/phases.csv");
  phases << "cycle,phase,kind,t_start,t_end\n";
  std::ofstream budget(dir + "/budget.csv");
  budget << "cycle,budget_s,solve_s,eh_duration_s,outcome\n";
  std::ofstream swing(dir + "/swing.csv");
  swing << "cycle,t,x,y,z\n";
  std::ofstream steps(dir + "/footsteps.csv");
  steps << "cycle,step,x,y,z,surface\n";

  double t_offset = 0.0;
  for (const CycleRecord& rec : episode.cycles) {
    budget << rec.index << ",";
    write_full(budget, rec.budget ? *rec.budget : -1.0);
    budget << ",";
    write_full(budget, rec.solve_seconds);
    budget << ",";
    write_full(budget, rec.eh_duration);
    budget << "," << to_string(rec.outcome) << "\n";
    if (!rec.converged()) break;

    const MotionPlan& plan = rec.eh_plan;
    double t_prev = 0.0;
    for (int q = 0; q < plan.phase_count(); ++q) {
      const int n_k = plan.phases[q].spec.knot_count;
      const double tau = plan.tau[q];
      phases << rec.index << "," << q << "," << to_string(plan.phases[q].spec.kind) << ",";
      write_full(phases, t_offset + t_prev);
      phases << ",";
      write_full(phases, t_offset + plan.switch_times[q]);
      phases << "\n";
      // shared boundary knots are emitted once: skip knot 0 except at the
      // very start of the stitched trajectory
      const int k0 = (q == 0 && rec.index == 0) ? 0 : 1;
      for (int k = k0; k <= n_k; ++k) {
        if (q + 1 < plan.phase_count() && k == n_k) break;  // owned by the next phase
        const double t = t_offset + t_prev + k * tau;
        traj << "";
        write_full(traj, t);
        traj << "," << rec.index << "," << q << "," << k;
        const Vec9& x = plan.states[q][k];
        for (int i = 0; i < 9; ++i) {
          traj << ",";
          write_full(traj, x(i));
        }
        const int nc = k < n_k ? static_cast<int>(plan.forces[q][k].size()) : 0;
        traj << "," << nc;
        for (int c = 0; c < kMaxContacts; ++c) {
          const Vec3 f = c < nc ? plan.forces[q][k][c] : Vec3::Zero();
          for (int i = 0; i < 3; ++i) {
            traj << ",";
            write_full(traj, f(i));
          }
        }
        traj << "\n";
      }
      t_prev = plan.switch_times[q];
    }

    for (std::size_t s = 0; s < plan.footsteps.size(); ++s) {
      steps << rec.index << "," << s << ",";
      write_full(steps, plan.footsteps[s].x());
      steps << ",";
      write_full(steps, plan.footsteps[s].y());
      steps << ",";
      write_full(steps, plan.footsteps[s].z());
      steps << "," << plan.phases[3 * s].landing_surface << "\n";
    }

    // swing interpolation between lift-off and touch-down
    const Foot swing_foot = other(plan.phases[1].spec.active_feet[0]);
    const Vec3 from = (swing_foot == Foot::Left ? rec.situation.left : rec.situation.right).position;
    const Vec3 to = plan.footsteps.at(0);
    const double duration = std::max(plan.switch_times[1] - plan.switch_times[0], 1e-3);
    const SwingSpline spline = swing_spline(from, to, 0.05, duration);
    for (int i = 0; i <= 20; ++i) {
      const double local = duration * i / 20.0;
      const Vec3 p = spline.position(local);
      swing << rec.index << ",";
      write_full(swing, t_offset + plan.switch_times[0] + local);
      swing << ",";
      write_full(swing, p.x());
      swing << ",";
      write_full(swing, p.y());
      swing << ",";
      write_full(swing, p.z());
      swing << "\n";
    }

    t_offset += rec.eh_duration;
  }
  (void)terrain;
}

ExportedTrajectory read_trajectory_export(const std::string& dir) {
  ExportedTrajectory out;
  std::ifstream traj(dir + "/trajectory.csv");
  if (!traj) throw StructuralError("missing trajectory.csv in " + dir);
  std::string line;
  std::getline(traj, line);  // header
  while (std::getline(traj, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    out.times.push_back(cells[0]);
    Vec9 x;
    for (int i = 0; i < 9; ++i) x(i) = cells[4 + i];
    out.states.push_back(x);
    const int nc = static_cast<int>(cells[13]);
    std::vector<Vec3> forces;
    for (int c = 0; c < nc; ++c) forces.emplace_back(cells[14 + 3 * c], cells[15 + 3 * c], cells[16 + 3 * c]);
    out.forces.push_back(std::move(forces));
  }
  std::ifstream steps(dir + "/footsteps.csv");
  if (!steps) throw StructuralError("missing footsteps.csv in " + dir);
  std::getline(steps, line);
  while (std::getline(steps, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    out.footsteps.emplace_back(std::stod(cells[2]), std::stod(cells[3]), std::stod(cells[4]));
  }
  return out;
}

}  // namespace stride
