#pragma once

#include "stride/oracle.hpp"
#include "stride/terrain_gen.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stride {

struct ScenarioConfig {
  std::string name = "baseline";
  PlannerMode mode = PlannerMode::BaselineFullModel;
  RelaxationKind relaxation = RelaxationKind::PontonPoint;
  int ph_steps = 1;
  double epsilon = 0.15;  // LG timing slack; 0.6 in the moderate-slope study
  int max_cycles = 28;
  BudgetPolicy budget_policy = BudgetPolicy::EhDuration;
  TimeSource time_source = TimeSource::WallClock;
  int knots_per_phase = 8;
  std::string oracle_model_path;  // LG mode
  SolveOptions solver;
  TranscriptionOptions transcription;

  /// Materializes the engine config; `oracle` must outlive the config when
  /// the mode is LocallyGuided.
  RhpConfig to_rhp_config(const OracleModel* oracle = nullptr) const;
};

struct SuiteSpec {
  std::vector<ScenarioConfig> configs;
  TerrainClass terrain_class = TerrainClass::ModerateSlopes;
  int terrain_count = 8;
  int steps_per_terrain = 6;
  std::uint64_t seed = 42;
};

struct MetricsRow {
  std::string config;
  std::string mode;
  int ph_steps = 0;
  std::string policy;
  int episodes = 0;
  int cycles = 0;
  double ep_success_offline = 0.0;  // completed episodes, %
  double ep_success_online = 0.0;
  double ep_time_out = 0.0;
  double ep_fail = 0.0;
  double cy_success_offline = 0.0;  // converged cycles, %
  double cy_success_online = 0.0;
  double cy_time_out = 0.0;
  double cy_fail = 0.0;
  double solve_mean = 0.0;
  double solve_std = 0.0;
  double budget_mean = 0.0;
  double budget_std = 0.0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;

  std::string to_csv() const;
  /// Each taxonomy group must sum to 100 +/- 0.1 (%).
  void validate_partitions() const;
};

MetricsRow aggregate_metrics(const ScenarioConfig& config, const std::vector<EpisodeRecord>& episodes);

struct SuiteResult {
  MetricsTable table;
  // episodes[config_index][terrain_index]
  std::vector<std::vector<EpisodeRecord>> episodes;
  std::vector<Terrain> terrains;
};

/// Runs every (config, terrain) pair; per-episode planning failures are
/// results, never aborts. When `output_dir` is nonempty, writes metrics.csv
/// and one episode log per run.
SuiteResult run_suite(const SuiteSpec& spec, const std::string& output_dir = "");

// ---------------------------------------------------------------------------
// Episode logs and replay

std::string episode_log_json(const EpisodeRecord& episode);
void save_episode_log(const EpisodeRecord& episode, const std::string& path);

struct ReplayResult {
  bool ok = true;
  std::string mismatch;
};

/// Re-runs every cycle from the inputs recorded in the log and checks the
/// outcomes (labels and objectives) match. Exact under the WorkUnits time
/// source.
ReplayResult replay_episode_log(const RhpConfig& config, const Terrain& terrain,
                                const std::string& log_json);

// ---------------------------------------------------------------------------
// Trajectory export

/// Writes plot-ready CSVs for the stitched execution horizons of an episode:
/// trajectory.csv (time-indexed states and forces), footsteps.csv,
/// phases.csv, budget.csv (per-cycle budget vs solve time), swing.csv
/// (sampled swing interpolations). Doubles are written round-trip exact.
void export_trajectory(const EpisodeRecord& episode, const Terrain& terrain, const std::string& dir);

struct ExportedTrajectory {
  std::vector<double> times;
  std::vector<Vec9> states;
  std::vector<std::vector<Vec3>> forces;  // per row, padded rows trimmed by count
  std::vector<Vec3> footsteps;
};

ExportedTrajectory read_trajectory_export(const std::string& dir);

std::uint64_t fnv1a_hash(const void* data, std::size_t size);

}  // namespace stride
