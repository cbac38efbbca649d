// Command-line front end: terrain generation, episode planning, oracle
// training, suite runs and trajectory export.

#include "stride/suite.hpp"
#include "stride/terrain_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace stride;

PlannerMode parse_mode(const std::string& mode, RelaxationKind* relaxation) {
  if (mode == "baseline") return PlannerMode::BaselineFullModel;
  if (mode == "lg") return PlannerMode::LocallyGuided;
  if (mode.rfind("mf_", 0) == 0) {
    *relaxation = relaxation_from_string(mode.substr(3));
    return PlannerMode::MultiFidelity;
  }
  throw StructuralError("unknown planner mode: " + mode);
}

struct PlanArgs {
  std::string terrain_path;
  std::string mode = "baseline";
  int ph_steps = 1;
  double epsilon = 0.15;
  std::string oracle_path;
  int max_cycles = 28;
  std::string policy = "eh_duration";
  std::string time_source = "wall";
  int knots = 8;
  std::string out_dir;
  bool do_export = false;
};

ScenarioConfig scenario_from(const PlanArgs& args) {
  ScenarioConfig sc;
  sc.name = args.mode;
  sc.mode = parse_mode(args.mode, &sc.relaxation);
  sc.ph_steps = args.ph_steps;
  sc.epsilon = args.epsilon;
  sc.oracle_model_path = args.oracle_path;
  sc.max_cycles = args.max_cycles;
  sc.budget_policy = args.policy == "unlimited" ? BudgetPolicy::Unlimited : BudgetPolicy::EhDuration;
  sc.time_source = args.time_source == "work_units" ? TimeSource::WorkUnits : TimeSource::WallClock;
  sc.knots_per_phase = args.knots;
  return sc;
}

int run_plan_episode(const PlanArgs& args) {
  const Terrain terrain = load_terrain_file(args.terrain_path);
  const ScenarioConfig sc = scenario_from(args);
  OracleModel oracle;
  if (sc.mode == PlannerMode::LocallyGuided) oracle = load_model(sc.oracle_model_path);
  const RhpConfig config = sc.to_rhp_config(&oracle);
  const EpisodeRecord ep = run_episode(config, terrain, "episode");

  std::cout << "episode outcome: " << to_string(ep.outcome) << " (" << ep.cycles.size() << " cycles, goal "
            << (ep.reached_goal ? "reached" : "not reached") << ")\n";
  for (const CycleRecord& c : ep.cycles)
    std::cout << "  cycle " << c.index << ": " << to_string(c.outcome) << " solve " << c.solve_seconds
              << " s, budget " << (c.budget ? std::to_string(*c.budget) : std::string("unlimited"))
              << ", status " << to_string(c.solve.status) << "\n";

  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    save_episode_log(ep, args.out_dir + "/episode.log.json");
    if (args.do_export) export_trajectory(ep, terrain, args.out_dir);
    std::cout << "wrote " << args.out_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Centroidal receding-horizon planner over sloped terrain"};
  app.set_config("--config");
  app.require_subcommand(1);

  // terrain gen
  auto* terrain_cmd = app.add_subcommand("terrain", "terrain utilities");
  auto* gen = terrain_cmd->add_subcommand("gen", "generate a terrain file");
  std::string t_class = "moderate", t_out = "terrain.json";
  int t_steps = 6;
  std::uint64_t t_seed = 42;
  gen->add_option("--class", t_class, "flat|moderate|large_slope|up_down_hill|v_shape");
  gen->add_option("--steps", t_steps, "number of steps");
  gen->add_option("--seed", t_seed, "random seed");
  gen->add_option("--out", t_out, "output path");

  // plan episode
  auto* plan_cmd = app.add_subcommand("plan", "run a planner");
  auto* episode = plan_cmd->add_subcommand("episode", "plan one episode on a terrain");
  PlanArgs plan_args;
  episode->add_option("--terrain", plan_args.terrain_path, "terrain file")->required();
  episode->add_option("--mode", plan_args.mode, "baseline|mf_com_only|mf_ponton_rectangular|mf_ponton_point|lg");
  episode->add_option("--ph-steps", plan_args.ph_steps, "prediction-horizon steps");
  episode->add_option("--epsilon", plan_args.epsilon, "LG timing slack");
  episode->add_option("--oracle", plan_args.oracle_path, "oracle model file (lg mode)");
  episode->add_option("--max-cycles", plan_args.max_cycles, "cycle cap");
  episode->add_option("--policy", plan_args.policy, "eh_duration|unlimited");
  episode->add_option("--time-source", plan_args.time_source, "wall|work_units");
  episode->add_option("--knots", plan_args.knots, "knots per phase");
  episode->add_option("--out", plan_args.out_dir, "output directory (episode log)");
  episode->add_flag("--export", plan_args.do_export, "also write trajectory CSVs");

  // oracle extract / train / augment
  auto* oracle_cmd = app.add_subcommand("oracle", "dataset and model tools");
  auto* extract = oracle_cmd->add_subcommand("extract", "extract samples from expert rollouts");
  std::vector<std::string> ex_terrains;
  std::string ex_out = "dataset.json";
  int ex_ph = 3, ex_knots = 8;
  extract->add_option("--terrain", ex_terrains, "terrain file(s)")->required();
  extract->add_option("--ph-steps", ex_ph, "expert prediction-horizon steps");
  extract->add_option("--knots", ex_knots, "knots per phase");
  extract->add_option("--out", ex_out, "dataset output path");

  auto* train = oracle_cmd->add_subcommand("train", "train an MLP oracle");
  std::string tr_data, tr_out = "model.json", tr_widths = "64,64,64";
  int tr_epochs = 400, tr_batch = 16;
  double tr_lr = 1e-2;
  std::uint64_t tr_seed = 0;
  train->add_option("--data", tr_data, "dataset file")->required();
  train->add_option("--out", tr_out, "model output path");
  train->add_option("--epochs", tr_epochs);
  train->add_option("--batch", tr_batch);
  train->add_option("--lr", tr_lr, "step size");
  train->add_option("--seed", tr_seed);
  train->add_option("--widths", tr_widths, "hidden widths, comma separated (256,256,256,256 full size)");

  auto* augment = oracle_cmd->add_subcommand("augment", "incremental training with recovery actions");
  std::string au_data, au_class = "moderate", au_model_out = "model.json", au_data_out = "dataset.json";
  int au_terrains = 6, au_steps = 6, au_iters = 3, au_knots = 8;
  std::uint64_t au_seed = 7;
  double au_eps = 0.6;
  augment->add_option("--data", au_data, "initial dataset")->required();
  augment->add_option("--class", au_class, "terrain class of the pool");
  augment->add_option("--terrains", au_terrains, "pool size");
  augment->add_option("--steps", au_steps, "steps per terrain");
  augment->add_option("--seed", au_seed);
  augment->add_option("--iterations", au_iters, "augmentation iterations");
  augment->add_option("--epsilon", au_eps, "LG timing slack");
  augment->add_option("--knots", au_knots);
  augment->add_option("--out-model", au_model_out);
  augment->add_option("--out-data", au_data_out);

  // suite run
  auto* suite_cmd = app.add_subcommand("suite", "experiment suites");
  auto* suite_run = suite_cmd->add_subcommand("run", "run configs over a terrain pool");
  std::string su_class = "moderate", su_modes = "baseline,mf_ponton_point", su_out = "results";
  std::string su_oracle;
  int su_terrains = 8, su_steps = 6, su_ph = 1, su_knots = 8;
  std::uint64_t su_seed = 42;
  double su_eps = 0.15;
  suite_run->add_option("--class", su_class);
  suite_run->add_option("--terrains", su_terrains);
  suite_run->add_option("--steps", su_steps);
  suite_run->add_option("--seed", su_seed);
  suite_run->add_option("--modes", su_modes, "comma-separated planner modes");
  suite_run->add_option("--ph-steps", su_ph);
  suite_run->add_option("--epsilon", su_eps);
  suite_run->add_option("--oracle", su_oracle, "oracle model for lg entries");
  suite_run->add_option("--knots", su_knots);
  suite_run->add_option("--out", su_out, "output directory");

  // export
  auto* export_cmd = app.add_subcommand("export", "replay a logged episode and write trajectory CSVs");
  std::string xp_terrain, xp_log, xp_out = "export";
  PlanArgs xp_args;
  export_cmd->add_option("--terrain", xp_terrain, "terrain file")->required();
  export_cmd->add_option("--log", xp_log, "episode log")->required();
  export_cmd->add_option("--mode", xp_args.mode);
  export_cmd->add_option("--ph-steps", xp_args.ph_steps);
  export_cmd->add_option("--epsilon", xp_args.epsilon);
  export_cmd->add_option("--oracle", xp_args.oracle_path);
  export_cmd->add_option("--knots", xp_args.knots);
  export_cmd->add_option("--out", xp_out, "output directory");

  // complexity
  auto* complexity_cmd = app.add_subcommand("complexity", "knot-wise model complexity table");
  std::string cx_out;
  complexity_cmd->add_option("--out", cx_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const Terrain t = generate_terrain(terrain_class_from_string(t_class), t_steps, t_seed);
      save_terrain_file(t, t_out);
      std::cout << "wrote " << t_out << " (" << t.surfaces.size() << " surfaces, "
                << t.step_sequence.size() << " steps)\n";
      return 0;
    }
    if (episode->parsed()) return run_plan_episode(plan_args);
    if (extract->parsed()) {
      RhpConfig expert;
      expert.mode = PlannerMode::BaselineFullModel;
      expert.ph_steps = ex_ph;
      expert.knots_per_phase = ex_knots;
      expert.budget_policy = BudgetPolicy::Unlimited;
      std::vector<OracleSample> dataset;
      for (const std::string& path : ex_terrains) {
        const Terrain t = load_terrain_file(path);
        const EpisodeRecord ep = run_episode(expert, t, path);
        if (ep.outcome == EpisodeOutcome::FailToConverge) {
          std::cout << "expert failed on " << path << ", skipping\n";
          continue;
        }
        const auto samples = extract_samples(ep, t);
        dataset.insert(dataset.end(), samples.begin(), samples.end());
        std::cout << path << ": " << samples.size() << " samples\n";
      }
      save_dataset(dataset, ex_out);
      std::cout << "wrote " << ex_out << " (" << dataset.size() << " samples)\n";
      return 0;
    }
    if (train->parsed()) {
      TrainOptions opts;
      opts.epochs = tr_epochs;
      opts.batch_size = tr_batch;
      opts.step_size = tr_lr;
      opts.seed = tr_seed;
      opts.hidden_widths.clear();
      std::stringstream ss(tr_widths);
      std::string w;
      while (std::getline(ss, w, ',')) opts.hidden_widths.push_back(std::stoi(w));
      std::vector<double> history;
      opts.validation_history = &history;
      const OracleModel model = train_mlp(load_dataset(tr_data), opts);
      save_model(model, tr_out);
      std::cout << "wrote " << tr_out << " (best validation loss "
                << (history.empty() ? 0.0 : *std::min_element(history.begin(), history.end())) << ")\n";
      return 0;
    }
    if (augment->parsed()) {
      IncrementalOptions opts;
      opts.train.seed = au_seed;
      opts.max_iterations = au_iters;
      opts.epsilon = au_eps;
      opts.lg_config.knots_per_phase = au_knots;
      opts.lg_config.budget_policy = BudgetPolicy::Unlimited;
      opts.expert_config.ph_steps = 3;
      opts.expert_config.knots_per_phase = au_knots;
      opts.expert_config.budget_policy = BudgetPolicy::Unlimited;
      std::vector<Terrain> pool;
      for (int i = 0; i < au_terrains; ++i)
        pool.push_back(generate_terrain(terrain_class_from_string(au_class), au_steps, au_seed + i));
      const TrainingRun run = incremental_train(load_dataset(au_data), pool, opts);
      for (const TrainingIteration& it : run.iterations)
        std::cout << "iteration " << it.index << ": success " << 100.0 * it.success_rate << "% (|D| "
                  << it.dataset_size << ", +" << it.augmented_samples << ")\n";
      save_model(run.final_model, au_model_out);
      save_dataset(run.dataset, au_data_out);
      std::cout << "wrote " << au_model_out << ", " << au_data_out << "\n";
      return 0;
    }
    if (suite_run->parsed()) {
      SuiteSpec spec;
      spec.terrain_class = terrain_class_from_string(su_class);
      spec.terrain_count = su_terrains;
      spec.steps_per_terrain = su_steps;
      spec.seed = su_seed;
      std::stringstream ss(su_modes);
      std::string mode;
      while (std::getline(ss, mode, ',')) {
        ScenarioConfig sc;
        sc.name = mode;
        sc.mode = parse_mode(mode, &sc.relaxation);
        sc.ph_steps = su_ph;
        sc.epsilon = su_eps;
        sc.oracle_model_path = su_oracle;
        sc.knots_per_phase = su_knots;
        spec.configs.push_back(sc);
      }
      const SuiteResult result = run_suite(spec, su_out);
      result.table.validate_partitions();
      std::cout << result.table.to_csv();
      std::cout << "wrote " << su_out << "/metrics.csv\n";
      return 0;
    }
    if (export_cmd->parsed()) {
      const Terrain terrain = load_terrain_file(xp_terrain);
      std::ifstream in(xp_log);
      if (!in) throw StructuralError("cannot open log: " + xp_log);
      std::stringstream ss;
      ss << in.rdbuf();
      ScenarioConfig sc = scenario_from(xp_args);
      sc.time_source = TimeSource::WorkUnits;
      OracleModel oracle;
      if (sc.mode == PlannerMode::LocallyGuided) oracle = load_model(sc.oracle_model_path);
      const RhpConfig config = sc.to_rhp_config(&oracle);
      const ReplayResult replay = replay_episode_log(config, terrain, ss.str());
      if (!replay.ok) std::cout << "replay mismatch: " << replay.mismatch << "\n";
      // replaying regenerates the episode for export
      const EpisodeRecord ep = run_episode(config, terrain, "export");
      export_trajectory(ep, terrain, xp_out);
      std::cout << "wrote " << xp_out << "\n";
      return 0;
    }
    if (complexity_cmd->parsed()) {
      const std::string csv = complexity_csv();
      if (cx_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(cx_out);
        out << csv;
        std::cout << "wrote " << cx_out << "\n";
      }
      return 0;
    }
  } catch (const StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
