#include "stride/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace stride {

using nlohmann::json;

namespace {
constexpr double kTimingFloor = 1e-4;  // positive lower clamp for decoded increments
}

// ---------------------------------------------------------------------------
// Sample encoding

Eigen::VectorXd OracleSample::input_vector() const {
  Eigen::VectorXd v(kInputDim);
  int at = 0;
  v(at++) = swing_flag == Foot::Left ? 1.0 : -1.0;
  v.segment<9>(at) = x0;
  at += 9;
  v.segment<3>(at) = p0;
  at += 3;
  for (const auto& surf : surfaces)
    for (const Vec3& vert : surf) {
      v.segment<3>(at) = vert;
      at += 3;
    }
  v.segment<3>(at) = goal;
  at += 3;
  return v;
}

Eigen::VectorXd OracleSample::target_vector() const {
  Eigen::VectorXd v(kTargetDim);
  v.segment<9>(0) = x_star;
  v(9) = alpha(0);
  v(10) = alpha(1);
  v(11) = timings[0];
  v(12) = timings[1] - timings[0];
  v(13) = timings[2] - timings[1];
  return v;
}

SceneView scene_view(const CycleSituation& situation, const Terrain& terrain) {
  SceneView scene;
  scene.swing_foot = situation.swing_foot;
  scene.x0 = situation.x_start;
  scene.swing_position = situation.swing().position;
  scene.stance = situation.stance();
  scene.stance_surface = terrain.surface(scene.stance.surface_index);
  scene.preview[0] = terrain.surface(situation.left.surface_index);
  scene.preview[1] = terrain.surface(situation.right.surface_index);
  const int n_steps = static_cast<int>(terrain.step_sequence.size());
  for (int i = 0; i < OracleSample::kPreviewSteps; ++i) {
    const int idx = std::min(situation.cursor + i, n_steps - 1);
    scene.preview[2 + i] = terrain.surface(terrain.step_sequence[idx]);
  }
  scene.goal_com = situation.goal_com;
  return scene;
}

OracleSample encode_sample(const SceneView& scene, const SampleTargets* targets) {
  const RigidTransform frame = surface_anchored_frame(scene.stance_surface, scene.stance.position);
  OracleSample s;
  s.swing_flag = scene.swing_foot;
  s.x0.segment<3>(0) = frame.to_local(scene.x0.com);
  s.x0.segment<3>(3) = frame.rotate_to_local(scene.x0.com_velocity);
  s.x0.segment<3>(6) = frame.rotate_to_local(scene.x0.angular_momentum);
  s.p0 = frame.to_local(scene.swing_position);
  for (int i = 0; i < OracleSample::kSurfaces; ++i)
    for (int v = 0; v < 4; ++v) s.surfaces[i][v] = frame.to_local(scene.preview[i].vertices[v]);
  s.goal = frame.to_local(scene.goal_com);

  if (targets) {
    const ContactSurface& landing = scene.preview[2];
    const SurfaceDistance sd = surface_distance(landing, targets->footstep);
    if (std::abs(sd.plane) > 1e-6 || sd.boundary > 1e-6) {
      std::ostringstream msg;
      msg << "footstep off its surface (plane " << sd.plane << ", boundary " << sd.boundary << ")";
      throw StructuralError(msg.str());
    }
    s.x_star.segment<3>(0) = frame.to_local(targets->x_star.com);
    s.x_star.segment<3>(3) = frame.rotate_to_local(targets->x_star.com_velocity);
    s.x_star.segment<3>(6) = frame.rotate_to_local(targets->x_star.angular_momentum);
    s.alpha = surface_alphas(landing, targets->footstep);
    s.timings = targets->timings;
    if (!(s.timings[0] > 0.0 && s.timings[1] > s.timings[0] && s.timings[2] > s.timings[1]))
      throw StructuralError("sample timings must be strictly increasing");
  }
  return s;
}

std::vector<OracleSample> extract_samples(const EpisodeRecord& episode, const Terrain& terrain) {
  for (const CycleRecord& c : episode.cycles)
    if (!c.converged()) throw StructuralError("extract_samples requires a fully converged episode");
  std::vector<OracleSample> out;
  for (const CycleRecord& c : episode.cycles) {
    const SceneView scene = scene_view(c.situation, terrain);
    SampleTargets t;
    t.x_star = c.eh_plan.terminal_state();
    t.footstep = c.eh_plan.footsteps.at(0);
    t.timings = {c.eh_plan.switch_times[0], c.eh_plan.switch_times[1], c.eh_plan.switch_times[2]};
    out.push_back(encode_sample(scene, &t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models

namespace {

Eigen::MatrixXd input_matrix(const std::vector<OracleSample>& ds) {
  Eigen::MatrixXd m(static_cast<int>(ds.size()), OracleSample::kInputDim);
  for (std::size_t i = 0; i < ds.size(); ++i) m.row(static_cast<int>(i)) = ds[i].input_vector().transpose();
  return m;
}

Eigen::MatrixXd target_matrix(const std::vector<OracleSample>& ds) {
  Eigen::MatrixXd m(static_cast<int>(ds.size()), OracleSample::kTargetDim);
  for (std::size_t i = 0; i < ds.size(); ++i) m.row(static_cast<int>(i)) = ds[i].target_vector().transpose();
  return m;
}

Normalization fit_normalization(const Eigen::MatrixXd& data) {
  Normalization n;
  n.mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - n.mean.transpose();
  n.stddev = (centered.array().square().colwise().mean()).sqrt();
  for (int i = 0; i < n.stddev.size(); ++i) n.stddev(i) = std::max(n.stddev(i), 1e-8);
  return n;
}

Eigen::VectorXd normalize(const Normalization& n, const Eigen::VectorXd& v) {
  return (v - n.mean).cwiseQuotient(n.stddev);
}

Eigen::VectorXd mlp_forward(const OracleModel& m, const Eigen::VectorXd& in,
                            std::vector<Eigen::VectorXd>* activations = nullptr) {
  Eigen::VectorXd a = in;
  if (activations) activations->push_back(a);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::VectorXd z = m.weights[l] * a + m.biases[l];
    if (l + 1 < m.weights.size()) z = z.cwiseMax(0.0);  // ReLU on hidden layers
    a = std::move(z);
    if (activations) activations->push_back(a);
  }
  return a;
}

}  // namespace

Eigen::VectorXd OracleModel::predict_raw(const Eigen::VectorXd& input) const {
  if (input.size() != OracleSample::kInputDim) throw StructuralError("oracle input dimension mismatch");
  const Eigen::VectorXd in = normalize(input_norm, input);
  if (kind == Kind::Mlp) {
    const Eigen::VectorXd out = mlp_forward(*this, in);
    return out.cwiseProduct(target_norm.stddev) + target_norm.mean;
  }
  // k-NN over normalized inputs; targets stored raw
  const int n = static_cast<int>(knn_inputs.rows());
  if (n == 0) throw StructuralError("k-NN oracle has an empty dataset");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = (knn_inputs.row(i).transpose() - in).squaredNorm();
  const int kk = std::min(k, n);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dist[a] < dist[b]; });
  if (kk == 1) return knn_targets.row(idx[0]).transpose();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(knn_targets.cols());
  for (int i = 0; i < kk; ++i) acc += knn_targets.row(idx[i]).transpose();
  return acc / kk;
}

OraclePrediction decode_targets(const Eigen::VectorXd& raw) {
  if (raw.size() != OracleSample::kTargetDim) throw StructuralError("oracle target dimension mismatch");
  OraclePrediction p;
  p.x_star = CentroidalState::unflatten(raw.segment<9>(0));
  p.alpha(0) = std::clamp(raw(9), 0.0, 1.0);
  p.alpha(1) = std::clamp(raw(10), 0.0, 1.0);
  double t = 0.0;
  for (int i = 0; i < 3; ++i) {
    t += std::max(raw(11 + i), kTimingFloor);
    p.timings[i] = t;
  }
  return p;
}

OraclePrediction predict(const OracleModel& model, const OracleSample& input) {
  return decode_targets(model.predict_raw(input.input_vector()));
}

OracleModel make_knn(const std::vector<OracleSample>& dataset, int k) {
  if (dataset.empty()) throw StructuralError("k-NN oracle needs a nonempty dataset");
  OracleModel m;
  m.kind = OracleModel::Kind::Knn;
  m.k = k;
  const Eigen::MatrixXd inputs = input_matrix(dataset);
  m.input_norm = fit_normalization(inputs);
  m.target_norm = fit_normalization(target_matrix(dataset));
  m.knn_inputs.resize(inputs.rows(), inputs.cols());
  for (int i = 0; i < inputs.rows(); ++i)
    m.knn_inputs.row(i) = normalize(m.input_norm, inputs.row(i).transpose()).transpose();
  m.knn_targets = target_matrix(dataset);
  return m;
}

// ---------------------------------------------------------------------------
// Training

namespace {

void init_mlp(OracleModel& m, std::mt19937_64& rng) {
  std::vector<int> dims;
  dims.push_back(OracleSample::kInputDim);
  for (int w : m.hidden_widths) dims.push_back(w);
  dims.push_back(OracleSample::kTargetDim);
  m.weights.clear();
  m.biases.clear();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double scale = std::sqrt(2.0 / dims[l]);
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) w(r, c) = gauss(rng);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
}

double batch_loss_grad(const OracleModel& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       std::vector<Eigen::MatrixXd>* dw, std::vector<Eigen::VectorXd>* db) {
  const int n = static_cast<int>(x.rows());
  const int layers = static_cast<int>(m.weights.size());
  double loss = 0.0;
  if (dw) {
    dw->assign(layers, Eigen::MatrixXd());
    db->assign(layers, Eigen::VectorXd());
    for (int l = 0; l < layers; ++l) {
      (*dw)[l] = Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols());
      (*db)[l] = Eigen::VectorXd::Zero(m.biases[l].size());
    }
  }
  for (int i = 0; i < n; ++i) {
    std::vector<Eigen::VectorXd> acts;
    const Eigen::VectorXd out = mlp_forward(m, x.row(i).transpose(), &acts);
    const Eigen::VectorXd err = out - y.row(i).transpose();
    loss += err.squaredNorm();
    if (!dw) continue;
    // backprop, d(loss_i) = 2 err
    Eigen::VectorXd delta = 2.0 * err / (n * y.cols());
    for (int l = layers - 1; l >= 0; --l) {
      (*dw)[l] += delta * acts[l].transpose();
      (*db)[l] += delta;
      if (l > 0) {
        delta = m.weights[l].transpose() * delta;
        for (int j = 0; j < delta.size(); ++j)
          if (acts[l](j) <= 0.0) delta(j) = 0.0;  // ReLU mask
      }
    }
  }
  return loss / (n * y.cols());
}

}  // namespace

double mlp_loss_and_gradient(const OracleModel& model, const Eigen::MatrixXd& inputs_normalized,
                             const Eigen::MatrixXd& targets_normalized, Eigen::VectorXd* gradient) {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
  const double loss = batch_loss_grad(model, inputs_normalized, targets_normalized,
                                      gradient ? &dw : nullptr, gradient ? &db : nullptr);
  if (gradient) {
    std::vector<double> flat;
    for (std::size_t l = 0; l < dw.size(); ++l) {
      flat.insert(flat.end(), dw[l].data(), dw[l].data() + dw[l].size());
      flat.insert(flat.end(), db[l].data(), db[l].data() + db[l].size());
    }
    *gradient = Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<int>(flat.size()));
  }
  return loss;
}

Eigen::VectorXd flatten_parameters(const OracleModel& model) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    flat.insert(flat.end(), model.weights[l].data(), model.weights[l].data() + model.weights[l].size());
    flat.insert(flat.end(), model.biases[l].data(), model.biases[l].data() + model.biases[l].size());
  }
  return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<int>(flat.size()));
}

void set_parameters(OracleModel& model, const Eigen::VectorXd& flat) {
  int at = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    for (int i = 0; i < model.weights[l].size(); ++i) model.weights[l].data()[i] = flat(at++);
    for (int i = 0; i < model.biases[l].size(); ++i) model.biases[l](i) = flat(at++);
  }
  if (at != flat.size()) throw StructuralError("parameter vector length mismatch");
}

OracleModel train_mlp(const std::vector<OracleSample>& dataset, const TrainOptions& options) {
  if (static_cast<int>(dataset.size()) < 2 * options.batch_size)
    throw StructuralError("dataset must contain at least twice the batch size");
  std::mt19937_64 rng(options.seed);

  OracleModel m;
  m.kind = OracleModel::Kind::Mlp;
  m.hidden_widths = options.hidden_widths;
  const Eigen::MatrixXd inputs = input_matrix(dataset);
  const Eigen::MatrixXd targets = target_matrix(dataset);
  m.input_norm = fit_normalization(inputs);
  m.target_norm = fit_normalization(targets);

  const int n = static_cast<int>(dataset.size());
  Eigen::MatrixXd xn(n, inputs.cols()), yn(n, targets.cols());
  for (int i = 0; i < n; ++i) {
    xn.row(i) = normalize(m.input_norm, inputs.row(i).transpose()).transpose();
    yn.row(i) = normalize(m.target_norm, targets.row(i).transpose()).transpose();
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_val = n >= 5 ? std::max(1, static_cast<int>(std::lround(options.validation_fraction * n))) : 0;
  std::vector<int> val(order.begin(), order.begin() + n_val);
  std::vector<int> train(order.begin() + n_val, order.end());

  const auto subset = [&](const std::vector<int>& rows, const Eigen::MatrixXd& src) {
    Eigen::MatrixXd out(static_cast<int>(rows.size()), src.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<int>(i)) = src.row(rows[i]);
    return out;
  };
  const Eigen::MatrixXd xv = subset(val, xn), yv = subset(val, yn);

  init_mlp(m, rng);
  OracleModel best = m;
  double best_val = kInfinity;
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t at = 0; at < train.size(); at += options.batch_size) {
      const std::size_t end = std::min(at + options.batch_size, train.size());
      std::vector<int> rows(train.begin() + at, train.begin() + end);
      const double loss = batch_loss_grad(m, subset(rows, xn), subset(rows, yn), &dw, &db);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss at epoch " << epoch << ", batch offset " << at;
        throw std::runtime_error(msg.str());
      }
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        m.weights[l] -= options.step_size * dw[l];
        m.biases[l] -= options.step_size * db[l];
      }
    }
    const double val_loss = n_val > 0 ? batch_loss_grad(m, xv, yv, nullptr, nullptr)
                                      : batch_loss_grad(m, xn, yn, nullptr, nullptr);
    if (options.validation_history) options.validation_history->push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best = m;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Short-horizon interface

LgGuidance decode_guidance(const OraclePrediction& prediction, const CycleSituation& situation,
                           const Terrain& terrain, double epsilon) {
  const Footstep& stance = situation.stance();
  const RigidTransform frame =
      surface_anchored_frame(terrain.surface(stance.surface_index), stance.position);
  LgGuidance g;
  g.x_star.com = frame.to_world(prediction.x_star.com);
  g.x_star.com_velocity = frame.rotate_to_world(prediction.x_star.com_velocity);
  g.x_star.angular_momentum = frame.rotate_to_world(prediction.x_star.angular_momentum);
  const ContactSurface& landing = terrain.surface(terrain.step_sequence.at(situation.cursor));
  g.p_star = on_surface_point(landing, prediction.alpha(0), prediction.alpha(1));
  g.t_tilde = prediction.timings;
  g.epsilon = epsilon;
  return g;
}

TranscribedProblem build_lg_problem(const OraclePrediction& prediction, double epsilon,
                                    const CycleSituation& situation, const Terrain& terrain,
                                    const TranscriptionOptions& options) {
  const LgGuidance guidance = decode_guidance(prediction, situation, terrain, epsilon);
  HorizonSpec horizon = HorizonSpec::make(1, situation.swing_foot);
  HorizonContext ctx;
  ctx.x_init = situation.x_start;
  ctx.x_goal.com = situation.goal_com;
  ctx.left = situation.left;
  ctx.right = situation.right;
  ctx.swing_first = situation.swing_foot;
  ctx.step_surfaces = {terrain.step_sequence.at(situation.cursor)};
  return build_horizon_problem(horizon, terrain, ctx, {StepModel{}}, options, &guidance);
}

LgPredictor make_lg_predictor(const OracleModel& model, double epsilon) {
  return [&model, epsilon](const CycleSituation& situation, const Terrain& terrain) {
    const SceneView scene = scene_view(situation, terrain);
    const OracleSample input = encode_sample(scene, nullptr);
    const OraclePrediction prediction = predict(model, input);
    return decode_guidance(prediction, situation, terrain, epsilon);
  };
}

// ---------------------------------------------------------------------------
// Incremental training

namespace {

Eigen::VectorXd state_feature_scale(const std::vector<OracleSample>& dataset) {
  Eigen::MatrixXd states(static_cast<int>(dataset.size()), 9);
  for (std::size_t i = 0; i < dataset.size(); ++i) states.row(static_cast<int>(i)) = dataset[i].x0.transpose();
  const Normalization n = fit_normalization(states);
  return n.stddev;
}

double normalized_state_distance(const CentroidalState& a, const CentroidalState& b,
                                 const Eigen::VectorXd& scale) {
  const Vec9 d = a.flatten() - b.flatten();
  return d.cwiseQuotient(scale.cwiseMax(1e-3)).norm();
}

}  // namespace

TrainingRun incremental_train(const std::vector<OracleSample>& initial_dataset,
                              const std::vector<Terrain>& pool, const IncrementalOptions& options) {
  if (pool.empty()) throw StructuralError("incremental training needs a terrain pool");
  TrainingRun run;
  run.dataset = initial_dataset;
  const Eigen::VectorXd scale = state_feature_scale(initial_dataset);

  // ground-truth expert rollouts per terrain
  std::vector<EpisodeRecord> ground_truth;
  for (std::size_t t = 0; t < pool.size(); ++t)
    ground_truth.push_back(run_episode(options.expert_config, pool[t], "gt_" + std::to_string(t)));

  double prev_rate = -1.0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    TrainingIteration record;
    record.index = iter;
    record.dataset_size = static_cast<int>(run.dataset.size());

    TrainOptions topt = options.train;
    topt.seed = options.train.seed + static_cast<std::uint64_t>(iter);
    std::vector<double> history;
    topt.validation_history = &history;
    run.final_model = train_mlp(run.dataset, topt);
    record.validation_loss = history.empty() ? 0.0 : *std::min_element(history.begin(), history.end());

    RhpConfig lg = options.lg_config;
    lg.mode = PlannerMode::LocallyGuided;
    lg.lg_predictor = make_lg_predictor(run.final_model, options.epsilon);

    int successes = 0;
    std::vector<std::pair<std::size_t, EpisodeRecord>> failures;
    for (std::size_t t = 0; t < pool.size(); ++t) {
      EpisodeRecord ep = run_episode(lg, pool[t], "lg_" + std::to_string(t));
      const bool ok = ep.outcome != EpisodeOutcome::FailToConverge && ep.reached_goal;
      if (ok) ++successes;
      else failures.emplace_back(t, std::move(ep));
    }
    record.success_rate = static_cast<double>(successes) / pool.size();

    // recovery actions for every failure: rewind 1..3 cycles and let the
    // expert demonstrate until it rejoins its own rollout
    std::vector<OracleSample> augmented;
    for (const auto& [t_idx, failed] : failures) {
      if (failed.cycles.empty()) continue;
      const int fail_cycle = static_cast<int>(failed.cycles.size()) - 1;
      const EpisodeRecord& gt = ground_truth[t_idx];
      if (gt.outcome == EpisodeOutcome::FailToConverge) {
        record.diagnostics.push_back("expert itself fails on terrain " + std::to_string(t_idx));
        continue;
      }
      bool recovered = false;
      for (int depth = 1; depth <= 3 && !recovered; ++depth) {
        const int start_idx = std::max(0, fail_cycle - depth);
        const CycleSituation start = failed.cycles[start_idx].situation;
        EpisodeRecord demo = run_episode_from(options.expert_config, pool[t_idx], start,
                                              "recovery_" + std::to_string(t_idx));
        if (demo.outcome == EpisodeOutcome::FailToConverge) continue;
        // find the first cycle whose terminal state rejoins the ground truth
        int rejoin = static_cast<int>(demo.cycles.size()) - 1;
        for (std::size_t c = 0; c < demo.cycles.size(); ++c) {
          const int cursor = demo.cycles[c].situation.cursor;
          const CycleRecord* gt_cycle = nullptr;
          for (const CycleRecord& g : gt.cycles)
            if (g.situation.cursor == cursor) gt_cycle = &g;
          if (!gt_cycle) continue;
          if (normalized_state_distance(demo.cycles[c].eh_plan.terminal_state(),
                                        gt_cycle->eh_plan.terminal_state(), scale) <=
              options.rejoin_distance) {
            rejoin = static_cast<int>(c);
            break;
          }
        }
        EpisodeRecord slice = demo;
        slice.cycles.resize(rejoin + 1);
        const auto samples = extract_samples(slice, pool[t_idx]);
        augmented.insert(augmented.end(), samples.begin(), samples.end());
        recovered = true;
      }
      if (!recovered)
        record.diagnostics.push_back("expert failed to rejoin from rewinds on terrain " +
                                     std::to_string(t_idx));
    }
    record.augmented_samples = static_cast<int>(augmented.size());
    run.iterations.push_back(record);

    if (failures.empty()) break;  // fixed point: nothing to demonstrate
    if (augmented.empty()) break;
    run.dataset.insert(run.dataset.end(), augmented.begin(), augmented.end());
    if (prev_rate >= 0.0 && record.success_rate < prev_rate + options.min_improvement &&
        iter + 1 < options.max_iterations && iter > 0)
      break;
    prev_rate = record.success_rate;
  }
  return run;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
  return v;
}

json sample_to_json(const OracleSample& s) {
  json j;
  j["swing"] = to_string(s.swing_flag);
  j["x0"] = vec_to_json(s.x0);
  j["p0"] = {s.p0.x(), s.p0.y(), s.p0.z()};
  json surfaces = json::array();
  for (const auto& surf : s.surfaces) {
    json sv = json::array();
    for (const Vec3& v : surf) sv.push_back({v.x(), v.y(), v.z()});
    surfaces.push_back(sv);
  }
  j["surfaces"] = surfaces;
  j["goal"] = {s.goal.x(), s.goal.y(), s.goal.z()};
  j["x_star"] = vec_to_json(s.x_star);
  j["alpha"] = {s.alpha(0), s.alpha(1)};
  j["timings"] = {s.timings[0], s.timings[1], s.timings[2]};
  return j;
}

OracleSample sample_from_json(const json& j) {
  OracleSample s;
  s.swing_flag = j.at("swing").get<std::string>() == "L" ? Foot::Left : Foot::Right;
  s.x0 = vec_from_json(j.at("x0"));
  const auto& p0 = j.at("p0");
  s.p0 = Vec3(p0[0], p0[1], p0[2]);
  const auto& surfaces = j.at("surfaces");
  for (int i = 0; i < OracleSample::kSurfaces; ++i)
    for (int v = 0; v < 4; ++v) {
      const auto& vert = surfaces[i][v];
      s.surfaces[i][v] = Vec3(vert[0], vert[1], vert[2]);
    }
  const auto& goal = j.at("goal");
  s.goal = Vec3(goal[0], goal[1], goal[2]);
  s.x_star = vec_from_json(j.at("x_star"));
  s.alpha = Eigen::Vector2d(j.at("alpha")[0], j.at("alpha")[1]);
  for (int i = 0; i < 3; ++i) s.timings[i] = j.at("timings")[i];
  return s;
}

}  // namespace

std::string dataset_to_json(const std::vector<OracleSample>& samples) {
  json j;
  j["schema_version"] = 1;
  j["samples"] = json::array();
  for (const OracleSample& s : samples) j["samples"].push_back(sample_to_json(s));
  return j.dump(2);
}

std::vector<OracleSample> dataset_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version").get<int>() != 1) throw StructuralError("unsupported dataset schema version");
  std::vector<OracleSample> out;
  for (const auto& js : j.at("samples")) out.push_back(sample_from_json(js));
  return out;
}

void save_dataset(const std::vector<OracleSample>& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write dataset file: " + path);
  out << dataset_to_json(samples) << "\n";
}

std::vector<OracleSample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open dataset file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return dataset_from_json(ss.str());
}

std::string model_to_json(const OracleModel& m) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = m.kind == OracleModel::Kind::Mlp ? "mlp" : "knn";
  j["hidden_widths"] = m.hidden_widths;
  j["k"] = m.k;
  json weights = json::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    json layer;
    layer["rows"] = m.weights[l].rows();
    layer["cols"] = m.weights[l].cols();
    layer["w"] = json::array();
    for (int i = 0; i < m.weights[l].size(); ++i) layer["w"].push_back(m.weights[l].data()[i]);
    layer["b"] = vec_to_json(m.biases[l]);
    weights.push_back(layer);
  }
  j["layers"] = weights;
  const auto matrix_json = [](const Eigen::MatrixXd& mat) {
    json out;
    out["rows"] = mat.rows();
    out["cols"] = mat.cols();
    out["data"] = json::array();
    for (int i = 0; i < mat.size(); ++i) out["data"].push_back(mat.data()[i]);
    return out;
  };
  j["knn_inputs"] = matrix_json(m.knn_inputs);
  j["knn_targets"] = matrix_json(m.knn_targets);
  j["input_mean"] = vec_to_json(m.input_norm.mean);
  j["input_std"] = vec_to_json(m.input_norm.stddev);
  j["target_mean"] = vec_to_json(m.target_norm.mean);
  j["target_std"] = vec_to_json(m.target_norm.stddev);
  return j.dump();
}

OracleModel model_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version").get<int>() != 1) throw StructuralError("unsupported model schema version");
  OracleModel m;
  m.kind = j.at("kind").get<std::string>() == "mlp" ? OracleModel::Kind::Mlp : OracleModel::Kind::Knn;
  m.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
  m.k = j.at("k").get<int>();
  for (const auto& layer : j.at("layers")) {
    Eigen::MatrixXd w(layer.at("rows").get<int>(), layer.at("cols").get<int>());
    for (int i = 0; i < w.size(); ++i) w.data()[i] = layer.at("w")[i].get<double>();
    m.weights.push_back(std::move(w));
    m.biases.push_back(vec_from_json(layer.at("b")));
  }
  const auto matrix_from = [](const json& out) {
    Eigen::MatrixXd mat(out.at("rows").get<int>(), out.at("cols").get<int>());
    for (int i = 0; i < mat.size(); ++i) mat.data()[i] = out.at("data")[i].get<double>();
    return mat;
  };
  m.knn_inputs = matrix_from(j.at("knn_inputs"));
  m.knn_targets = matrix_from(j.at("knn_targets"));
  m.input_norm = {vec_from_json(j.at("input_mean")), vec_from_json(j.at("input_std"))};
  m.target_norm = {vec_from_json(j.at("target_mean")), vec_from_json(j.at("target_std"))};
  return m;
}

void save_model(const OracleModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write model file: " + path);
  out << model_to_json(model) << "\n";
}

OracleModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace stride
