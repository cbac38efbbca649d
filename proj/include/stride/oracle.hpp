#pragma once

#include "stride/rhp.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stride {

// ---------------------------------------------------------------------------
// Samples

/// One supervised datapoint. All spatial quantities are expressed in the
/// stance foot's surface-anchored frame, so encodings are invariant under
/// rigid transforms of the whole scene.
struct OracleSample {
  static constexpr int kPreviewSteps = 3;  // landing surface plus two ahead
  static constexpr int kSurfaces = 2 + kPreviewSteps;

  Foot swing_flag = Foot::Left;
  Vec9 x0 = Vec9::Zero();
  Vec3 p0 = Vec3::Zero();  // initial swing-foot position
  std::array<std::array<Vec3, 4>, kSurfaces> surfaces{};
  Vec3 goal = Vec3::Zero();  // goal CoM position

  Vec9 x_star = Vec9::Zero();
  Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
  std::array<double, 3> timings{};  // cumulative phase end times

  static constexpr int kInputDim = 1 + 9 + 3 + kSurfaces * 12 + 3;
  static constexpr int kTargetDim = 9 + 2 + 3;

  /// [delta, x0, p0, preview vertices, goal]
  Eigen::VectorXd input_vector() const;
  /// [x_star, alpha, positive timing increments]
  Eigen::VectorXd target_vector() const;
};

/// World-frame ingredients of one sample.
struct SceneView {
  Foot swing_foot = Foot::Left;
  CentroidalState x0;
  Vec3 swing_position = Vec3::Zero();
  Footstep stance;
  ContactSurface stance_surface;
  std::array<ContactSurface, OracleSample::kSurfaces> preview;
  Vec3 goal_com = Vec3::Zero();
};

struct SampleTargets {
  CentroidalState x_star;
  Vec3 footstep = Vec3::Zero();  // world position, must lie on preview[2]
  std::array<double, 3> timings{};
};

/// Builds the preview window for a cycle: both stance surfaces, then the
/// next kPreviewSteps landing surfaces (final surface repeated past the end).
SceneView scene_view(const CycleSituation& situation, const Terrain& terrain);

/// Frame-normalizes a scene (and targets, when present) into a sample.
/// Throws StructuralError when the target footstep is off its surface by
/// more than 1e-6 m.
OracleSample encode_sample(const SceneView& scene, const SampleTargets* targets);

/// One sample per converged cycle of a full-model episode.
std::vector<OracleSample> extract_samples(const EpisodeRecord& episode, const Terrain& terrain);

// ---------------------------------------------------------------------------
// Models

struct Normalization {
  Eigen::VectorXd mean, stddev;
};

struct OraclePrediction {
  CentroidalState x_star;  // stance frame
  Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
  std::array<double, 3> timings{};  // cumulative, strictly increasing
};

struct OracleModel {
  enum class Kind { Mlp, Knn };
  Kind kind = Kind::Mlp;

  // MLP: hidden widths, ReLU activations, linear output
  std::vector<int> hidden_widths{64, 64, 64};
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  // k-NN: stored dataset (inputs normalized, targets raw)
  int k = 1;
  Eigen::MatrixXd knn_inputs;
  Eigen::MatrixXd knn_targets;

  Normalization input_norm, target_norm;

  /// Raw (denormalized) target vector before decoding.
  Eigen::VectorXd predict_raw(const Eigen::VectorXd& input) const;
};

/// Clamps alpha to [0,1], timing increments to a small positive floor, and
/// accumulates the increments into strictly increasing switch times.
OraclePrediction decode_targets(const Eigen::VectorXd& raw);

OraclePrediction predict(const OracleModel& model, const OracleSample& input);

OracleModel make_knn(const std::vector<OracleSample>& dataset, int k = 1);

struct TrainOptions {
  std::vector<int> hidden_widths{64, 64, 64};  // desk preset; the full-size oracle uses 4 x 256
  int epochs = 400;
  int batch_size = 16;
  double step_size = 1e-2;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  std::vector<double>* validation_history = nullptr;
};

/// Mini-batch SGD on the normalized mean-squared error; deterministic per
/// seed; returns the parameters with the best validation loss.
OracleModel train_mlp(const std::vector<OracleSample>& dataset, const TrainOptions& options);

/// Mean-squared error over normalized targets plus its gradient in the flat
/// parameter vector (test hook for derivative checks).
double mlp_loss_and_gradient(const OracleModel& model, const Eigen::MatrixXd& inputs_normalized,
                             const Eigen::MatrixXd& targets_normalized, Eigen::VectorXd* gradient);
Eigen::VectorXd flatten_parameters(const OracleModel& model);
void set_parameters(OracleModel& model, const Eigen::VectorXd& flat);

// ---------------------------------------------------------------------------
// Short-horizon interface

/// Converts a stance-frame prediction into world-frame guidance.
LgGuidance decode_guidance(const OraclePrediction& prediction, const CycleSituation& situation,
                           const Terrain& terrain, double epsilon);

/// Execution-horizon-only transcription steered by the prediction: terminal
/// cost on (x_star, p_star) and timing windows (1 +/- epsilon) * t_tilde.
TranscribedProblem build_lg_problem(const OraclePrediction& prediction, double epsilon,
                                    const CycleSituation& situation, const Terrain& terrain,
                                    const TranscriptionOptions& options = {});

/// Engine hook: encodes the situation, queries the model, decodes guidance.
LgPredictor make_lg_predictor(const OracleModel& model, double epsilon);

// ---------------------------------------------------------------------------
// Incremental training (recovery actions)

struct IncrementalOptions {
  TrainOptions train;
  RhpConfig lg_config;      // rollout config; the oracle predictor is injected per iteration
  RhpConfig expert_config;  // full-model expert (3-step prediction horizon)
  int max_iterations = 5;
  double rejoin_distance = 0.05;  // normalized state units
  double min_improvement = 0.01;  // success-rate points (1 pp)
  double epsilon = 0.6;
};

struct TrainingIteration {
  int index = 0;
  double validation_loss = 0.0;
  double success_rate = 0.0;
  int dataset_size = 0;      // |D| used for this iteration
  int augmented_samples = 0; // |D*_i| gathered after the rollout
  std::vector<std::string> diagnostics;
};

struct TrainingRun {
  std::vector<OracleSample> dataset;  // aggregate D0 u D*_1 u ...
  std::vector<TrainingIteration> iterations;
  OracleModel final_model;
};

/// Trains on the aggregate dataset, rolls out LG-RHP on the pool, and for
/// each failure rewinds 1-3 cycles and lets the expert demonstrate recovery
/// until it rejoins the expert's own rollout on that terrain.
TrainingRun incremental_train(const std::vector<OracleSample>& initial_dataset,
                              const std::vector<Terrain>& pool, const IncrementalOptions& options);

// ---------------------------------------------------------------------------
// Serialization (JSON, schema-versioned, byte-exact round trip)

std::string dataset_to_json(const std::vector<OracleSample>& samples);
std::vector<OracleSample> dataset_from_json(const std::string& text);
void save_dataset(const std::vector<OracleSample>& samples, const std::string& path);
std::vector<OracleSample> load_dataset(const std::string& path);

std::string model_to_json(const OracleModel& model);
OracleModel model_from_json(const std::string& text);
void save_model(const OracleModel& model, const std::string& path);
OracleModel load_model(const std::string& path);

}  // namespace stride
