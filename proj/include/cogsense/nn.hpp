#pragma once

// Sequence classifier: bidirectional LSTM -> mean over time -> dense ReLU
// with dropout -> sigmoid unit. Forward and backward passes run on whole
// batches; all arithmetic is double precision.

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "cogsense/rng.hpp"
#include "cogsense/sequence.hpp"

namespace cogsense {

struct ModelShape {
  std::size_t input = 0;
  std::size_t hidden = 256;  // per direction
  std::size_t dense = 256;

  std::size_t lstm_block() const { return 4 * hidden * input + 4 * hidden * hidden + 4 * hidden; }
  std::size_t parameter_count() const {
    return 2 * lstm_block() + dense * 2 * hidden + dense + dense + 1;
  }
  bool operator==(const ModelShape&) const = default;
};

/// Flat parameter storage with typed views. Gate order in every LSTM block
/// is (input, forget, cell, output).
class ModelParams {
 public:
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  ModelParams() = default;
  explicit ModelParams(ModelShape shape);  // all zeros

  /// LSTM weights uniform in +/- 1/sqrt(hidden), forget-gate bias 1, dense
  /// and head weights uniform in +/- 1/sqrt(fan_in), other biases 0.
  static ModelParams initialize(ModelShape shape, std::uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  // direction 0 = forward in time, 1 = backward
  MatrixMap input_weights(int direction);    // 4H x F
  MatrixMap recurrent_weights(int direction);  // 4H x H
  VectorMap lstm_bias(int direction);          // 4H
  MatrixMap dense_weights();                   // D x 2H
  VectorMap dense_bias();                      // D
  VectorMap head_weights();                    // D
  double& head_bias();

  ConstMatrixMap input_weights(int direction) const;
  ConstMatrixMap recurrent_weights(int direction) const;
  ConstVectorMap lstm_bias(int direction) const;
  ConstMatrixMap dense_weights() const;
  ConstVectorMap dense_bias() const;
  ConstVectorMap head_weights() const;
  double head_bias() const;

  void set_zero();
  bool all_finite() const;

  bool operator==(const ModelParams& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  std::size_t offset_lstm(int direction) const { return static_cast<std::size_t>(direction) * shape_.lstm_block(); }
  std::size_t offset_dense() const { return 2 * shape_.lstm_block(); }

  ModelShape shape_;
  std::vector<double> data_;
};

/// Activations kept by forward() for backward().
struct ForwardCache {
  std::size_t batch = 0;
  std::size_t steps = 0;
  struct Direction {
    Matrix inputs;  // (T*B) x F in processing order
    Matrix gates;   // (T*B) x 4H activated
    Matrix cells;   // (T*B) x H
    Matrix hidden;  // (T*B) x H
  };
  std::array<Direction, 2> directions;
  Matrix pooled;       // B x 2H
  Matrix dense_pre;    // B x D
  Matrix dense_out;    // B x D, after ReLU and dropout
  Matrix dropout_mask; // B x D (empty when inactive)
  Vector logits;       // B
};

struct DropoutMode {
  double rate = 0.0;
  Rng* rng = nullptr;  // null disables dropout

  static DropoutMode off() { return {}; }
};

/// Probabilities for a batch of equally shaped T x F sequences.
Vector forward(const ModelParams& params, std::span<const Matrix* const> batch,
               DropoutMode dropout = DropoutMode::off(), ForwardCache* cache = nullptr);

double forward_one(const ModelParams& params, const Matrix& x);

/// Accumulates gradients of sum_b dlogit[b] * logit[b] into `grads`.
void backward(const ModelParams& params, const ForwardCache& cache, const Vector& dlogits,
              ModelParams& grads);

/// Mean over time of per-step representations (rows). Exposed for tests.
Eigen::RowVectorXd mean_pool(const Matrix& steps);

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  double of(int label) const { return label == 1 ? positive : negative; }
  /// n / (2 n_y); both 1 when a class is absent.
  static ClassWeights balanced(std::span<const int> labels);
};

double smoothed_target(int label, double smoothing);

/// -c_y * w * [y' ln p + (1 - y') ln(1 - p)]
double loss(double prob, int label, const ClassWeights& class_weights, double smoothing,
            double sample_weight = 1.0);

/// Same loss from the logit, stable for saturated outputs.
double loss_from_logit(double logit, int label, const ClassWeights& class_weights,
                       double smoothing, double sample_weight = 1.0);

/// d loss / d logit
double loss_gradient(double logit, int label, const ClassWeights& class_weights,
                     double smoothing, double sample_weight = 1.0);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t n = 0) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               const AdamConfig& config = {});

struct TrainConfig {
  std::size_t hidden = 256;
  std::size_t dense = 256;
  double learning_rate = 5e-6;
  std::size_t batch_size = 128;
  std::size_t epochs = 30;
  double label_smoothing = 0.1;
  double dropout = 0.2;
  AdamConfig adam;
  std::uint64_t seed = 0;
  /// With sample weights: softmax them within each batch (true) or use w/B.
  bool batch_softmax = true;
};

struct TrainingSet {
  std::vector<const Matrix*> inputs;
  std::vector<int> labels;
  std::vector<double> weights;  // empty = unweighted
  std::vector<std::string> participant_ids;  // optional, reported to the batch observer
};

/// Called with the dataset indices of every batch before its update.
using BatchObserver = std::function<void(std::span<const std::size_t> batch)>;

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;
  std::size_t steps = 0;
  ClassWeights class_weights;
};

std::size_t steps_per_epoch(std::size_t samples, std::size_t batch_size);

/// Per-sample loss coefficients of one batch (sum of coefficients * losses = batch loss).
std::vector<double> batch_coefficients(std::span<const double> raw_weights, std::size_t batch,
                                       bool batch_softmax);

TrainResult train(const TrainingSet& data, const TrainConfig& config,
                  const BatchObserver& observer = {});

std::vector<double> predict(const ModelParams& params, std::span<const Matrix* const> inputs,
                            std::size_t chunk = 256);

/// Binary checkpoint: "CGSNLSTM", u32 version, u64 input/hidden/dense,
/// u64 count, then count little-endian doubles.
void save_checkpoint(const std::filesystem::path& file, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& file);

}  // namespace cogsense
