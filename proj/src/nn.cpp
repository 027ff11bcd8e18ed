#include "cogsense/nn.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cogsense/personalize.hpp"

namespace cogsense {

namespace {

using Array = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

double sigmoid_scalar(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

constexpr char kMagic[8] = {'C', 'G', 'S', 'N', 'L', 'S', 'T', 'M'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    bits = std::bit_cast<std::uint64_t>(static_cast<double>(value));
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<std::uint8_t>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::uint8_t bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("truncated checkpoint");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelParams

ModelParams::ModelParams(ModelShape shape) : shape_(shape), data_(shape.parameter_count(), 0.0) {
  if (shape.input == 0 || shape.hidden == 0 || shape.dense == 0) {
    throw Error("model dimensions must be positive");
  }
}

ModelParams ModelParams::initialize(ModelShape shape, std::uint64_t seed) {
  ModelParams p(shape);
  Rng rng(seed);
  const double lstm_scale = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  auto fill = [&](auto&& block, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = u(rng);
  };
  for (int d = 0; d < 2; ++d) {
    fill(p.input_weights(d), lstm_scale);
    fill(p.recurrent_weights(d), lstm_scale);
    auto b = p.lstm_bias(d);
    b.setZero();
    b.segment(static_cast<Eigen::Index>(shape.hidden), static_cast<Eigen::Index>(shape.hidden))
        .setOnes();
  }
  fill(p.dense_weights(), 1.0 / std::sqrt(2.0 * static_cast<double>(shape.hidden)));
  p.dense_bias().setZero();
  fill(p.head_weights(), 1.0 / std::sqrt(static_cast<double>(shape.dense)));
  p.head_bias() = 0.0;
  return p;
}

ModelParams::MatrixMap ModelParams::input_weights(int d) {
  const auto H = static_cast<Eigen::Index>(shape_.hidden);
  return MatrixMap(data_.data() + offset_lstm(d), 4 * H, static_cast<Eigen::Index>(shape_.input));
}
ModelParams::MatrixMap ModelParams::recurrent_weights(int d) {
  const auto H = static_cast<Eigen::Index>(shape_.hidden);
  return MatrixMap(data_.data() + offset_lstm(d) + 4 * shape_.hidden * shape_.input, 4 * H, H);
}
ModelParams::VectorMap ModelParams::lstm_bias(int d) {
  const auto H = static_cast<Eigen::Index>(shape_.hidden);
  return VectorMap(data_.data() + offset_lstm(d) + 4 * shape_.hidden * (shape_.input + shape_.hidden),
                   4 * H);
}
ModelParams::MatrixMap ModelParams::dense_weights() {
  return MatrixMap(data_.data() + offset_dense(), static_cast<Eigen::Index>(shape_.dense),
                   static_cast<Eigen::Index>(2 * shape_.hidden));
}
ModelParams::VectorMap ModelParams::dense_bias() {
  return VectorMap(data_.data() + offset_dense() + 2 * shape_.hidden * shape_.dense,
                   static_cast<Eigen::Index>(shape_.dense));
}
ModelParams::VectorMap ModelParams::head_weights() {
  return VectorMap(data_.data() + offset_dense() + 2 * shape_.hidden * shape_.dense + shape_.dense,
                   static_cast<Eigen::Index>(shape_.dense));
}
double& ModelParams::head_bias() { return data_.back(); }

ModelParams::ConstMatrixMap ModelParams::input_weights(int d) const {
  const auto H = static_cast<Eigen::Index>(shape_.hidden);
  return ConstMatrixMap(data_.data() + offset_lstm(d), 4 * H, static_cast<Eigen::Index>(shape_.input));
}
ModelParams::ConstMatrixMap ModelParams::recurrent_weights(int d) const {
  const auto H = static_cast<Eigen::Index>(shape_.hidden);
  return ConstMatrixMap(data_.data() + offset_lstm(d) + 4 * shape_.hidden * shape_.input, 4 * H, H);
}
ModelParams::ConstVectorMap ModelParams::lstm_bias(int d) const {
  const auto H = static_cast<Eigen::Index>(shape_.hidden);
  return ConstVectorMap(
      data_.data() + offset_lstm(d) + 4 * shape_.hidden * (shape_.input + shape_.hidden), 4 * H);
}
ModelParams::ConstMatrixMap ModelParams::dense_weights() const {
  return ConstMatrixMap(data_.data() + offset_dense(), static_cast<Eigen::Index>(shape_.dense),
                        static_cast<Eigen::Index>(2 * shape_.hidden));
}
ModelParams::ConstVectorMap ModelParams::dense_bias() const {
  return ConstVectorMap(data_.data() + offset_dense() + 2 * shape_.hidden * shape_.dense,
                        static_cast<Eigen::Index>(shape_.dense));
}
ModelParams::ConstVectorMap ModelParams::head_weights() const {
  return ConstVectorMap(
      data_.data() + offset_dense() + 2 * shape_.hidden * shape_.dense + shape_.dense,
      static_cast<Eigen::Index>(shape_.dense));
}
double ModelParams::head_bias() const { return data_.back(); }

void ModelParams::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool ModelParams::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Forward / backward

Vector forward(const ModelParams& params, std::span<const Matrix* const> batch, DropoutMode dropout,
               ForwardCache* cache) {
  if (batch.empty()) throw Error("forward needs a nonempty batch");
  const auto& shape = params.shape();
  const auto B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index T = batch.front()->rows();
  const auto F = static_cast<Eigen::Index>(shape.input);
  const auto H = static_cast<Eigen::Index>(shape.hidden);
  if (T == 0) throw Error("forward needs at least one time step");
  for (const Matrix* x : batch) {
    if (x->cols() != F || x->rows() != T) {
      std::ostringstream msg;
      msg << "input shape " << x->rows() << "x" << x->cols() << " does not match model (" << T
          << "x" << F << ")";
      throw Error(msg.str());
    }
  }

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.batch = static_cast<std::size_t>(B);
  c.steps = static_cast<std::size_t>(T);
  c.pooled = Matrix::Zero(B, 2 * H);

  for (int dir = 0; dir < 2; ++dir) {
    auto& d = c.directions[static_cast<std::size_t>(dir)];
    d.inputs.resize(T * B, F);
    for (Eigen::Index s = 0; s < T; ++s) {
      const Eigen::Index t = dir == 0 ? s : T - 1 - s;
      for (Eigen::Index b = 0; b < B; ++b) d.inputs.row(s * B + b) = batch[static_cast<std::size_t>(b)]->row(t);
    }
    const auto wx = params.input_weights(dir);
    const auto wh = params.recurrent_weights(dir);
    const auto bias = params.lstm_bias(dir);
    d.gates.noalias() = d.inputs * wx.transpose();
    d.gates.rowwise() += bias.transpose();
    d.cells.resize(T * B, H);
    d.hidden.resize(T * B, H);
    for (Eigen::Index s = 0; s < T; ++s) {
      auto z = d.gates.middleRows(s * B, B);
      if (s > 0) z.noalias() += d.hidden.middleRows((s - 1) * B, B) * wh.transpose();
      z.leftCols(2 * H) = sigmoid(z.leftCols(2 * H).array()).matrix();
      z.middleCols(2 * H, H) = z.middleCols(2 * H, H).array().tanh().matrix();
      z.rightCols(H) = sigmoid(z.rightCols(H).array()).matrix();
      auto cell = d.cells.middleRows(s * B, B);
      cell = z.leftCols(H).cwiseProduct(z.middleCols(2 * H, H));
      if (s > 0) cell += z.middleCols(H, H).cwiseProduct(d.cells.middleRows((s - 1) * B, B));
      d.hidden.middleRows(s * B, B) = z.rightCols(H).cwiseProduct(cell.array().tanh().matrix());
      c.pooled.middleCols(dir * H, H) += d.hidden.middleRows(s * B, B);
    }
  }
  c.pooled /= static_cast<double>(T);

  c.dense_pre.noalias() = c.pooled * params.dense_weights().transpose();
  c.dense_pre.rowwise() += params.dense_bias().transpose();
  c.dense_out = c.dense_pre.cwiseMax(0.0);
  if (dropout.rng && dropout.rate > 0.0) {
    std::bernoulli_distribution keep(1.0 - dropout.rate);
    const double scale = 1.0 / (1.0 - dropout.rate);
    c.dropout_mask.resize(c.dense_out.rows(), c.dense_out.cols());
    for (Eigen::Index i = 0; i < c.dropout_mask.size(); ++i) {
      c.dropout_mask.data()[i] = keep(*dropout.rng) ? scale : 0.0;
    }
    c.dense_out = c.dense_out.cwiseProduct(c.dropout_mask);
  } else {
    c.dropout_mask.resize(0, 0);
  }
  c.logits = c.dense_out * params.head_weights();
  c.logits.array() += params.head_bias();
  Vector probs(B);
  for (Eigen::Index b = 0; b < B; ++b) probs[b] = sigmoid_scalar(c.logits[b]);
  return probs;
}

double forward_one(const ModelParams& params, const Matrix& x) {
  const Matrix* batch[] = {&x};
  return forward(params, batch)[0];
}

void backward(const ModelParams& params, const ForwardCache& c, const Vector& dlogits,
              ModelParams& grads) {
  const auto B = static_cast<Eigen::Index>(c.batch);
  const auto T = static_cast<Eigen::Index>(c.steps);
  const auto H = static_cast<Eigen::Index>(params.shape().hidden);
  if (dlogits.size() != B) throw Error("gradient batch size mismatch");

  grads.head_weights().noalias() += c.dense_out.transpose() * dlogits;
  grads.head_bias() += dlogits.sum();

  Matrix d_dense = dlogits * params.head_weights().transpose();
  if (c.dropout_mask.size() > 0) d_dense = d_dense.cwiseProduct(c.dropout_mask);
  d_dense = (c.dense_pre.array() > 0.0).select(d_dense, 0.0);
  grads.dense_weights().noalias() += d_dense.transpose() * c.pooled;
  grads.dense_bias() += d_dense.colwise().sum().transpose();
  const Matrix d_pooled = (d_dense * params.dense_weights()) / static_cast<double>(T);

  Matrix dz(T * B, 4 * H);
  Matrix dh_next = Matrix::Zero(B, H);
  Matrix dc_next = Matrix::Zero(B, H);
  for (int dir = 0; dir < 2; ++dir) {
    const auto& d = c.directions[static_cast<std::size_t>(dir)];
    const auto wh = params.recurrent_weights(dir);
    const auto d_out = d_pooled.middleCols(dir * H, H);
    dh_next.setZero();
    dc_next.setZero();
    auto g_wh = grads.recurrent_weights(dir);
    for (Eigen::Index s = T; s-- > 0;) {
      const auto gates = d.gates.middleRows(s * B, B).array();
      const auto in = gates.leftCols(H);
      const auto forget = gates.middleCols(H, H);
      const auto cand = gates.middleCols(2 * H, H);
      const auto out = gates.rightCols(H);
      const Array tanh_c = d.cells.middleRows(s * B, B).array().tanh();

      const Array dh = (d_out + dh_next).array();
      Array dc = dh * out * (1.0 - tanh_c.square()) + dc_next.array();
      auto dzs = dz.middleRows(s * B, B);
      dzs.leftCols(H) = (dc * cand * in * (1.0 - in)).matrix();
      if (s > 0) {
        dzs.middleCols(H, H) =
            (dc * d.cells.middleRows((s - 1) * B, B).array() * forget * (1.0 - forget)).matrix();
      } else {
        dzs.middleCols(H, H).setZero();
      }
      dzs.middleCols(2 * H, H) = (dc * in * (1.0 - cand.square())).matrix();
      dzs.rightCols(H) = (dh * tanh_c * out * (1.0 - out)).matrix();
      dc_next = (dc * forget).matrix();
      dh_next.noalias() = dzs * wh;
      if (s > 0) g_wh.noalias() += dzs.transpose() * d.hidden.middleRows((s - 1) * B, B);
    }
    grads.input_weights(dir).noalias() += dz.transpose() * d.inputs;
    grads.lstm_bias(dir) += dz.colwise().sum().transpose();
  }
}

Eigen::RowVectorXd mean_pool(const Matrix& steps) {
  return steps.colwise().sum() / static_cast<double>(steps.rows());
}

// ---------------------------------------------------------------------------
// Loss

ClassWeights ClassWeights::balanced(std::span<const int> labels) {
  const auto n = static_cast<double>(labels.size());
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = n - pos;
  if (pos == 0.0 || neg == 0.0) return {};
  return {n / (2.0 * neg), n / (2.0 * pos)};
}

double smoothed_target(int label, double smoothing) {
  return static_cast<double>(label) * (1.0 - smoothing) + smoothing / 2.0;
}

double loss(double prob, int label, const ClassWeights& cw, double smoothing, double sample_weight) {
  const double y = smoothed_target(label, smoothing);
  return -cw.of(label) * sample_weight * (y * std::log(prob) + (1.0 - y) * std::log1p(-prob));
}

double loss_from_logit(double logit, int label, const ClassWeights& cw, double smoothing,
                       double sample_weight) {
  const double y = smoothed_target(label, smoothing);
  // -ln p = softplus(-z), -ln(1 - p) = softplus(z)
  return cw.of(label) * sample_weight * (y * softplus(-logit) + (1.0 - y) * softplus(logit));
}

double loss_gradient(double logit, int label, const ClassWeights& cw, double smoothing,
                     double sample_weight) {
  return cw.of(label) * sample_weight * (sigmoid_scalar(logit) - smoothed_target(label, smoothing));
}

// ---------------------------------------------------------------------------
// Optimizer

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               const AdamConfig& config) {
  auto p = params.values();
  const auto g = grads.values();
  if (g.size() != p.size() || state.first_moment.size() != p.size()) {
    throw Error("optimizer state does not match parameter count");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g[i];
    v = config.beta2 * v + (1.0 - config.beta2) * g[i] * g[i];
    p[i] -= lr * (m / c1) / (std::sqrt(v / c2) + config.epsilon);
  }
}

// ---------------------------------------------------------------------------
// Training

std::size_t steps_per_epoch(std::size_t samples, std::size_t batch_size) {
  return (samples + batch_size - 1) / batch_size;
}

std::vector<double> batch_coefficients(std::span<const double> raw_weights, std::size_t batch,
                                       bool batch_softmax) {
  if (raw_weights.empty()) return std::vector<double>(batch, 1.0 / static_cast<double>(batch));
  if (batch_softmax) return batch_reweight(raw_weights);
  std::vector<double> out(raw_weights.begin(), raw_weights.end());
  for (auto& w : out) w /= static_cast<double>(batch);
  return out;
}

TrainResult train(const TrainingSet& data, const TrainConfig& config, const BatchObserver& observer) {
  const std::size_t n = data.inputs.size();
  if (n == 0) throw Error("cannot train on an empty dataset");
  if (data.labels.size() != n) throw Error("label count does not match input count");
  if (!data.weights.empty() && data.weights.size() != n) {
    throw Error("weight count does not match input count");
  }
  if (!(config.learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (config.label_smoothing < 0.0 || config.label_smoothing >= 1.0) {
    throw Error("label smoothing must lie in [0, 1)");
  }
  if (config.dropout < 0.0 || config.dropout >= 1.0) throw Error("dropout must lie in [0, 1)");
  if (config.batch_size == 0) throw Error("batch size must be positive");

  const ModelShape shape{static_cast<std::size_t>(data.inputs.front()->cols()), config.hidden,
                         config.dense};
  TrainResult result;
  result.params = ModelParams::initialize(shape, derive_seed(config.seed, {0x1417}));
  result.class_weights = ClassWeights::balanced(data.labels);
  ModelParams grads(shape);
  AdamState state(shape.parameter_count());
  Rng rng(derive_seed(config.seed, {0x5eed}));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<const Matrix*> batch_inputs;
  std::vector<double> batch_weights;
  ForwardCache cache;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      if (observer) observer(idx);
      batch_inputs.clear();
      batch_weights.clear();
      for (auto i : idx) {
        batch_inputs.push_back(data.inputs[i]);
        if (!data.weights.empty()) batch_weights.push_back(data.weights[i]);
      }
      forward(result.params, batch_inputs, DropoutMode{config.dropout, &rng}, &cache);
      const auto coeff = batch_coefficients(batch_weights, idx.size(), config.batch_softmax);
      Vector dlogits(static_cast<Eigen::Index>(idx.size()));
      double batch_loss = 0.0;
      for (std::size_t b = 0; b < idx.size(); ++b) {
        const double z = cache.logits[static_cast<Eigen::Index>(b)];
        const int y = data.labels[idx[b]];
        batch_loss += loss_from_logit(z, y, result.class_weights, config.label_smoothing, coeff[b]);
        dlogits[static_cast<Eigen::Index>(b)] =
            loss_gradient(z, y, result.class_weights, config.label_smoothing, coeff[b]);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "training diverged: non-finite loss at epoch " << epoch << ", step "
            << result.steps << " (batch of " << idx.size() << ", lr " << config.learning_rate << ")";
        throw Error(msg.str());
      }
      grads.set_zero();
      backward(result.params, cache, dlogits, grads);
      adam_step(result.params, grads, state, config.learning_rate, config.adam);
      ++result.steps;
      epoch_loss += batch_loss;
      ++batches;
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
  }
  if (!result.params.all_finite()) throw Error("training produced non-finite parameters");
  return result;
}

std::vector<double> predict(const ModelParams& params, std::span<const Matrix* const> inputs,
                            std::size_t chunk) {
  std::vector<double> out;
  out.reserve(inputs.size());
  chunk = std::max<std::size_t>(chunk, 1);
  for (std::size_t start = 0; start < inputs.size(); start += chunk) {
    const std::size_t stop = std::min(inputs.size(), start + chunk);
    const Vector p = forward(params, inputs.subspan(start, stop - start));
    out.insert(out.end(), p.data(), p.data() + p.size());
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& file, const ModelParams& params) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + file.string());
  out.write(kMagic, sizeof kMagic);
  write_le<std::uint32_t>(out, kCheckpointVersion);
  write_le<std::uint64_t>(out, params.shape().input);
  write_le<std::uint64_t>(out, params.shape().hidden);
  write_le<std::uint64_t>(out, params.shape().dense);
  write_le<std::uint64_t>(out, params.values().size());
  for (double v : params.values()) write_le<double>(out, v);
  if (!out) throw Error("failed writing checkpoint " + file.string());
}

ModelParams load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read checkpoint " + file.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw Error(file.string() + ": not a model checkpoint");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(file.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  ModelShape shape;
  shape.input = read_le<std::uint64_t>(in);
  shape.hidden = read_le<std::uint64_t>(in);
  shape.dense = read_le<std::uint64_t>(in);
  const auto count = read_le<std::uint64_t>(in);
  ModelParams p(shape);
  if (count != p.values().size()) throw Error(file.string() + ": parameter count mismatch");
  for (auto& v : p.values()) v = read_le<double>(in);
  return p;
}

}  // namespace cogsense
