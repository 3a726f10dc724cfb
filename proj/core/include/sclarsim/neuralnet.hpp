#pragma once

// Minimal differentiable network stack: dense layers, ReLU, residual
// blocks with identity skips, reverse-mode gradients, MSE loss, Adam, and
// soft parameter blending. No external math dependencies; everything is
// plain contiguous doubles.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sclarsim/rng.hpp"

namespace sclarsim {

// Rank <= 2. Rank-2 data is row-major.
class Tensor {
 public:
  Tensor() = default;

  static Tensor vector(std::size_t n, double fill = 0.0);
  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor from(std::vector<double> values);  // rank-1

  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t i) { return data_.at(i); }
  double at(std::size_t i) const { return data_.at(i); }
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  const std::vector<std::size_t>& shape() const { return shape_; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // Throws std::runtime_error on NaN/Inf entries.
  void check_finite(const char* context) const;

 private:
  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {}

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

enum class Activation : std::uint8_t { relu = 0, identity = 1 };

struct DenseLayer {
  Tensor weights;  // out x in
  Tensor bias;     // out
  Activation activation = Activation::relu;

  std::size_t in_width() const { return weights.cols(); }
  std::size_t out_width() const { return weights.rows(); }
};

// activation(W x + b)
Tensor dense_forward(const Tensor& x, const DenseLayer& layer);

struct ResidualBlock {
  std::vector<DenseLayer> layers;  // equal input/output width end to end
};

// Inner composition applied to x, plus x (identity skip, no post-sum
// activation).
Tensor resblock_forward(const Tensor& x, const ResidualBlock& block);

struct ModelArchitecture {
  std::size_t input_width = 0;
  std::size_t stem_width = 32;       // 0 skips the stem entirely
  std::size_t residual_blocks = 5;   // each at stem_width
  std::size_t layers_per_block = 1;
  std::vector<std::size_t> head_widths = {128, 128};
  std::size_t output_width = 2;

  friend bool operator==(const ModelArchitecture&, const ModelArchitecture&) = default;
};

struct ModelParams {
  ModelArchitecture arch;
  std::vector<DenseLayer> stem;          // empty or one layer
  std::vector<ResidualBlock> blocks;
  std::vector<DenseLayer> head;
  DenseLayer output;                     // identity activation

  std::size_t parameter_count() const;
};

// He-style fan-in uniform initialization, seeded from `stream`.
ModelParams init_model(const ModelArchitecture& arch, RngStream& stream);

// Applies fn to every dense layer in traversal order (stem, block layers,
// head, output). Both params of for_each_layer_pair must share an
// architecture.
void for_each_layer(ModelParams& params, const std::function<void(DenseLayer&)>& fn);
void for_each_layer(const ModelParams& params, const std::function<void(const DenseLayer&)>& fn);
void for_each_layer_pair(ModelParams& a, const ModelParams& b,
                         const std::function<void(DenseLayer&, const DenseLayer&)>& fn);

// Recorded activations from one forward pass, consumed by backward().
struct ForwardTrace {
  std::vector<Tensor> layer_inputs;   // per dense layer, traversal order
  std::vector<Tensor> preactivations;
  Tensor output;
};

Tensor model_forward(const ModelParams& params, const Tensor& state);
Tensor model_forward(const ModelParams& params, const Tensor& state, ForwardTrace& trace);

// Gradients shaped exactly like the parameters.
struct ModelGrads {
  std::vector<Tensor> weight_grads;  // traversal order
  std::vector<Tensor> bias_grads;

  void accumulate(const ModelGrads& other);
  void scale(double factor);
};

ModelGrads zero_grads(const ModelParams& params);

// Reverse-mode pass; `output_grad` is dLoss/dOutput. Returns gradients for
// every weight and bias; the gradient w.r.t. the input is discarded.
ModelGrads backward(const ModelParams& params, const ForwardTrace& trace,
                    const Tensor& output_grad);

// Mean of squared differences over all entries.
double mse_loss(const Tensor& pred, const Tensor& target);

struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long step = 0;
  std::vector<Tensor> m_weights, v_weights;  // traversal order
  std::vector<Tensor> m_bias, v_bias;
};

AdamState init_adam(const ModelParams& params, double learning_rate = 0.001);

// Standard Adam with bias correction; increments the step counter.
void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state);

// target <- (1 - tau) * target + tau * pred, per parameter.
void soft_update(ModelParams& target, const ModelParams& pred, double tau);

}  // namespace sclarsim
