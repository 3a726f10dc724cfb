#include "sclarsim/neuralnet.hpp"

#include <cmath>
#include <stdexcept>

namespace sclarsim {

Tensor Tensor::vector(std::size_t n, double fill) {
  return Tensor({n}, std::vector<double>(n, fill));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, fill));
}

Tensor Tensor::from(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape_.empty()) return 0;
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() < 2) return rank() == 1 ? 1 : 0;
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  if (rank() != 2) throw std::logic_error("Tensor::at(r,c): tensor is not rank-2");
  if (r >= shape_[0] || c >= shape_[1]) throw std::out_of_range("Tensor::at(r,c)");
  return data_[r * shape_[1] + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return const_cast<Tensor*>(this)->at(r, c);
}

void Tensor::check_finite(const char* context) const {
  for (double v : data_)
    if (!std::isfinite(v))
      throw std::runtime_error(std::string("non-finite value in ") + context);
}

namespace {

double activate(double x, Activation act) {
  return act == Activation::relu ? (x > 0.0 ? x : 0.0) : x;
}

double activate_grad(double preact, Activation act) {
  return act == Activation::relu ? (preact > 0.0 ? 1.0 : 0.0) : 1.0;
}

}  // namespace

Tensor dense_forward(const Tensor& x, const DenseLayer& layer) {
  if (x.rank() != 1 || x.size() != layer.in_width())
    throw std::invalid_argument("dense_forward: input width mismatch");
  Tensor out = Tensor::vector(layer.out_width());
  const auto& w = layer.weights.data();
  const std::size_t in = layer.in_width();
  for (std::size_t r = 0; r < layer.out_width(); ++r) {
    double acc = layer.bias.at(r);
    const double* row = w.data() + r * in;
    for (std::size_t c = 0; c < in; ++c) acc += row[c] * x.at(c);
    out.at(r) = activate(acc, layer.activation);
  }
  out.check_finite("dense_forward");
  return out;
}

Tensor resblock_forward(const Tensor& x, const ResidualBlock& block) {
  if (block.layers.empty()) throw std::invalid_argument("resblock_forward: empty block");
  if (block.layers.front().in_width() != x.size() ||
      block.layers.back().out_width() != x.size())
    throw std::invalid_argument("resblock_forward: block width must match input width");
  Tensor h = x;
  for (const auto& layer : block.layers) h = dense_forward(h, layer);
  for (std::size_t i = 0; i < h.size(); ++i) h.at(i) += x.at(i);
  return h;
}

namespace {

DenseLayer init_dense(std::size_t out, std::size_t in, Activation act, RngStream& stream) {
  DenseLayer layer;
  layer.weights = Tensor::matrix(out, in);
  layer.bias = Tensor::vector(out);
  layer.activation = act;
  const double limit = std::sqrt(6.0 / static_cast<double>(in));
  for (auto& w : layer.weights.data()) w = stream.uniform(-limit, limit);
  return layer;
}

}  // namespace

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_layer(*this, [&n](const DenseLayer& l) { n += l.weights.size() + l.bias.size(); });
  return n;
}

ModelParams init_model(const ModelArchitecture& arch, RngStream& stream) {
  if (arch.input_width == 0) throw std::invalid_argument("init_model: input_width must be > 0");
  if (arch.output_width == 0) throw std::invalid_argument("init_model: output_width must be > 0");
  if (arch.residual_blocks > 0 && arch.stem_width == 0)
    throw std::invalid_argument("init_model: residual blocks require a stem to anchor their width");

  ModelParams params;
  params.arch = arch;
  std::size_t width = arch.input_width;
  if (arch.stem_width > 0) {
    params.stem.push_back(init_dense(arch.stem_width, width, Activation::relu, stream));
    width = arch.stem_width;
  }
  for (std::size_t b = 0; b < arch.residual_blocks; ++b) {
    ResidualBlock block;
    for (std::size_t l = 0; l < arch.layers_per_block; ++l)
      block.layers.push_back(init_dense(width, width, Activation::relu, stream));
    params.blocks.push_back(std::move(block));
  }
  for (std::size_t h : arch.head_widths) {
    params.head.push_back(init_dense(h, width, Activation::relu, stream));
    width = h;
  }
  params.output = init_dense(arch.output_width, width, Activation::identity, stream);
  return params;
}

void for_each_layer(ModelParams& params, const std::function<void(DenseLayer&)>& fn) {
  for (auto& l : params.stem) fn(l);
  for (auto& b : params.blocks)
    for (auto& l : b.layers) fn(l);
  for (auto& l : params.head) fn(l);
  fn(params.output);
}

void for_each_layer(const ModelParams& params, const std::function<void(const DenseLayer&)>& fn) {
  for (const auto& l : params.stem) fn(l);
  for (const auto& b : params.blocks)
    for (const auto& l : b.layers) fn(l);
  for (const auto& l : params.head) fn(l);
  fn(params.output);
}

void for_each_layer_pair(ModelParams& a, const ModelParams& b,
                         const std::function<void(DenseLayer&, const DenseLayer&)>& fn) {
  if (!(a.arch == b.arch))
    throw std::invalid_argument("for_each_layer_pair: architecture mismatch");
  std::vector<DenseLayer*> lhs;
  for_each_layer(a, [&lhs](DenseLayer& l) { lhs.push_back(&l); });
  std::vector<const DenseLayer*> rhs;
  for_each_layer(b, [&rhs](const DenseLayer& l) { rhs.push_back(&l); });
  for (std::size_t i = 0; i < lhs.size(); ++i) fn(*lhs[i], *rhs[i]);
}

namespace {

// Shared single-layer forward used by the traced pass: records the input
// and preactivation, returns the activated output.
Tensor traced_dense(const Tensor& x, const DenseLayer& layer, ForwardTrace& trace) {
  if (x.rank() != 1 || x.size() != layer.in_width())
    throw std::invalid_argument("model_forward: layer input width mismatch");
  Tensor pre = Tensor::vector(layer.out_width());
  const auto& w = layer.weights.data();
  const std::size_t in = layer.in_width();
  for (std::size_t r = 0; r < layer.out_width(); ++r) {
    double acc = layer.bias.at(r);
    const double* row = w.data() + r * in;
    for (std::size_t c = 0; c < in; ++c) acc += row[c] * x.at(c);
    pre.at(r) = acc;
  }
  trace.layer_inputs.push_back(x);
  trace.preactivations.push_back(pre);
  Tensor out = Tensor::vector(layer.out_width());
  for (std::size_t r = 0; r < out.size(); ++r) out.at(r) = activate(pre.at(r), layer.activation);
  return out;
}

}  // namespace

Tensor model_forward(const ModelParams& params, const Tensor& state, ForwardTrace& trace) {
  if (state.rank() != 1 || state.size() != params.arch.input_width)
    throw std::invalid_argument("model_forward: state width does not match architecture input");
  trace.layer_inputs.clear();
  trace.preactivations.clear();

  Tensor h = state;
  for (const auto& layer : params.stem) h = traced_dense(h, layer, trace);
  for (const auto& block : params.blocks) {
    Tensor block_in = h;
    for (const auto& layer : block.layers) h = traced_dense(h, layer, trace);
    for (std::size_t i = 0; i < h.size(); ++i) h.at(i) += block_in.at(i);
  }
  for (const auto& layer : params.head) h = traced_dense(h, layer, trace);
  h = traced_dense(h, params.output, trace);
  h.check_finite("model_forward output");
  trace.output = h;
  return h;
}

Tensor model_forward(const ModelParams& params, const Tensor& state) {
  ForwardTrace trace;
  return model_forward(params, state, trace);
}

ModelGrads zero_grads(const ModelParams& params) {
  ModelGrads grads;
  for_each_layer(params, [&grads](const DenseLayer& l) {
    grads.weight_grads.push_back(Tensor::matrix(l.out_width(), l.in_width()));
    grads.bias_grads.push_back(Tensor::vector(l.out_width()));
  });
  return grads;
}

void ModelGrads::accumulate(const ModelGrads& other) {
  if (weight_grads.size() != other.weight_grads.size())
    throw std::invalid_argument("ModelGrads::accumulate: layer count mismatch");
  for (std::size_t i = 0; i < weight_grads.size(); ++i) {
    for (std::size_t j = 0; j < weight_grads[i].size(); ++j)
      weight_grads[i].data()[j] += other.weight_grads[i].data()[j];
    for (std::size_t j = 0; j < bias_grads[i].size(); ++j)
      bias_grads[i].data()[j] += other.bias_grads[i].data()[j];
  }
}

void ModelGrads::scale(double factor) {
  for (auto& t : weight_grads)
    for (auto& v : t.data()) v *= factor;
  for (auto& t : bias_grads)
    for (auto& v : t.data()) v *= factor;
}

namespace {

// Backpropagates through one dense layer. `upstream` is dL/d(output);
// returns dL/d(input) and fills the layer's gradient slot.
Tensor dense_backward(const DenseLayer& layer, const Tensor& input, const Tensor& preact,
                      const Tensor& upstream, Tensor& w_grad, Tensor& b_grad) {
  const std::size_t in = layer.in_width();
  const std::size_t out = layer.out_width();
  Tensor down = Tensor::vector(in);
  for (std::size_t r = 0; r < out; ++r) {
    const double delta = upstream.at(r) * activate_grad(preact.at(r), layer.activation);
    b_grad.at(r) += delta;
    double* wg_row = w_grad.data().data() + r * in;
    const double* w_row = layer.weights.data().data() + r * in;
    for (std::size_t c = 0; c < in; ++c) {
      wg_row[c] += delta * input.at(c);
      down.at(c) += delta * w_row[c];
    }
  }
  return down;
}

}  // namespace

ModelGrads backward(const ModelParams& params, const ForwardTrace& trace,
                    const Tensor& output_grad) {
  // Layer order in the trace: stem, block layers, head, output.
  std::vector<const DenseLayer*> layers;
  for_each_layer(params, [&layers](const DenseLayer& l) { layers.push_back(&l); });
  if (trace.layer_inputs.size() != layers.size())
    throw std::logic_error("backward: trace does not match the model (missing forward record?)");
  if (output_grad.size() != params.output.out_width())
    throw std::invalid_argument("backward: output gradient width mismatch");

  ModelGrads grads = zero_grads(params);
  std::size_t idx = layers.size();

  auto back_layer = [&](const Tensor& upstream) {
    --idx;
    return dense_backward(*layers[idx], trace.layer_inputs[idx], trace.preactivations[idx],
                          upstream, grads.weight_grads[idx], grads.bias_grads[idx]);
  };

  Tensor up = back_layer(output_grad);                       // output layer
  for (std::size_t h = params.head.size(); h-- > 0;) up = back_layer(up);
  for (std::size_t b = params.blocks.size(); b-- > 0;) {
    // The identity skip adds the block's upstream gradient to whatever
    // flows back through the inner layers.
    const Tensor skip = up;
    for (std::size_t l = params.blocks[b].layers.size(); l-- > 0;) up = back_layer(up);
    for (std::size_t i = 0; i < up.size(); ++i) up.at(i) += skip.at(i);
  }
  for (std::size_t s = params.stem.size(); s-- > 0;) up = back_layer(up);
  return grads;
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) throw std::invalid_argument("mse_loss: shape mismatch");
  if (pred.size() == 0) throw std::invalid_argument("mse_loss: empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.at(i) - target.at(i);
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

AdamState init_adam(const ModelParams& params, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  for_each_layer(params, [&state](const DenseLayer& l) {
    state.m_weights.push_back(Tensor::matrix(l.out_width(), l.in_width()));
    state.v_weights.push_back(Tensor::matrix(l.out_width(), l.in_width()));
    state.m_bias.push_back(Tensor::vector(l.out_width()));
    state.v_bias.push_back(Tensor::vector(l.out_width()));
  });
  return state;
}

namespace {

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v, const AdamState& s,
                 double bc1, double bc2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * grad[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    param[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
  }
}

}  // namespace

void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state) {
  std::vector<DenseLayer*> layers;
  for_each_layer(params, [&layers](DenseLayer& l) { layers.push_back(&l); });
  if (layers.size() != grads.weight_grads.size())
    throw std::invalid_argument("adam_step: gradient layer count mismatch");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i]->weights.same_shape(grads.weight_grads[i]) ||
        !layers[i]->bias.same_shape(grads.bias_grads[i]))
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    adam_update(layers[i]->weights.data(), grads.weight_grads[i].data(),
                state.m_weights[i].data(), state.v_weights[i].data(), state, bc1, bc2);
    adam_update(layers[i]->bias.data(), grads.bias_grads[i].data(), state.m_bias[i].data(),
                state.v_bias[i].data(), state, bc1, bc2);
  }
}

void soft_update(ModelParams& target, const ModelParams& pred, double tau) {
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("soft_update: tau must lie in [0, 1]");
  for_each_layer_pair(target, pred, [tau](DenseLayer& t, const DenseLayer& p) {
    for (std::size_t i = 0; i < t.weights.size(); ++i)
      t.weights.data()[i] = (1.0 - tau) * t.weights.data()[i] + tau * p.weights.data()[i];
    for (std::size_t i = 0; i < t.bias.size(); ++i)
      t.bias.data()[i] = (1.0 - tau) * t.bias.data()[i] + tau * p.bias.data()[i];
  });
}

}  // namespace sclarsim
