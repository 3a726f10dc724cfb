#include "sclarsim/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "sclarsim/checkpoint.hpp"

namespace sclarsim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
}

void ReplayBuffer::push(Experience e) {
  items_.push_back(std::move(e));
  if (items_.size() > capacity_) items_.pop_front();
}

std::optional<std::vector<Experience>> ReplayBuffer::sample(std::size_t n,
                                                            RngStream& stream) const {
  if (n == 0) throw std::invalid_argument("ReplayBuffer::sample: n must be > 0");
  if (items_.size() < n) return std::nullopt;
  // Partial Fisher-Yates over an index array.
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Experience> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + stream.uniform_index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    batch.push_back(items_[idx[i]]);
  }
  return batch;
}

EpsilonSchedule::EpsilonSchedule(double eps0, double eps_min, double decay_per_slot)
    : eps0_(eps0), eps_min_(eps_min), decay_(decay_per_slot), current_(eps0) {
  if (eps_min < 0.0 || eps0 < eps_min)
    throw std::invalid_argument("EpsilonSchedule: need 0 <= eps_min <= eps0");
  if (decay_per_slot <= 0.0 || decay_per_slot > 1.0)
    throw std::invalid_argument("EpsilonSchedule: decay must lie in (0, 1]");
}

EpsilonSchedule EpsilonSchedule::for_run(long long total_slots, double eps0, double eps_min,
                                         double fraction) {
  if (total_slots <= 0) throw std::invalid_argument("EpsilonSchedule::for_run: no slots");
  const double horizon = std::max(1.0, fraction * static_cast<double>(total_slots));
  const double decay =
      eps_min > 0.0 && eps0 > 0.0 ? std::pow(eps_min / eps0, 1.0 / horizon) : 1.0;
  return EpsilonSchedule(eps0, eps_min, std::min(1.0, decay));
}

void EpsilonSchedule::advance() { current_ = std::max(eps_min_, current_ * decay_); }

void EpsilonSchedule::restore(double current) {
  current_ = std::clamp(current, eps_min_, eps0_);
}

IueAction GreedyPolicy::operator()(const EnvState& state) const {
  const Tensor q = model_forward(params_, Tensor::from(state));
  std::size_t best = 0;
  for (std::size_t a = 1; a < q.size(); ++a)
    if (q.at(a) > q.at(best)) best = a;
  return best == 1 ? IueAction::dispatch : IueAction::hold;
}

QAgent::QAgent(ModelParams initial, DqnOptions options, RngStream exploration_stream,
               RngStream replay_stream)
    : pred_(initial),
      target_(std::move(initial)),
      options_(options),
      epsilon_(options.epsilon),
      buffer_(options.buffer_capacity),
      adam_(init_adam(pred_, options.learning_rate)),
      exploration_stream_(exploration_stream),
      replay_stream_(replay_stream) {
  if (options_.gamma < 0.0 || options_.gamma > 1.0)
    throw std::invalid_argument("QAgent: gamma must lie in [0, 1]");
  if (options_.batch_size == 0) throw std::invalid_argument("QAgent: batch_size must be > 0");
  if (options_.target_update_period <= 0)
    throw std::invalid_argument("QAgent: target_update_period must be > 0");
  if (pred_.arch.output_width < 2)
    throw std::invalid_argument("QAgent: model must emit at least one Q-value per action");
}

std::vector<double> QAgent::q_values(const EnvState& state) const {
  const Tensor q = model_forward(pred_, Tensor::from(state));
  return q.data();
}

IueAction QAgent::select_action(const EnvState& state) {
  const double eps = epsilon_.value();
  epsilon_.advance();
  if (exploration_stream_.uniform() < eps)
    return exploration_stream_.uniform_index(2) == 1 ? IueAction::dispatch : IueAction::hold;
  const Tensor q = model_forward(pred_, Tensor::from(state));
  // Argmax over the two actions, ties to the lowest index.
  return q.at(1) > q.at(0) ? IueAction::dispatch : IueAction::hold;
}

std::vector<double> QAgent::q_targets(const std::vector<Experience>& batch) const {
  if (batch.empty()) throw std::invalid_argument("q_targets: empty batch");
  const ModelParams& net =
      options_.bootstrap == BootstrapNet::prediction ? pred_ : target_;
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const auto& e : batch) {
    const Tensor q_next = model_forward(net, Tensor::from(e.next_state));
    double best = q_next.at(0);
    for (std::size_t a = 1; a < std::min<std::size_t>(q_next.size(), 2); ++a)
      best = std::max(best, q_next.at(a));
    targets.push_back(e.reward + options_.gamma * best);
  }
  return targets;
}

double QAgent::train_step(const std::vector<Experience>& batch) {
  if (batch.size() != options_.batch_size)
    throw std::invalid_argument("train_step: batch size mismatch");
  const std::vector<double> targets = q_targets(batch);

  ModelGrads grads = zero_grads(pred_);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& e = batch[i];
    if (e.action != 0 && e.action != 1)
      throw std::invalid_argument("train_step: action index out of range");
    ForwardTrace trace;
    const Tensor q = model_forward(pred_, Tensor::from(e.state), trace);
    const double pred_q = q.at(static_cast<std::size_t>(e.action));
    const double diff = pred_q - targets[i];
    loss += diff * diff * inv_n;
    // Only the taken action's output carries gradient.
    Tensor out_grad = Tensor::vector(q.size());
    out_grad.at(static_cast<std::size_t>(e.action)) = 2.0 * diff * inv_n;
    grads.accumulate(backward(pred_, trace, out_grad));
  }
  adam_step(pred_, grads, adam_);
  if (!std::isfinite(loss)) throw std::runtime_error("train_step: non-finite loss");
  return loss;
}

std::optional<double> QAgent::observe(Experience e) {
  buffer_.push(std::move(e));
  ++slots_seen_;
  if (slots_seen_ % options_.target_update_period == 0)
    soft_update(target_, pred_, options_.tau);
  auto batch = buffer_.sample(options_.batch_size, replay_stream_);
  if (!batch) return std::nullopt;
  return train_step(*batch);
}

void QAgent::save(std::ostream& out) const {
  ckpt::write_header(out, 2);
  ckpt::write_params_body(out, pred_);
  ckpt::write_params_body(out, target_);
  ckpt::write_f64(out, options_.gamma);
  ckpt::write_u64(out, options_.batch_size);
  ckpt::write_u64(out, options_.buffer_capacity);
  ckpt::write_u64(out, static_cast<std::uint64_t>(options_.target_update_period));
  ckpt::write_f64(out, options_.tau);
  ckpt::write_f64(out, options_.learning_rate);
  ckpt::write_u32(out, options_.bootstrap == BootstrapNet::prediction ? 0 : 1);
  ckpt::write_f64(out, epsilon_.initial());
  ckpt::write_f64(out, epsilon_.floor());
  ckpt::write_f64(out, epsilon_.decay());
  ckpt::write_f64(out, epsilon_.value());
  ckpt::write_u64(out, static_cast<std::uint64_t>(slots_seen_));
  ckpt::write_u64(out, static_cast<std::uint64_t>(adam_.step));
  ckpt::write_f64(out, adam_.learning_rate);
  for (const auto& group : {&adam_.m_weights, &adam_.v_weights, &adam_.m_bias, &adam_.v_bias})
    for (const auto& t : *group)
      for (double v : t.data()) ckpt::write_f64(out, v);
  if (!out) throw std::runtime_error("agent checkpoint: write failure");
}

QAgent QAgent::load(std::istream& in, RngStream exploration_stream, RngStream replay_stream) {
  if (ckpt::read_header(in) != 2)
    throw std::runtime_error("agent checkpoint: not an agent checkpoint");
  ModelParams pred = ckpt::read_params_body(in);
  ModelParams target = ckpt::read_params_body(in);

  DqnOptions options;
  options.gamma = ckpt::read_f64(in);
  options.batch_size = ckpt::read_u64(in);
  options.buffer_capacity = ckpt::read_u64(in);
  options.target_update_period = static_cast<int>(ckpt::read_u64(in));
  options.tau = ckpt::read_f64(in);
  options.learning_rate = ckpt::read_f64(in);
  options.bootstrap = ckpt::read_u32(in) == 0 ? BootstrapNet::prediction : BootstrapNet::target;
  const double eps0 = ckpt::read_f64(in);
  const double eps_min = ckpt::read_f64(in);
  const double decay = ckpt::read_f64(in);
  const double eps_now = ckpt::read_f64(in);
  options.epsilon = EpsilonSchedule(eps0, eps_min, decay);

  QAgent agent(std::move(pred), options, exploration_stream, replay_stream);
  agent.target_ = std::move(target);
  agent.epsilon_.restore(eps_now);
  agent.slots_seen_ = static_cast<long long>(ckpt::read_u64(in));
  agent.adam_.step = static_cast<long long>(ckpt::read_u64(in));
  agent.adam_.learning_rate = ckpt::read_f64(in);
  for (auto* group : {&agent.adam_.m_weights, &agent.adam_.v_weights, &agent.adam_.m_bias,
                      &agent.adam_.v_bias})
    for (auto& t : *group)
      for (auto& v : t.data()) v = ckpt::read_f64(in);
  return agent;
}

void QAgent::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("agent checkpoint: cannot open for writing: " + path);
  save(out);
}

QAgent QAgent::load_file(const std::string& path, RngStream exploration_stream,
                         RngStream replay_stream) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("agent checkpoint: cannot open: " + path);
  return load(in, exploration_stream, replay_stream);
}

void tabular_q_update(std::vector<std::vector<double>>& q_table, std::size_t s, std::size_t a,
                      double r, std::size_t s_next, double alpha, double gamma) {
  if (s >= q_table.size() || s_next >= q_table.size())
    throw std::out_of_range("tabular_q_update: state index out of range");
  if (a >= q_table[s].size()) throw std::out_of_range("tabular_q_update: action index out of range");
  double best_next = q_table[s_next].empty() ? 0.0 : q_table[s_next][0];
  for (double q : q_table[s_next]) best_next = std::max(best_next, q);
  q_table[s][a] += alpha * (r + gamma * best_next - q_table[s][a]);
}

}  // namespace sclarsim
