#pragma once

// The learning agent: FIFO replay buffer, epsilon-greedy exploration with
// exponential decay, target computation, training step, and greedy policy
// extraction. A tabular Q-learning update is kept alongside as a
// small-instance oracle.

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "sclarsim/env.hpp"
#include "sclarsim/neuralnet.hpp"
#include "sclarsim/rng.hpp"

namespace sclarsim {

struct Experience {
  EnvState state;
  int action = 0;  // 0 = hold, 1 = dispatch
  double reward = 0.0;
  EnvState next_state;
};

// Bounded FIFO queue; eviction is strictly oldest-first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000);

  void push(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const { return items_.at(i); }  // oldest first

  // n experiences uniformly without replacement; nullopt until the buffer
  // holds at least n (the caller skips training that slot).
  std::optional<std::vector<Experience>> sample(std::size_t n, RngStream& stream) const;

 private:
  std::size_t capacity_;
  std::deque<Experience> items_;
};

// epsilon_0 decaying multiplicatively per slot down to epsilon_min.
class EpsilonSchedule {
 public:
  EpsilonSchedule(double eps0 = 1.0, double eps_min = 0.001, double decay_per_slot = 1.0);

  // Decay rate chosen so epsilon reaches the floor after `fraction` of
  // `total_slots`.
  static EpsilonSchedule for_run(long long total_slots, double eps0 = 1.0,
                                 double eps_min = 0.001, double fraction = 0.8);

  double value() const { return current_; }
  double floor() const { return eps_min_; }
  double initial() const { return eps0_; }
  double decay() const { return decay_; }
  void advance();
  void restore(double current);  // checkpoint reload

 private:
  double eps0_;
  double eps_min_;
  double decay_;
  double current_;
};

enum class BootstrapNet : std::uint8_t {
  // Next-state max evaluated with the prediction network (the published
  // description); the target network is still maintained via soft updates.
  prediction = 0,
  // Conventional assignment: next-state max from the target network.
  target = 1,
};

struct DqnOptions {
  double gamma = 0.9;
  std::size_t batch_size = 32;
  std::size_t buffer_capacity = 1000;
  int target_update_period = 10;  // slots between soft updates
  double tau = 0.1;               // soft-update blend factor
  double learning_rate = 0.001;
  BootstrapNet bootstrap = BootstrapNet::prediction;
  EpsilonSchedule epsilon;
};

// Deterministic greedy policy over a frozen parameter snapshot.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(ModelParams params) : params_(std::move(params)) {}

  IueAction operator()(const EnvState& state) const;
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
};

class QAgent {
 public:
  QAgent(ModelParams initial, DqnOptions options, RngStream exploration_stream,
         RngStream replay_stream);

  // Epsilon-greedy: with probability epsilon a uniform action, otherwise
  // the argmax of the prediction network (ties to the lowest index).
  // Advances the epsilon schedule by one slot.
  IueAction select_action(const EnvState& state);

  // Deposit + periodic target update + one batch training step when the
  // buffer is ready. Returns the batch loss if a step ran.
  std::optional<double> observe(Experience e);

  std::vector<double> q_values(const EnvState& state) const;
  GreedyPolicy extract_policy() const { return GreedyPolicy(pred_); }

  const ModelParams& prediction_params() const { return pred_; }
  const ModelParams& target_params() const { return target_; }
  const DqnOptions& options() const { return options_; }
  const EpsilonSchedule& epsilon() const { return epsilon_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  long long slots_seen() const { return slots_seen_; }

  // Target values y = r + gamma * max_a' Q(s', a') for a batch; y is a
  // constant w.r.t. the trained parameters.
  std::vector<double> q_targets(const std::vector<Experience>& batch) const;

  // One gradient step on the batch: MSE over the taken actions' Q-values
  // against q_targets, followed by an Adam update of the prediction net.
  double train_step(const std::vector<Experience>& batch);

  void save(std::ostream& out) const;
  static QAgent load(std::istream& in, RngStream exploration_stream, RngStream replay_stream);
  void save_file(const std::string& path) const;
  static QAgent load_file(const std::string& path, RngStream exploration_stream,
                          RngStream replay_stream);

 private:
  ModelParams pred_;
  ModelParams target_;
  DqnOptions options_;
  EpsilonSchedule epsilon_;
  ReplayBuffer buffer_;
  AdamState adam_;
  RngStream exploration_stream_;
  RngStream replay_stream_;
  long long slots_seen_ = 0;
};

// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)). Kept as the
// small-instance oracle for sanity-checking the function-approximation
// path.
void tabular_q_update(std::vector<std::vector<double>>& q_table, std::size_t s, std::size_t a,
                      double r, std::size_t s_next, double alpha, double gamma);

}  // namespace sclarsim
