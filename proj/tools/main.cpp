// Command-line front end: train a single agent, sweep a parameter axis, or
// evaluate a saved checkpoint greedily.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sclarsim/checkpoint.hpp"
#include "sclarsim/harness.hpp"

namespace {

using namespace sclarsim;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> agent;
  std::optional<int> frame_size;
  std::optional<int> pues;
  std::optional<int> jammers;
  std::optional<long long> episodes;
  std::optional<int> cells;
  std::optional<int> antennas;
  std::optional<double> pue_tx_prob;
  std::optional<std::string> tag;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON configuration file");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--out", flags.out, "output directory for metrics and checkpoints");
  cmd->add_option("--agent", flags.agent, "resdqn|fcdqn|oracle|random|hold");
  cmd->add_option("--frame-size", flags.frame_size, "slots per frame (S)");
  cmd->add_option("--pues", flags.pues, "pUEs per cell");
  cmd->add_option("--jammers", flags.jammers, "jammers per cell");
  cmd->add_option("--episodes", flags.episodes, "training episodes (frames)");
  cmd->add_option("--cells", flags.cells, "number of cells (K)");
  cmd->add_option("--antennas", flags.antennas, "cluster-head antennas (L)");
  cmd->add_option("--pue-tx-prob", flags.pue_tx_prob, "pUE Bernoulli transmit probability");
  cmd->add_option("--tag", flags.tag, "run tag used in output file names");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = load_config_file(flags.config_path);
  if (flags.seed) config.network.master_seed = *flags.seed;
  if (flags.out) config.out_dir = *flags.out;
  if (flags.agent) config.agent = agent_kind_from_label(*flags.agent);
  if (flags.frame_size) {
    config.network.frame_slots = *flags.frame_size;
    config.network.jammer_slots_on = -1;
    config.network.jammer_slots_off = -1;
  }
  if (flags.pues) config.network.pue_count = *flags.pues;
  if (flags.jammers) config.network.jammer_count = *flags.jammers;
  if (flags.episodes) config.episodes = *flags.episodes;
  if (flags.cells) config.network.num_cells = *flags.cells;
  if (flags.antennas) config.network.antennas = *flags.antennas;
  if (flags.pue_tx_prob) config.network.pue_tx_prob = *flags.pue_tx_prob;
  if (flags.tag) config.run_tag = *flags.tag;
  return config;
}

int cmd_train(const CommonFlags& flags) {
  ExperimentConfig config = resolve_config(flags);
  if (config.out_dir.empty()) config.out_dir = "out";
  const RunResult result = run_training(config);
  std::printf("agent=%s episodes=%lld frame_slots=%d seed=%llu\n",
              std::string(agent_kind_label(config.agent)).c_str(), config.episodes,
              config.network.frame_slots,
              static_cast<unsigned long long>(config.network.master_seed));
  std::printf("final avg reward (last %zu episodes): %s\n", config.metrics_window,
              format_double(result.final_avg_reward).c_str());
  std::printf("final avg SCLAR  (last %zu episodes): %s\n", config.metrics_window,
              format_double(result.final_avg_sclar).c_str());
  for (const auto& f : result.files_written) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& axis_label,
              const std::string& values_csv) {
  ExperimentConfig base = resolve_config(flags);
  if (base.out_dir.empty()) base.out_dir = "out";
  const SweepAxis axis = sweep_axis_from_label(axis_label);
  std::vector<std::string> values;
  std::string current;
  for (char c : values_csv) {
    if (c == ',') {
      if (!current.empty()) values.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) values.push_back(current);

  const SweepResult result = run_sweep(base, axis, values);
  for (const auto& entry : result.entries) {
    if (entry.ok)
      std::printf("%s=%s  avg_reward=%s  avg_sclar=%s\n", axis_label.c_str(),
                  entry.value.c_str(), format_double(entry.final_avg_reward).c_str(),
                  format_double(entry.final_avg_sclar).c_str());
    else
      std::printf("%s=%s  FAILED: %s\n", axis_label.c_str(), entry.value.c_str(),
                  entry.error.c_str());
  }
  if (!result.summary_path.empty()) std::printf("wrote %s\n", result.summary_path.c_str());
  return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& checkpoint_path, long long episodes) {
  ExperimentConfig config = resolve_config(flags);
  config.agent = AgentKind::hold;  // placeholder; actions come from the policy below

  RngStream dummy_a(0), dummy_b(0);
  const QAgent agent = QAgent::load_file(checkpoint_path, dummy_a, dummy_b);
  const GreedyPolicy policy = agent.extract_policy();

  Network network = build_network(config.network);
  Environment env(network, config.env);
  if (env.state_dim() != policy.params().arch.input_width)
    throw std::runtime_error("eval: checkpoint input width " +
                             std::to_string(policy.params().arch.input_width) +
                             " does not match the configured network (state dim " +
                             std::to_string(env.state_dim()) + ")");

  EnvState state = env.reset();
  const int S = config.network.frame_slots;
  double total_reward = 0.0;
  double total_sclar = 0.0;
  long long slots = 0;
  for (long long ep = 0; ep < episodes; ++ep) {
    for (int s = 0; s < S; ++s) {
      StepResult step = env.step(policy(state));
      total_reward += step.reward;
      total_sclar += step.diagnostics.sclar_instant;
      state = std::move(step.next_state);
      ++slots;
    }
  }
  std::printf("greedy evaluation over %lld episodes (%lld slots)\n", episodes, slots);
  std::printf("mean reward/slot: %s\n",
              format_double(total_reward / static_cast<double>(slots)).c_str());
  std::printf("mean SCLAR/slot:  %s\n",
              format_double(total_sclar / static_cast<double>(slots)).c_str());

  const std::vector<IueAction> actions = greedy_frame_actions(config, policy);
  std::string trace;
  for (IueAction a : actions) trace += a == IueAction::dispatch ? '1' : '0';
  std::printf("greedy frame actions (1=dispatch): %s\n", trace.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted-uplink network simulator with a ResNet DQN channel-access agent"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "run one training/evaluation experiment");
  add_common_flags(train, train_flags);

  CommonFlags sweep_flags;
  std::string sweep_axis = "frame_size";
  std::string sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "run independent experiments along one axis");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--axis", sweep_axis, "frame_size|roster|agent")->required();
  sweep
      ->add_option("--values", sweep_values,
                   "comma-separated values (roster entries look like '20:3')")
      ->required();

  CommonFlags eval_flags;
  std::string checkpoint_path;
  long long eval_episodes = 100;
  CLI::App* eval = app.add_subcommand("eval", "greedy evaluation of a saved agent checkpoint");
  add_common_flags(eval, eval_flags);
  eval->add_option("--checkpoint", checkpoint_path, "agent checkpoint file")->required();
  eval->add_option("--eval-episodes", eval_episodes, "episodes to evaluate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_axis, sweep_values);
    if (eval->parsed()) return cmd_eval(eval_flags, checkpoint_path, eval_episodes);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
