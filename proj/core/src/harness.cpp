#include "sclarsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace sclarsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view agent_kind_label(AgentKind kind) {
  switch (kind) {
    case AgentKind::resdqn: return "resdqn";
    case AgentKind::fcdqn: return "fcdqn";
    case AgentKind::oracle: return "oracle";
    case AgentKind::random: return "random";
    case AgentKind::hold: return "hold";
  }
  return "?";
}

AgentKind agent_kind_from_label(std::string_view label) {
  for (auto k : {AgentKind::resdqn, AgentKind::fcdqn, AgentKind::oracle, AgentKind::random,
                 AgentKind::hold})
    if (label == agent_kind_label(k)) return k;
  throw std::invalid_argument("agent: unknown value '" + std::string(label) + "'");
}

std::string_view sweep_axis_label(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::frame_size: return "frame_size";
    case SweepAxis::roster: return "roster";
    case SweepAxis::agent: return "agent";
  }
  return "?";
}

SweepAxis sweep_axis_from_label(std::string_view label) {
  for (auto a : {SweepAxis::frame_size, SweepAxis::roster, SweepAxis::agent})
    if (label == sweep_axis_label(a)) return a;
  throw std::invalid_argument("sweep axis: unknown value '" + std::string(label) + "'");
}

SclarMetrics compute_sclar_metrics(const std::vector<double>& per_slot_sclar,
                                   std::size_t window) {
  SclarMetrics m;
  m.instantaneous = per_slot_sclar;
  m.running_avg = running_average(per_slot_sclar, window);
  return m;
}

namespace {

std::optional<QAgent> make_learning_agent(const ExperimentConfig& config,
                                          const Environment& env, const RngSet& rngs) {
  if (config.agent != AgentKind::resdqn && config.agent != AgentKind::fcdqn)
    return std::nullopt;

  const EntityId agent_iue = env.network().cell(env.agent_cell()).iue;
  RngStream init_stream = rngs.derive(StreamPurpose::weight_init, agent_iue);
  RngStream explore = rngs.derive(StreamPurpose::exploration, agent_iue);
  RngStream replay = rngs.derive(StreamPurpose::replay_sampling, agent_iue);

  DqnOptions options = config.dqn;
  const long long total_slots =
      config.episodes * static_cast<long long>(config.network.frame_slots);
  if (config.epsilon_decay_override) {
    options.epsilon = EpsilonSchedule(options.epsilon.initial(), options.epsilon.floor(),
                                      *config.epsilon_decay_override);
  } else {
    options.epsilon = EpsilonSchedule::for_run(total_slots, options.epsilon.initial(),
                                               options.epsilon.floor());
  }

  if (config.agent == AgentKind::fcdqn)
    return build_fc_dqn(env.state_dim(), config.model, options, init_stream, explore, replay);

  ModelArchitecture arch = config.model;
  arch.input_width = env.state_dim();
  return QAgent(init_model(arch, init_stream), options, explore, replay);
}

double window_mean(const std::vector<double>& values, std::size_t window) {
  if (values.empty()) return 0.0;
  const std::size_t n = std::min(window, values.size());
  double acc = 0.0;
  for (std::size_t i = values.size() - n; i < values.size(); ++i) acc += values[i];
  return acc / static_cast<double>(n);
}

}  // namespace

RunResult run_training(const ExperimentConfig& config) {
  config.network.validate();
  if (config.episodes < 1) throw std::invalid_argument("episodes: must be >= 1");

  Network network = build_network(config.network);
  Environment env(network, config.env);
  const RngSet rngs(config.network.master_seed);
  std::optional<QAgent> agent = make_learning_agent(config, env, rngs);
  RngStream random_policy_stream =
      rngs.derive(StreamPurpose::exploration, env.network().cell(env.agent_cell()).iue);

  const int S = config.network.frame_slots;
  RunResult result;
  result.slot_rows.reserve(static_cast<std::size_t>(config.episodes * S));
  result.episode_rows.reserve(static_cast<std::size_t>(config.episodes));

  EnvState state = env.reset();
  std::vector<double> sclar_stream;
  std::vector<double> episode_avg_rewards;
  std::vector<double> episode_sclar_means;

  double sclar_acc = 0.0;  // trailing-window accumulator for slot rows
  std::vector<double> sclar_window_buf;

  for (long long episode = 1; episode <= config.episodes; ++episode) {
    double episode_reward = 0.0;
    double episode_sclar = 0.0;
    double loss_sum = 0.0;
    long long loss_count = 0;
    double eps_end = 0.0;

    for (int s = 1; s <= S; ++s) {
      IueAction action;
      double eps_now = 0.0;
      if (agent) {
        eps_now = agent->epsilon().value();
        action = agent->select_action(state);
      } else if (config.agent == AgentKind::oracle) {
        action = oracle_action(env.upcoming());
      } else if (config.agent == AgentKind::random) {
        action = random_action(random_policy_stream);
      } else {
        action = hold_action();
      }

      StepResult step = env.step(action);
      std::optional<double> loss;
      if (agent) {
        loss = agent->observe(Experience{state, action == IueAction::dispatch ? 1 : 0,
                                         step.reward, step.next_state});
        if (loss) {
          loss_sum += *loss;
          ++loss_count;
        }
      }

      episode_reward += step.reward;
      episode_sclar += step.diagnostics.sclar_instant;
      sclar_stream.push_back(step.diagnostics.sclar_instant);

      sclar_window_buf.push_back(step.diagnostics.sclar_instant);
      sclar_acc += step.diagnostics.sclar_instant;
      if (sclar_window_buf.size() > config.metrics_window) {
        sclar_acc -= sclar_window_buf[sclar_window_buf.size() - config.metrics_window - 1];
      }
      const double sclar_avg =
          sclar_acc / static_cast<double>(std::min(sclar_window_buf.size(),
                                                   config.metrics_window));

      MetricsRow row;
      row.episode = episode;
      row.slot = s;
      row.global_slot = step.diagnostics.global_slot;
      row.reward = step.reward;
      row.cumulative_reward = episode_reward;
      row.sclar_instant = step.diagnostics.sclar_instant;
      row.sclar_avg = sclar_avg;
      row.loss = loss;
      row.action = action == IueAction::dispatch ? 1 : 0;
      row.ack = std::string(ack_label(step.ack));
      row.epsilon = eps_now;
      result.slot_rows.push_back(std::move(row));

      state = std::move(step.next_state);
      eps_end = eps_now;
    }

    EpisodeRow erow;
    erow.episode = episode;
    erow.episode_reward = episode_reward;
    erow.avg_reward = episode_reward / static_cast<double>(S);
    episode_avg_rewards.push_back(erow.avg_reward);
    erow.running_avg_reward = window_mean(episode_avg_rewards, config.metrics_window);
    erow.sclar_mean = episode_sclar / static_cast<double>(S);
    episode_sclar_means.push_back(erow.sclar_mean);
    erow.running_avg_sclar = window_mean(episode_sclar_means, config.metrics_window);
    if (loss_count > 0) erow.mean_loss = loss_sum / static_cast<double>(loss_count);
    erow.epsilon_end = eps_end;
    result.episode_rows.push_back(std::move(erow));
  }

  result.final_avg_reward = window_mean(episode_avg_rewards, config.metrics_window);
  result.final_avg_sclar = window_mean(episode_sclar_means, config.metrics_window);
  if (agent) result.policy = agent->extract_policy();

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    const std::string base = (fs::path(config.out_dir) / config.run_tag).string();
    if (config.emit_csv) {
      write_slot_csv(base + "_slots.csv", result.slot_rows);
      result.files_written.push_back(base + "_slots.csv");
      write_episode_csv(base + "_episodes.csv", result.episode_rows);
      result.files_written.push_back(base + "_episodes.csv");
    }
    if (config.emit_jsonl) {
      write_slot_jsonl(base + "_slots.jsonl", result.slot_rows);
      result.files_written.push_back(base + "_slots.jsonl");
      write_episode_jsonl(base + "_episodes.jsonl", result.episode_rows);
      result.files_written.push_back(base + "_episodes.jsonl");
    }
    if (agent && config.write_checkpoint) {
      result.checkpoint_path = base + "_agent.ckpt";
      agent->save_file(result.checkpoint_path);
      result.files_written.push_back(result.checkpoint_path);
    }
  }
  return result;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepAxis axis,
                                   const std::string& value) {
  ExperimentConfig config = base;
  switch (axis) {
    case SweepAxis::frame_size: {
      config.network.frame_slots = std::stoi(value);
      // A changed frame length invalidates explicit patterns and the
      // default on/off split.
      config.network.pue_fixed_patterns.clear();
      config.network.jammer_fixed_patterns.clear();
      config.network.jammer_slots_on = -1;
      config.network.jammer_slots_off = -1;
      break;
    }
    case SweepAxis::roster: {
      const auto colon = value.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("roster value must look like '<pues>:<jammers>': " + value);
      config.network.pue_count = std::stoi(value.substr(0, colon));
      config.network.jammer_count = std::stoi(value.substr(colon + 1));
      config.network.pue_fixed_patterns.clear();
      config.network.jammer_fixed_patterns.clear();
      break;
    }
    case SweepAxis::agent:
      config.agent = agent_kind_from_label(value);
      break;
  }
  return config;
}

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis,
                      const std::vector<std::string>& values) {
  SweepResult result;
  for (const auto& value : values) {
    SweepEntry entry;
    entry.value = value;
    try {
      ExperimentConfig config = apply_sweep_value(base, axis, value);
      if (!base.out_dir.empty()) {
        std::string slug = value;
        std::replace(slug.begin(), slug.end(), ':', '-');
        config.out_dir =
            (fs::path(base.out_dir) / (std::string(sweep_axis_label(axis)) + "_" + slug)).string();
        entry.out_dir = config.out_dir;
      }
      const RunResult run = run_training(config);
      entry.ok = true;
      entry.final_avg_reward = run.final_avg_reward;
      entry.final_avg_sclar = run.final_avg_sclar;
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
    }
    result.entries.push_back(std::move(entry));
  }

  if (!base.out_dir.empty()) {
    fs::create_directories(base.out_dir);
    result.summary_path = (fs::path(base.out_dir) / "sweep_summary.csv").string();
    std::ofstream out(result.summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("sweep: cannot open " + result.summary_path);
    out << "axis,value,ok,final_avg_reward,final_avg_sclar,error\n";
    for (const auto& entry : result.entries) {
      out << sweep_axis_label(axis) << ',' << csv_escape(entry.value) << ','
          << (entry.ok ? 1 : 0) << ',' << format_double(entry.final_avg_reward) << ','
          << format_double(entry.final_avg_sclar) << ',' << csv_escape(entry.error) << '\n';
    }
  }
  return result;
}

std::vector<IueAction> greedy_frame_actions(const ExperimentConfig& config,
                                            const GreedyPolicy& policy) {
  Network network = build_network(config.network);
  Environment env(network, config.env);
  EnvState state = env.reset();
  const int S = config.network.frame_slots;
  // Warm-up frame so slot 1's state reflects slot S of a played frame.
  for (int s = 0; s < S; ++s) state = env.step(policy(state)).next_state;
  std::vector<IueAction> actions;
  actions.reserve(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    const IueAction a = policy(state);
    actions.push_back(a);
    state = env.step(a).next_state;
  }
  return actions;
}

namespace {

DbmRange range_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument(field + ": expected [lo_dbm, hi_dbm]");
  return DbmRange{j[0].get<double>(), j[1].get<double>()};
}

std::vector<std::vector<int>> patterns_from_json(const json& j, const std::string& field) {
  std::vector<std::vector<int>> out;
  if (!j.is_array()) throw std::invalid_argument(field + ": expected an array of bit arrays");
  for (const auto& row : j) out.push_back(row.get<std::vector<int>>());
  return out;
}

}  // namespace

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config: parse error in " + path + ": " + e.what());
  }

  ExperimentConfig config;
  auto& net = config.network;
  if (j.contains("num_cells")) net.num_cells = j["num_cells"].get<int>();
  if (j.contains("pue_count")) net.pue_count = j["pue_count"].get<int>();
  if (j.contains("jammer_count")) net.jammer_count = j["jammer_count"].get<int>();
  if (j.contains("antennas")) net.antennas = j["antennas"].get<int>();
  if (j.contains("frame_slots")) net.frame_slots = j["frame_slots"].get<int>();
  if (j.contains("total_frames")) net.total_frames = j["total_frames"].get<int>();
  if (j.contains("pue_tx_prob")) net.pue_tx_prob = j["pue_tx_prob"].get<double>();
  if (j.contains("pue_power_range"))
    net.pue_power_range = range_from_json(j["pue_power_range"], "pue_power_range");
  if (j.contains("jammer_power_range"))
    net.jammer_power_range = range_from_json(j["jammer_power_range"], "jammer_power_range");
  if (j.contains("iue_power_range"))
    net.iue_power_range = range_from_json(j["iue_power_range"], "iue_power_range");
  if (j.contains("noise_variance")) net.noise_variance = j["noise_variance"].get<double>();
  if (j.contains("master_seed")) net.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("jammer_pattern_mode"))
    net.jammer_pattern_mode =
        jammer_pattern_mode_from_label(j["jammer_pattern_mode"].get<std::string>());
  if (j.contains("jammer_slots_on")) net.jammer_slots_on = j["jammer_slots_on"].get<int>();
  if (j.contains("jammer_slots_off")) net.jammer_slots_off = j["jammer_slots_off"].get<int>();
  if (j.contains("jammer_allow_long_off"))
    net.jammer_allow_long_off = j["jammer_allow_long_off"].get<bool>();
  if (j.contains("pue_schedule_mode"))
    net.pue_schedule_mode = pue_schedule_mode_from_label(j["pue_schedule_mode"].get<std::string>());
  if (j.contains("pue_fixed_patterns"))
    net.pue_fixed_patterns = patterns_from_json(j["pue_fixed_patterns"], "pue_fixed_patterns");
  if (j.contains("jammer_fixed_patterns"))
    net.jammer_fixed_patterns =
        patterns_from_json(j["jammer_fixed_patterns"], "jammer_fixed_patterns");

  if (j.contains("agent")) config.agent = agent_kind_from_label(j["agent"].get<std::string>());
  if (j.contains("episodes")) config.episodes = j["episodes"].get<long long>();
  if (j.contains("metrics_window")) config.metrics_window = j["metrics_window"].get<std::size_t>();
  if (j.contains("out_dir")) config.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("run_tag")) config.run_tag = j["run_tag"].get<std::string>();
  if (j.contains("emit_csv")) config.emit_csv = j["emit_csv"].get<bool>();
  if (j.contains("emit_jsonl")) config.emit_jsonl = j["emit_jsonl"].get<bool>();

  if (j.contains("dqn")) {
    const auto& d = j["dqn"];
    if (d.contains("gamma")) config.dqn.gamma = d["gamma"].get<double>();
    if (d.contains("batch_size")) config.dqn.batch_size = d["batch_size"].get<std::size_t>();
    if (d.contains("buffer_capacity"))
      config.dqn.buffer_capacity = d["buffer_capacity"].get<std::size_t>();
    if (d.contains("target_update_period"))
      config.dqn.target_update_period = d["target_update_period"].get<int>();
    if (d.contains("tau")) config.dqn.tau = d["tau"].get<double>();
    if (d.contains("learning_rate")) config.dqn.learning_rate = d["learning_rate"].get<double>();
    if (d.contains("bootstrap"))
      config.dqn.bootstrap = d["bootstrap"].get<std::string>() == "target"
                                 ? BootstrapNet::target
                                 : BootstrapNet::prediction;
    double eps0 = config.dqn.epsilon.initial();
    double eps_min = config.dqn.epsilon.floor();
    if (d.contains("epsilon_initial")) eps0 = d["epsilon_initial"].get<double>();
    if (d.contains("epsilon_min")) eps_min = d["epsilon_min"].get<double>();
    config.dqn.epsilon = EpsilonSchedule(eps0, eps_min, 1.0);
    if (d.contains("epsilon_decay"))
      config.epsilon_decay_override = d["epsilon_decay"].get<double>();
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    if (m.contains("stem_width")) config.model.stem_width = m["stem_width"].get<std::size_t>();
    if (m.contains("residual_blocks"))
      config.model.residual_blocks = m["residual_blocks"].get<std::size_t>();
    if (m.contains("layers_per_block"))
      config.model.layers_per_block = m["layers_per_block"].get<std::size_t>();
    if (m.contains("head_widths"))
      config.model.head_widths = m["head_widths"].get<std::vector<std::size_t>>();
    if (m.contains("output_width"))
      config.model.output_width = m["output_width"].get<std::size_t>();
  }
  if (j.contains("env")) {
    const auto& e = j["env"];
    if (e.contains("ordered_sic")) config.env.sinr.ordered_sic = e["ordered_sic"].get<bool>();
    if (e.contains("noise_mode"))
      config.env.noise_mode = e["noise_mode"].get<std::string>() == "uniform_dbm"
                                  ? NoiseMode::uniform_dbm
                                  : NoiseMode::fixed;
    if (e.contains("agent_cell")) config.env.agent_cell = e["agent_cell"].get<int>();
  }
  return config;
}

void save_config_file(const std::string& path, const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  const auto& net = config.network;
  j["num_cells"] = net.num_cells;
  j["pue_count"] = net.pue_count;
  j["jammer_count"] = net.jammer_count;
  j["antennas"] = net.antennas;
  j["frame_slots"] = net.frame_slots;
  j["total_frames"] = net.total_frames;
  j["pue_tx_prob"] = net.pue_tx_prob;
  j["pue_power_range"] = {net.pue_power_range.lo_dbm, net.pue_power_range.hi_dbm};
  j["jammer_power_range"] = {net.jammer_power_range.lo_dbm, net.jammer_power_range.hi_dbm};
  j["iue_power_range"] = {net.iue_power_range.lo_dbm, net.iue_power_range.hi_dbm};
  j["noise_variance"] = net.noise_variance;
  j["master_seed"] = net.master_seed;
  j["jammer_pattern_mode"] = std::string(jammer_pattern_mode_label(net.jammer_pattern_mode));
  j["jammer_slots_on"] = net.jammer_slots_on;
  j["jammer_slots_off"] = net.jammer_slots_off;
  j["jammer_allow_long_off"] = net.jammer_allow_long_off;
  j["pue_schedule_mode"] = std::string(pue_schedule_mode_label(net.pue_schedule_mode));
  if (!net.pue_fixed_patterns.empty()) j["pue_fixed_patterns"] = net.pue_fixed_patterns;
  if (!net.jammer_fixed_patterns.empty()) j["jammer_fixed_patterns"] = net.jammer_fixed_patterns;
  j["agent"] = std::string(agent_kind_label(config.agent));
  j["episodes"] = config.episodes;
  j["metrics_window"] = config.metrics_window;
  if (!config.out_dir.empty()) j["out_dir"] = config.out_dir;
  j["run_tag"] = config.run_tag;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("config: cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sclarsim
