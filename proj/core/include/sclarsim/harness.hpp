#pragma once

// Experiment orchestration: the training loop over frames and slots,
// SCLAR metrics, sweeps over frame sizes / rosters / agents, and file
// outputs. One episode is one frame.

#include <optional>
#include <string>
#include <vector>

#include "sclarsim/baselines.hpp"
#include "sclarsim/dqn.hpp"
#include "sclarsim/env.hpp"
#include "sclarsim/metrics.hpp"
#include "sclarsim/topology.hpp"

namespace sclarsim {

enum class AgentKind : std::uint8_t { resdqn = 0, fcdqn, oracle, random, hold };

std::string_view agent_kind_label(AgentKind kind);
AgentKind agent_kind_from_label(std::string_view label);

struct ExperimentConfig {
  NetworkConfig network;
  AgentKind agent = AgentKind::resdqn;
  long long episodes = 3000;
  std::size_t metrics_window = 100;  // channel-realization averaging count
  std::string out_dir;               // empty: no files written
  std::string run_tag = "run";
  bool emit_csv = true;
  bool emit_jsonl = true;
  bool write_checkpoint = true;
  DqnOptions dqn;
  // Architecture template; input width is filled from the environment.
  ModelArchitecture model;
  EnvOptions env;
  // When unset, the epsilon schedule is derived to hit its floor after 80%
  // of the run's slots.
  std::optional<double> epsilon_decay_override;
};

struct RunResult {
  std::vector<MetricsRow> slot_rows;
  std::vector<EpisodeRow> episode_rows;
  std::vector<std::string> files_written;
  std::string checkpoint_path;  // empty for non-learning agents
  double final_avg_reward = 0.0;   // mean avg_reward over the last window
  double final_avg_sclar = 0.0;    // mean sclar_mean over the last window
  std::optional<GreedyPolicy> policy;  // learning agents only
};

// Executes the nested frame/slot loop: schedule + channel + power draws,
// action selection, env step, experience deposit, periodic target update,
// batch training, metrics emission.
RunResult run_training(const ExperimentConfig& config);

// Per-slot instantaneous SCLAR plus its running average over `window`.
struct SclarMetrics {
  std::vector<double> instantaneous;
  std::vector<double> running_avg;
};

SclarMetrics compute_sclar_metrics(const std::vector<double>& per_slot_sclar, std::size_t window);

enum class SweepAxis : std::uint8_t { frame_size = 0, roster = 1, agent = 2 };

std::string_view sweep_axis_label(SweepAxis axis);
SweepAxis sweep_axis_from_label(std::string_view label);

struct SweepValue {
  std::string label;  // e.g. "10", "20:3", "oracle"
};

struct SweepEntry {
  std::string value;
  bool ok = false;
  std::string error;
  double final_avg_reward = 0.0;
  double final_avg_sclar = 0.0;
  std::string out_dir;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  std::string summary_path;
};

// Independent seeded runs per axis value; per-run failures are isolated
// and reported while the sweep continues.
SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis,
                      const std::vector<std::string>& values);

// Applies one sweep value to a config copy (e.g. frame_size "10",
// roster "20:3", agent "oracle"). Throws on malformed values.
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepAxis axis,
                                   const std::string& value);

// Greedy rollout: one warm-up frame, then one recorded frame. Returns the
// recorded frame's action per slot.
std::vector<IueAction> greedy_frame_actions(const ExperimentConfig& config,
                                            const GreedyPolicy& policy);

// JSON config file I/O. Keys mirror the NetworkConfig field names exactly;
// experiment-level keys sit beside them (see README for the schema).
ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const std::string& path, const ExperimentConfig& config);

}  // namespace sclarsim
