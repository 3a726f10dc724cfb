#pragma once

// Metrics rows and their CSV / line-delimited JSON writers. Formatting is
// deterministic (shortest round-trip doubles), so identical runs produce
// byte-identical files.

#include <optional>
#include <string>
#include <vector>

namespace sclarsim {

// One row per slot.
struct MetricsRow {
  long long episode = 0;  // 1-based
  int slot = 0;           // 1-based within the episode
  long long global_slot = 0;
  double reward = 0.0;
  double cumulative_reward = 0.0;  // within the episode
  double sclar_instant = 0.0;
  double sclar_avg = 0.0;  // running average over the metrics window (slots)
  std::optional<double> loss;  // empty until training starts
  int action = 0;
  std::string ack;
  double epsilon = 0.0;
};

// One row per episode (= one frame).
struct EpisodeRow {
  long long episode = 0;
  double episode_reward = 0.0;      // sum of slot rewards
  double avg_reward = 0.0;          // episode_reward / slots
  double running_avg_reward = 0.0;  // window mean of avg_reward over episodes
  double sclar_mean = 0.0;          // mean instantaneous SCLAR over the episode
  double running_avg_sclar = 0.0;
  std::optional<double> mean_loss;  // mean over the episode's training steps
  double epsilon_end = 0.0;
};

// Lossless double formatting (round-trips through strtod).
std::string format_double(double v);

std::string csv_escape(const std::string& field);

void write_slot_csv(const std::string& path, const std::vector<MetricsRow>& rows);
void write_slot_jsonl(const std::string& path, const std::vector<MetricsRow>& rows);
void write_episode_csv(const std::string& path, const std::vector<EpisodeRow>& rows);
void write_episode_jsonl(const std::string& path, const std::vector<EpisodeRow>& rows);

// Instantaneous SCLAR stream -> trailing-window running average, window in
// slots (the channel-realization averaging count).
std::vector<double> running_average(const std::vector<double>& values, std::size_t window);

}  // namespace sclarsim
