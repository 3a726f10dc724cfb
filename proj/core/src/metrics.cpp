#include "sclarsim/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sclarsim {

std::string format_double(double v) {
  // Shortest representation that round-trips: try increasing precision.
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no CRLF translation
  if (!out) throw std::runtime_error("metrics: cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_slot_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  auto out = open_out(path);
  out << "episode,slot,global_slot,reward,cumulative_reward,sclar_instant,sclar_avg,"
         "loss,action,ack,epsilon\n";
  for (const auto& r : rows) {
    out << r.episode << ',' << r.slot << ',' << r.global_slot << ',' << format_double(r.reward)
        << ',' << format_double(r.cumulative_reward) << ',' << format_double(r.sclar_instant)
        << ',' << format_double(r.sclar_avg) << ','
        << (r.loss ? format_double(*r.loss) : std::string()) << ',' << r.action << ','
        << csv_escape(r.ack) << ',' << format_double(r.epsilon) << '\n';
  }
  if (!out) throw std::runtime_error("metrics: write failure: " + path);
}

void write_slot_jsonl(const std::string& path, const std::vector<MetricsRow>& rows) {
  auto out = open_out(path);
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["episode"] = r.episode;
    j["slot"] = r.slot;
    j["global_slot"] = r.global_slot;
    j["reward"] = r.reward;
    j["cumulative_reward"] = r.cumulative_reward;
    j["sclar_instant"] = r.sclar_instant;
    j["sclar_avg"] = r.sclar_avg;
    if (r.loss)
      j["loss"] = *r.loss;
    else
      j["loss"] = nullptr;
    j["action"] = r.action;
    j["ack"] = r.ack;
    j["epsilon"] = r.epsilon;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("metrics: write failure: " + path);
}

void write_episode_csv(const std::string& path, const std::vector<EpisodeRow>& rows) {
  auto out = open_out(path);
  out << "episode,episode_reward,avg_reward,running_avg_reward,sclar_mean,"
         "running_avg_sclar,mean_loss,epsilon_end\n";
  for (const auto& r : rows) {
    out << r.episode << ',' << format_double(r.episode_reward) << ','
        << format_double(r.avg_reward) << ',' << format_double(r.running_avg_reward) << ','
        << format_double(r.sclar_mean) << ',' << format_double(r.running_avg_sclar) << ','
        << (r.mean_loss ? format_double(*r.mean_loss) : std::string()) << ','
        << format_double(r.epsilon_end) << '\n';
  }
  if (!out) throw std::runtime_error("metrics: write failure: " + path);
}

void write_episode_jsonl(const std::string& path, const std::vector<EpisodeRow>& rows) {
  auto out = open_out(path);
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["episode"] = r.episode;
    j["episode_reward"] = r.episode_reward;
    j["avg_reward"] = r.avg_reward;
    j["running_avg_reward"] = r.running_avg_reward;
    j["sclar_mean"] = r.sclar_mean;
    j["running_avg_sclar"] = r.running_avg_sclar;
    if (r.mean_loss)
      j["mean_loss"] = *r.mean_loss;
    else
      j["mean_loss"] = nullptr;
    j["epsilon_end"] = r.epsilon_end;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("metrics: write failure: " + path);
}

std::vector<double> running_average(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("running_average: window must be > 0");
  std::vector<double> out(values.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i];
    if (i >= window) acc -= values[i - window];
    out[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

}  // namespace sclarsim
