#pragma once

// Static network structure: cells, per-cell rosters of pUEs / one iUE /
// jammers / one cluster head, and the per-run transmission schedules that
// are instantiated when the network is built.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sclarsim/rng.hpp"

namespace sclarsim {

// Transmit-power interval in dBm (inclusive).
struct DbmRange {
  double lo_dbm = 20.0;
  double hi_dbm = 25.0;

  friend bool operator==(const DbmRange&, const DbmRange&) = default;
};

enum class JammerPatternMode : std::uint8_t { periodic_onoff = 0, fixed_subset = 1 };
enum class PueScheduleMode : std::uint8_t { fixed_pattern = 0, iid_per_slot = 1 };

std::string_view jammer_pattern_mode_label(JammerPatternMode mode);
JammerPatternMode jammer_pattern_mode_from_label(std::string_view label);
std::string_view pue_schedule_mode_label(PueScheduleMode mode);
PueScheduleMode pue_schedule_mode_from_label(std::string_view label);

struct NetworkConfig {
  int num_cells = 1;
  int pue_count = 2;          // per cell
  int jammer_count = 1;       // per cell
  int antennas = 4;           // L, at each cluster head
  int frame_slots = 5;        // S
  int total_frames = 3000;    // F
  double pue_tx_prob = 0.5;   // Omega
  DbmRange pue_power_range{20.0, 25.0};
  DbmRange jammer_power_range{20.0, 30.0};
  DbmRange iue_power_range{20.0, 25.0};
  double noise_variance = 1.0;  // sigma^2, linear
  std::uint64_t master_seed = 1;

  JammerPatternMode jammer_pattern_mode = JammerPatternMode::periodic_onoff;
  // S_on + S_off must equal frame_slots; -1 derives the default split
  // (S_off = (S-1)/2). S_off < S_on is enforced unless
  // jammer_allow_long_off is set.
  int jammer_slots_on = -1;
  int jammer_slots_off = -1;
  bool jammer_allow_long_off = false;

  PueScheduleMode pue_schedule_mode = PueScheduleMode::fixed_pattern;
  // Optional explicit per-pUE frame patterns (each frame_slots long,
  // entries 0/1). When set for pUE n, it replaces the Bernoulli draw.
  std::vector<std::vector<int>> pue_fixed_patterns;
  // Same override for jammers.
  std::vector<std::vector<int>> jammer_fixed_patterns;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  int jammer_on_slots_effective() const;
  int jammer_off_slots_effective() const;
};

struct Pue {
  EntityId id;
  // Per-frame transmit pattern, frame_slots long; repeats frame to frame.
  // Empty in iid_per_slot mode (bits drawn fresh each slot).
  std::vector<int> pattern;
};

struct Jammer {
  EntityId id;
  std::vector<int> pattern;  // per-frame on/off bits, repeats every frame
};

struct Cell {
  int index = 0;
  std::vector<Pue> pues;
  EntityId iue;
  std::vector<Jammer> jammers;
  EntityId cluster_head;

  int legit_ue_count() const { return static_cast<int>(pues.size()) + 1; }
};

class Network {
 public:
  Network(NetworkConfig config, std::vector<Cell> cells);

  const NetworkConfig& config() const { return config_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int k) const { return cells_.at(static_cast<std::size_t>(k)); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  // Flat enumeration of every entity (cluster heads included), stable for
  // a given configuration; used to index per-slot channel/power arrays.
  std::size_t entity_count() const { return entities_.size(); }
  const std::vector<EntityId>& entities() const { return entities_; }
  std::size_t flat_index(const EntityId& id) const;

  // Legitimate UEs (pUEs then iUE) of one cell, in state-vector order.
  std::vector<EntityId> legit_ues(int cell_index) const;

 private:
  NetworkConfig config_;
  std::vector<Cell> cells_;
  std::vector<EntityId> entities_;
};

// Materializes rosters and per-entity schedules; deterministic given
// config.master_seed.
Network build_network(const NetworkConfig& config);

}  // namespace sclarsim
