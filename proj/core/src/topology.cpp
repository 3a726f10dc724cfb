#include "sclarsim/topology.hpp"

#include <algorithm>
#include <stdexcept>

#include "sclarsim/mac.hpp"

namespace sclarsim {

std::string_view jammer_pattern_mode_label(JammerPatternMode mode) {
  return mode == JammerPatternMode::periodic_onoff ? "periodic_onoff" : "fixed_subset";
}

JammerPatternMode jammer_pattern_mode_from_label(std::string_view label) {
  if (label == "periodic_onoff") return JammerPatternMode::periodic_onoff;
  if (label == "fixed_subset") return JammerPatternMode::fixed_subset;
  throw std::invalid_argument("jammer_pattern_mode: unknown value '" + std::string(label) + "'");
}

std::string_view pue_schedule_mode_label(PueScheduleMode mode) {
  return mode == PueScheduleMode::fixed_pattern ? "fixed_pattern" : "iid_per_slot";
}

PueScheduleMode pue_schedule_mode_from_label(std::string_view label) {
  if (label == "fixed_pattern") return PueScheduleMode::fixed_pattern;
  if (label == "iid_per_slot") return PueScheduleMode::iid_per_slot;
  throw std::invalid_argument("pue_schedule_mode: unknown value '" + std::string(label) + "'");
}

int NetworkConfig::jammer_off_slots_effective() const {
  if (jammer_slots_off >= 0) return jammer_slots_off;
  return (frame_slots - 1) / 2;
}

int NetworkConfig::jammer_on_slots_effective() const {
  if (jammer_slots_on >= 0) return jammer_slots_on;
  return frame_slots - jammer_off_slots_effective();
}

void NetworkConfig::validate() const {
  if (num_cells < 1) throw std::invalid_argument("num_cells: must be >= 1");
  if (pue_count < 0) throw std::invalid_argument("pue_count: must be >= 0");
  if (jammer_count < 0) throw std::invalid_argument("jammer_count: must be >= 0");
  if (antennas < 1) throw std::invalid_argument("antennas: must be >= 1");
  if (frame_slots < 1) throw std::invalid_argument("frame_slots: must be >= 1");
  if (total_frames < 1) throw std::invalid_argument("total_frames: must be >= 1");
  if (pue_tx_prob < 0.0 || pue_tx_prob > 1.0)
    throw std::invalid_argument("pue_tx_prob: must lie in [0, 1]");
  if (pue_power_range.lo_dbm > pue_power_range.hi_dbm)
    throw std::invalid_argument("pue_power_range: lower bound exceeds upper");
  if (jammer_power_range.lo_dbm > jammer_power_range.hi_dbm)
    throw std::invalid_argument("jammer_power_range: lower bound exceeds upper");
  if (iue_power_range.lo_dbm > iue_power_range.hi_dbm)
    throw std::invalid_argument("iue_power_range: lower bound exceeds upper");
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise_variance: must be > 0");

  if (jammer_count > 0) {
    const int on = jammer_on_slots_effective();
    const int off = jammer_off_slots_effective();
    if (on + off != frame_slots)
      throw std::invalid_argument("jammer_slots_on/jammer_slots_off: must sum to frame_slots");
    if (on < 0 || off < 0)
      throw std::invalid_argument("jammer_slots_on/jammer_slots_off: must be >= 0");
    if (!jammer_allow_long_off && off >= on && off > 0)
      throw std::invalid_argument(
          "jammer_slots_off: must be < jammer_slots_on (set jammer_allow_long_off to override)");
  }
  for (const auto& p : pue_fixed_patterns) {
    if (static_cast<int>(p.size()) != frame_slots)
      throw std::invalid_argument("pue_fixed_patterns: each pattern must have frame_slots bits");
    for (int bit : p)
      if (bit != 0 && bit != 1)
        throw std::invalid_argument("pue_fixed_patterns: entries must be 0 or 1");
  }
  for (const auto& p : jammer_fixed_patterns) {
    if (static_cast<int>(p.size()) != frame_slots)
      throw std::invalid_argument("jammer_fixed_patterns: each pattern must have frame_slots bits");
    for (int bit : p)
      if (bit != 0 && bit != 1)
        throw std::invalid_argument("jammer_fixed_patterns: entries must be 0 or 1");
  }
}

Network::Network(NetworkConfig config, std::vector<Cell> cells)
    : config_(std::move(config)), cells_(std::move(cells)) {
  for (const auto& cell : cells_) {
    for (const auto& pue : cell.pues) entities_.push_back(pue.id);
    entities_.push_back(cell.iue);
    for (const auto& jam : cell.jammers) entities_.push_back(jam.id);
    entities_.push_back(cell.cluster_head);
  }
}

std::size_t Network::flat_index(const EntityId& id) const {
  const auto& cell = cells_.at(static_cast<std::size_t>(id.cell_index));
  std::size_t base = 0;
  for (int k = 0; k < id.cell_index; ++k) {
    const auto& c = cells_[static_cast<std::size_t>(k)];
    base += c.pues.size() + 1 + c.jammers.size() + 1;
  }
  switch (id.kind) {
    case EntityKind::pue:
      if (id.local_index < 0 || id.local_index >= static_cast<int>(cell.pues.size()))
        throw std::out_of_range("flat_index: pUE local index out of range");
      return base + static_cast<std::size_t>(id.local_index);
    case EntityKind::iue:
      return base + cell.pues.size();
    case EntityKind::jammer:
      if (id.local_index < 0 || id.local_index >= static_cast<int>(cell.jammers.size()))
        throw std::out_of_range("flat_index: jammer local index out of range");
      return base + cell.pues.size() + 1 + static_cast<std::size_t>(id.local_index);
    case EntityKind::cluster_head:
      return base + cell.pues.size() + 1 + cell.jammers.size();
  }
  throw std::out_of_range("flat_index: bad entity kind");
}

std::vector<EntityId> Network::legit_ues(int cell_index) const {
  const auto& c = cell(cell_index);
  std::vector<EntityId> out;
  out.reserve(c.pues.size() + 1);
  for (const auto& pue : c.pues) out.push_back(pue.id);
  out.push_back(c.iue);
  return out;
}

Network build_network(const NetworkConfig& config) {
  config.validate();
  const RngSet rngs(config.master_seed);
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(config.num_cells));

  for (int k = 0; k < config.num_cells; ++k) {
    Cell cell;
    cell.index = k;
    cell.iue = EntityId{k, EntityKind::iue, 0};
    cell.cluster_head = EntityId{k, EntityKind::cluster_head, 0};

    for (int n = 0; n < config.pue_count; ++n) {
      Pue pue;
      pue.id = EntityId{k, EntityKind::pue, n};
      const std::size_t override_idx = static_cast<std::size_t>(n);
      if (k == 0 && override_idx < config.pue_fixed_patterns.size()) {
        pue.pattern = config.pue_fixed_patterns[override_idx];
      } else if (config.pue_schedule_mode == PueScheduleMode::fixed_pattern) {
        auto stream = rngs.derive(StreamPurpose::schedule, pue.id);
        pue.pattern.reserve(static_cast<std::size_t>(config.frame_slots));
        for (int s = 0; s < config.frame_slots; ++s)
          pue.pattern.push_back(pue_schedule_bit(stream, config.pue_tx_prob));
      }
      cell.pues.push_back(std::move(pue));
    }

    for (int m = 0; m < config.jammer_count; ++m) {
      Jammer jam;
      jam.id = EntityId{k, EntityKind::jammer, m};
      const std::size_t override_idx = static_cast<std::size_t>(m);
      if (k == 0 && override_idx < config.jammer_fixed_patterns.size()) {
        jam.pattern = config.jammer_fixed_patterns[override_idx];
      } else {
        auto stream = rngs.derive(StreamPurpose::schedule, jam.id);
        jam.pattern = jammer_schedule(config.frame_slots, config.jammer_on_slots_effective(),
                                      config.jammer_off_slots_effective(),
                                      config.jammer_pattern_mode, stream);
      }
      cell.jammers.push_back(std::move(jam));
    }

    cells.push_back(std::move(cell));
  }
  return Network(std::move(config), std::move(cells));
}

}  // namespace sclarsim
