#pragma once

// POMDP wrapper around the network simulator: state assembly, utility and
// reward computation, and reset/step semantics for the learning agent.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sclarsim/channel.hpp"
#include "sclarsim/mac.hpp"
#include "sclarsim/topology.hpp"

namespace sclarsim {

// Fixed-layout state vector: for each legitimate in-cell UE (pUEs then the
// iUE) a block of [action bit, ACK one-hot (6), last per-slot CLAR].
using EnvState = std::vector<double>;

inline constexpr std::size_t kStateBlockWidth = 8;

enum class Decision : std::uint8_t { excellent = 0, good = 1, bad = 2, worst = 3 };

std::string_view decision_label(Decision d);

struct UtilityRow {
  Decision decision;
  double nu_pue;
  double nu_iue;
  double nu_net;
};

// The six (channel status, iUE action) rows with their scaling triples.
struct UtilityParams {
  // Defaults:
  //   jammed/hold        -> G (0, 4,  5)
  //   pue_tx/hold        -> G (1, 4,  5)
  //   unused/hold        -> W (0, 1, -10)
  //   jammed/dispatch    -> W (0, 1, -10)
  //   pue_tx/dispatch    -> B (0, 3, -5)
  //   unused/dispatch    -> E (0, 5,  10)
  std::array<UtilityRow, 6> rows = {{
      {Decision::good, 0.0, 4.0, 5.0},
      {Decision::good, 1.0, 4.0, 5.0},
      {Decision::worst, 0.0, 1.0, -10.0},
      {Decision::worst, 0.0, 1.0, -10.0},
      {Decision::bad, 0.0, 3.0, -5.0},
      {Decision::excellent, 0.0, 5.0, 10.0},
  }};

  const UtilityRow& row(ChannelStatus status, IueAction action) const;
};

// nu_pue * clar when the pUE's outcome is success, else 0.
double pue_utility(UeOutcome outcome, double pue_clar, const UtilityRow& row);

// nu_iue * potential rate; the potential rate is the iUE's
// interference-aware achievable rate had it transmitted this slot.
double iue_utility(ChannelStatus status, IueAction action, double iue_potential_rate,
                   const UtilityParams& params);

// nu_net * (iue utility + sum of pUE utilities).
double reward(ChannelStatus status, IueAction action, double iue_util,
              const std::vector<double>& pue_utils, const UtilityParams& params);

struct UeBlock {
  int action = 0;
  AckStatus ack = AckStatus::idle;
  double clar = 0.0;
};

// Deterministic fixed-layout concatenation of per-UE blocks.
EnvState assemble_state(const std::vector<UeBlock>& blocks);

struct UeSlotInfo {
  EntityId id;
  int transmitted = 0;
  UeOutcome outcome = UeOutcome::idle;
  double sinr = 0.0;   // 0 when not transmitting
  double rate = 0.0;   // achievable rate this slot, 0 when not transmitting
  double clar = 0.0;   // success indicator times rate
};

struct SlotDiagnostics {
  int frame = 1;
  int slot = 1;
  long long global_slot = 1;
  ChannelStatus status = ChannelStatus::unused;
  std::vector<UeSlotInfo> ues;  // agent cell, pUEs then iUE
  double iue_potential_rate = 0.0;
  double sclar_instant = 0.0;  // sum of realized CLARs over the cell's UEs
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  AckStatus ack = AckStatus::idle;
  SlotDiagnostics diagnostics;
};

enum class NoiseMode : std::uint8_t { fixed = 0, uniform_dbm = 1 };

struct EnvOptions {
  UtilityParams utilities;
  SinrOptions sinr;
  NoiseMode noise_mode = NoiseMode::fixed;
  DbmRange noise_dbm_range{2.0, 5.0};  // used in uniform_dbm mode
  int agent_cell = 0;
};

// Realized schedule flags for the upcoming slot; the omniscient oracle
// baseline reads these before acting.
struct UpcomingSlot {
  std::vector<SlotActivity> activity;  // per cell, iUE flags left 0
  bool agent_cell_pue_tx = false;
  bool agent_cell_jammed = false;
};

// One environment instance drives one training run. All stochastic draws
// descend from the network's master seed through per-entity substreams, so
// a (config, action sequence) pair fully determines every StepResult.
class Environment {
 public:
  Environment(Network network, EnvOptions options = {});

  EnvState reset();
  StepResult step(IueAction action);

  std::size_t state_dim() const;
  const Network& network() const { return network_; }
  const EnvOptions& options() const { return options_; }
  int agent_cell() const { return options_.agent_cell; }
  const FrameClock& clock() const { return clock_; }
  const UpcomingSlot& upcoming() const { return upcoming_; }

 private:
  void prepare_upcoming_slot();

  Network network_;
  EnvOptions options_;
  FrameClock clock_;
  UpcomingSlot upcoming_;
  std::vector<RngStream> channel_streams_;   // per flat entity
  std::vector<RngStream> power_streams_;     // per flat entity
  std::vector<RngStream> schedule_streams_;  // per flat entity (iid pUE mode)
  RngStream noise_stream_;
  bool started_ = false;
};

}  // namespace sclarsim
