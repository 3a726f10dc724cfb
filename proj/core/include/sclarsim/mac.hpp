#pragma once

// Slotted-time machinery: frame clock, transmission schedules, per-slot
// outcome resolution, ACK one-hot encoding, success rates, and the
// cross-layer rate products.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "sclarsim/rng.hpp"
#include "sclarsim/topology.hpp"

namespace sclarsim {

// 1-based frame/slot indices; global_slot = (frame-1)*S + slot.
struct FrameClock {
  int frame = 1;
  int slot = 1;
  int frame_slots = 1;

  long long global_slot() const {
    return static_cast<long long>(frame - 1) * frame_slots + slot;
  }
  void advance() {
    if (slot == frame_slots) {
      slot = 1;
      ++frame;
    } else {
      ++slot;
    }
  }
};

// Channel status as seen from outside the iUE: computed from pUE and
// jammer flags only, never from the iUE's own action. Jamming dominates.
enum class ChannelStatus : std::uint8_t { unused = 0, pue_transmitting = 1, jammed = 2 };

std::string_view channel_status_label(ChannelStatus status);

enum class IueAction : std::uint8_t { hold = 0, dispatch = 1 };

// The six ACK labels and their one-hot rows.
enum class AckStatus : std::uint8_t {
  pue_jammed = 0,  // J_T : hold, channel jammed
  busy = 1,        // B   : hold, pUE transmitting
  idle = 2,        // I   : hold, channel unused
  iue_jammed = 3,  // J_A : dispatch, channel jammed
  collision = 4,   // C   : dispatch, pUE transmitting
  success = 5,     // S   : dispatch, channel unused
};

std::string_view ack_label(AckStatus ack);
std::array<int, 6> ack_one_hot(AckStatus ack);
AckStatus ack_from(IueAction action, ChannelStatus status);

enum class UeOutcome : std::uint8_t { idle = 0, success = 1, collision = 2, jammed = 3 };

std::string_view ue_outcome_label(UeOutcome outcome);

// Per-slot transmit/jam flags for one cell, indexed consistently with the
// cell roster: ue_tx covers pUEs then the iUE.
struct SlotActivity {
  std::vector<int> ue_tx;
  std::vector<int> jammer_on;
};

struct SlotOutcome {
  std::vector<UeOutcome> ue_outcomes;  // pUEs then iUE
  ChannelStatus status = ChannelStatus::unused;
  AckStatus iue_ack = AckStatus::idle;
};

// Bernoulli(omega) transmit bit.
int pue_schedule_bit(RngStream& stream, double omega);

// One frame of on/off bits for a jammer. periodic_onoff puts the off
// period first (slots 1..S_off inactive, then S_on active slots);
// fixed_subset activates a stream-chosen subset of S_on slots. The
// pattern repeats from frame to frame.
std::vector<int> jammer_schedule(int frame_slots, int slots_on, int slots_off,
                                 JammerPatternMode mode, RngStream& stream);

// Resolves one slot of one cell. A UE transmitting alone with no active
// jammer succeeds; two or more legitimate transmitters all collide; any
// active jammer marks every in-cell transmitter jammed (jamming dominates
// collision); non-transmitters idle.
SlotOutcome resolve_slot(const SlotActivity& activity);

// Per-UE ACK row using the Table II encoding from that UE's perspective:
// its own action paired with the channel status computed from the other
// in-cell transmitters and the jammers.
AckStatus ue_ack(const SlotActivity& activity, std::size_t ue_index);

// Fraction of a frame's slots with outcome success.
double success_rate(const std::vector<UeOutcome>& frame_outcomes);

// Cross-layer achievable rate: success rate times achievable rate.
double clar(double xi, double rate);

// Frame objective: sum over UEs of clar_vector . action_vector. Both
// vectors of each UE must have the same (per-slot) length.
double sclar(const std::vector<std::vector<double>>& clar_per_ue,
             const std::vector<std::vector<int>>& action_per_ue);

}  // namespace sclarsim
