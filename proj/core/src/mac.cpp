#include "sclarsim/mac.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sclarsim {

std::string_view channel_status_label(ChannelStatus status) {
  switch (status) {
    case ChannelStatus::unused: return "unused";
    case ChannelStatus::pue_transmitting: return "pue_transmitting";
    case ChannelStatus::jammed: return "jammed";
  }
  return "?";
}

std::string_view ack_label(AckStatus ack) {
  switch (ack) {
    case AckStatus::pue_jammed: return "J_T";
    case AckStatus::busy: return "B";
    case AckStatus::idle: return "I";
    case AckStatus::iue_jammed: return "J_A";
    case AckStatus::collision: return "C";
    case AckStatus::success: return "S";
  }
  return "?";
}

std::array<int, 6> ack_one_hot(AckStatus ack) {
  std::array<int, 6> row{};
  row[static_cast<std::size_t>(ack)] = 1;
  return row;
}

AckStatus ack_from(IueAction action, ChannelStatus status) {
  if (action == IueAction::dispatch) {
    switch (status) {
      case ChannelStatus::unused: return AckStatus::success;
      case ChannelStatus::pue_transmitting: return AckStatus::collision;
      case ChannelStatus::jammed: return AckStatus::iue_jammed;
    }
  } else {
    switch (status) {
      case ChannelStatus::unused: return AckStatus::idle;
      case ChannelStatus::pue_transmitting: return AckStatus::busy;
      case ChannelStatus::jammed: return AckStatus::pue_jammed;
    }
  }
  throw std::logic_error("ack_from: unreachable");
}

std::string_view ue_outcome_label(UeOutcome outcome) {
  switch (outcome) {
    case UeOutcome::idle: return "idle";
    case UeOutcome::success: return "success";
    case UeOutcome::collision: return "collision";
    case UeOutcome::jammed: return "jammed";
  }
  return "?";
}

int pue_schedule_bit(RngStream& stream, double omega) {
  if (omega < 0.0 || omega > 1.0)
    throw std::invalid_argument("pue_schedule_bit: omega must lie in [0, 1]");
  return stream.bernoulli(omega) ? 1 : 0;
}

std::vector<int> jammer_schedule(int frame_slots, int slots_on, int slots_off,
                                 JammerPatternMode mode, RngStream& stream) {
  if (slots_on + slots_off != frame_slots)
    throw std::invalid_argument("jammer_schedule: slots_on + slots_off must equal frame_slots");
  if (slots_on < 0 || slots_off < 0)
    throw std::invalid_argument("jammer_schedule: negative on/off period");

  std::vector<int> pattern(static_cast<std::size_t>(frame_slots), 0);
  if (mode == JammerPatternMode::periodic_onoff) {
    std::fill(pattern.begin() + slots_off, pattern.end(), 1);
  } else {
    // Partial Fisher-Yates: the first slots_on entries of a shuffled index
    // array become the active subset.
    std::vector<std::size_t> idx(static_cast<std::size_t>(frame_slots));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (int i = 0; i < slots_on; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          stream.uniform_index(static_cast<std::size_t>(frame_slots - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
      pattern[idx[static_cast<std::size_t>(i)]] = 1;
    }
  }
  return pattern;
}

namespace {

ChannelStatus status_of(bool any_tx, bool any_jam) {
  if (any_jam) return ChannelStatus::jammed;
  if (any_tx) return ChannelStatus::pue_transmitting;
  return ChannelStatus::unused;
}

}  // namespace

SlotOutcome resolve_slot(const SlotActivity& activity) {
  if (activity.ue_tx.empty())
    throw std::invalid_argument("resolve_slot: activity must cover at least the iUE");

  const std::size_t n_ue = activity.ue_tx.size();
  const bool any_jam =
      std::any_of(activity.jammer_on.begin(), activity.jammer_on.end(), [](int f) { return f != 0; });
  const int tx_count =
      std::accumulate(activity.ue_tx.begin(), activity.ue_tx.end(), 0);

  SlotOutcome out;
  out.ue_outcomes.resize(n_ue, UeOutcome::idle);
  for (std::size_t n = 0; n < n_ue; ++n) {
    if (!activity.ue_tx[n]) continue;
    if (any_jam)
      out.ue_outcomes[n] = UeOutcome::jammed;
    else if (tx_count >= 2)
      out.ue_outcomes[n] = UeOutcome::collision;
    else
      out.ue_outcomes[n] = UeOutcome::success;
  }

  // Channel status from pUE and jammer flags only; the iUE is the last
  // roster entry and its action never feeds its own observation.
  const bool any_pue_tx = std::any_of(activity.ue_tx.begin(), activity.ue_tx.end() - 1,
                                      [](int f) { return f != 0; });
  out.status = status_of(any_pue_tx, any_jam);
  out.iue_ack = ack_from(activity.ue_tx.back() ? IueAction::dispatch : IueAction::hold, out.status);
  return out;
}

AckStatus ue_ack(const SlotActivity& activity, std::size_t ue_index) {
  if (ue_index >= activity.ue_tx.size())
    throw std::out_of_range("ue_ack: ue_index out of range");
  const bool any_jam =
      std::any_of(activity.jammer_on.begin(), activity.jammer_on.end(), [](int f) { return f != 0; });
  bool other_tx = false;
  for (std::size_t n = 0; n < activity.ue_tx.size(); ++n)
    if (n != ue_index && activity.ue_tx[n]) other_tx = true;
  const auto status = status_of(other_tx, any_jam);
  return ack_from(activity.ue_tx[ue_index] ? IueAction::dispatch : IueAction::hold, status);
}

double success_rate(const std::vector<UeOutcome>& frame_outcomes) {
  if (frame_outcomes.empty()) return 0.0;
  const auto successes = std::count(frame_outcomes.begin(), frame_outcomes.end(), UeOutcome::success);
  return static_cast<double>(successes) / static_cast<double>(frame_outcomes.size());
}

double clar(double xi, double rate) {
  if (xi < 0.0 || xi > 1.0) throw std::domain_error("clar: xi must lie in [0, 1]");
  if (rate < 0.0) throw std::domain_error("clar: rate must be >= 0");
  return xi * rate;
}

double sclar(const std::vector<std::vector<double>>& clar_per_ue,
             const std::vector<std::vector<int>>& action_per_ue) {
  if (clar_per_ue.size() != action_per_ue.size())
    throw std::invalid_argument("sclar: UE count mismatch between rates and actions");
  double total = 0.0;
  for (std::size_t n = 0; n < clar_per_ue.size(); ++n) {
    if (clar_per_ue[n].size() != action_per_ue[n].size())
      throw std::invalid_argument("sclar: per-slot length mismatch for UE " + std::to_string(n));
    for (std::size_t s = 0; s < clar_per_ue[n].size(); ++s)
      total += clar_per_ue[n][s] * action_per_ue[n][s];
  }
  return total;
}

}  // namespace sclarsim
