#include "sclarsim/env.hpp"

#include <cmath>
#include <stdexcept>

namespace sclarsim {

std::string_view decision_label(Decision d) {
  switch (d) {
    case Decision::excellent: return "E";
    case Decision::good: return "G";
    case Decision::bad: return "B";
    case Decision::worst: return "W";
  }
  return "?";
}

const UtilityRow& UtilityParams::row(ChannelStatus status, IueAction action) const {
  // Row order mirrors the defaults above: (jammed,hold), (pue_tx,hold),
  // (unused,hold), (jammed,dispatch), (pue_tx,dispatch), (unused,dispatch).
  if (action == IueAction::hold) {
    switch (status) {
      case ChannelStatus::jammed: return rows[0];
      case ChannelStatus::pue_transmitting: return rows[1];
      case ChannelStatus::unused: return rows[2];
    }
  } else {
    switch (status) {
      case ChannelStatus::jammed: return rows[3];
      case ChannelStatus::pue_transmitting: return rows[4];
      case ChannelStatus::unused: return rows[5];
    }
  }
  throw std::logic_error("UtilityParams::row: unreachable");
}

double pue_utility(UeOutcome outcome, double pue_clar, const UtilityRow& row) {
  if (pue_clar < 0.0) throw std::domain_error("pue_utility: CLAR must be >= 0");
  return outcome == UeOutcome::success ? row.nu_pue * pue_clar : 0.0;
}

double iue_utility(ChannelStatus status, IueAction action, double iue_potential_rate,
                   const UtilityParams& params) {
  if (iue_potential_rate < 0.0) throw std::domain_error("iue_utility: rate must be >= 0");
  return params.row(status, action).nu_iue * iue_potential_rate;
}

double reward(ChannelStatus status, IueAction action, double iue_util,
              const std::vector<double>& pue_utils, const UtilityParams& params) {
  double util_sum = iue_util;
  for (double u : pue_utils) util_sum += u;
  return params.row(status, action).nu_net * util_sum;
}

EnvState assemble_state(const std::vector<UeBlock>& blocks) {
  EnvState state;
  state.reserve(blocks.size() * kStateBlockWidth);
  for (const auto& block : blocks) {
    state.push_back(static_cast<double>(block.action));
    for (int bit : ack_one_hot(block.ack)) state.push_back(static_cast<double>(bit));
    state.push_back(block.clar);
  }
  return state;
}

Environment::Environment(Network network, EnvOptions options)
    : network_(std::move(network)), options_(options) {
  const auto& config = network_.config();
  if (options_.agent_cell < 0 || options_.agent_cell >= network_.num_cells())
    throw std::invalid_argument("Environment: agent_cell out of range");
  clock_ = FrameClock{1, 1, config.frame_slots};

  const RngSet rngs(config.master_seed);
  channel_streams_.reserve(network_.entity_count());
  power_streams_.reserve(network_.entity_count());
  schedule_streams_.reserve(network_.entity_count());
  for (const auto& id : network_.entities()) {
    channel_streams_.push_back(rngs.derive(StreamPurpose::channel, id));
    power_streams_.push_back(rngs.derive(StreamPurpose::power, id));
    schedule_streams_.push_back(rngs.derive(StreamPurpose::schedule, id));
  }
  // Per-slot noise draws (uniform_dbm mode) come from the agent cell's
  // cluster-head channel stream.
  noise_stream_ = rngs.derive(StreamPurpose::channel,
                              network_.cell(options_.agent_cell).cluster_head);
  prepare_upcoming_slot();
}

std::size_t Environment::state_dim() const {
  return static_cast<std::size_t>(network_.cell(options_.agent_cell).legit_ue_count()) *
         kStateBlockWidth;
}

EnvState Environment::reset() {
  clock_ = FrameClock{1, 1, network_.config().frame_slots};
  started_ = true;
  return EnvState(state_dim(), 0.0);
}

void Environment::prepare_upcoming_slot() {
  // Schedule flags for the slot about to run; drawn before the agent acts
  // so the omniscient baseline can peek at them.
  const int s = clock_.slot;  // 1-based
  upcoming_.activity.clear();
  upcoming_.activity.resize(static_cast<std::size_t>(network_.num_cells()));
  for (int k = 0; k < network_.num_cells(); ++k) {
    const auto& cell = network_.cell(k);
    auto& act = upcoming_.activity[static_cast<std::size_t>(k)];
    act.ue_tx.assign(cell.pues.size() + 1, 0);
    act.jammer_on.assign(cell.jammers.size(), 0);
    for (std::size_t n = 0; n < cell.pues.size(); ++n) {
      const auto& pue = cell.pues[n];
      if (!pue.pattern.empty()) {
        act.ue_tx[n] = pue.pattern[static_cast<std::size_t>(s - 1)];
      } else {
        auto& stream = schedule_streams_[network_.flat_index(pue.id)];
        act.ue_tx[n] = pue_schedule_bit(stream, network_.config().pue_tx_prob);
      }
    }
    for (std::size_t m = 0; m < cell.jammers.size(); ++m)
      act.jammer_on[m] = cell.jammers[m].pattern[static_cast<std::size_t>(s - 1)];
  }
  const auto& agent_act = upcoming_.activity[static_cast<std::size_t>(options_.agent_cell)];
  upcoming_.agent_cell_pue_tx = false;
  for (std::size_t n = 0; n + 1 < agent_act.ue_tx.size(); ++n)
    if (agent_act.ue_tx[n]) upcoming_.agent_cell_pue_tx = true;
  upcoming_.agent_cell_jammed = false;
  for (int flag : agent_act.jammer_on)
    if (flag) upcoming_.agent_cell_jammed = true;
}

StepResult Environment::step(IueAction action) {
  if (!started_) throw std::logic_error("Environment::step: call reset() first");
  const int k = options_.agent_cell;
  const auto& cell = network_.cell(k);
  const std::size_t n_legit = cell.pues.size() + 1;

  std::vector<SlotActivity> activity = upcoming_.activity;
  activity[static_cast<std::size_t>(k)].ue_tx[n_legit - 1] =
      action == IueAction::dispatch ? 1 : 0;

  ChannelDraw draw = draw_slot_channels(network_, k, channel_streams_, power_streams_);
  if (options_.noise_mode == NoiseMode::uniform_dbm)
    draw.noise_variance = dbm_to_linear_mw(noise_stream_.uniform(
        options_.noise_dbm_range.lo_dbm, options_.noise_dbm_range.hi_dbm));

  const SlotOutcome outcome = resolve_slot(activity[static_cast<std::size_t>(k)]);

  // Potential iUE SINR: same slot with the iUE's transmit flag forced on.
  std::vector<SlotActivity> potential = activity;
  potential[static_cast<std::size_t>(k)].ue_tx[n_legit - 1] = 1;
  const double iue_potential_sinr =
      sinr_mf_sic(network_, cell.iue, potential, draw, options_.sinr);
  const double iue_potential_rate = achievable_rate(iue_potential_sinr);

  SlotDiagnostics diag;
  diag.frame = clock_.frame;
  diag.slot = clock_.slot;
  diag.global_slot = clock_.global_slot();
  diag.status = outcome.status;
  diag.iue_potential_rate = iue_potential_rate;

  const auto ues = network_.legit_ues(k);
  std::vector<double> pue_utils;
  const UtilityRow& row = options_.utilities.row(outcome.status, action);
  std::vector<UeBlock> blocks(n_legit);
  for (std::size_t n = 0; n < n_legit; ++n) {
    UeSlotInfo info;
    info.id = ues[n];
    info.transmitted = activity[static_cast<std::size_t>(k)].ue_tx[n];
    info.outcome = outcome.ue_outcomes[n];
    const bool is_iue = n + 1 == n_legit;
    if (info.transmitted) {
      info.sinr = is_iue ? iue_potential_sinr
                         : sinr_mf_sic(network_, ues[n], activity, draw, options_.sinr);
      info.rate = achievable_rate(info.sinr);
    }
    info.clar = clar(info.outcome == UeOutcome::success ? 1.0 : 0.0, info.rate);
    diag.sclar_instant += info.clar;

    blocks[n].action = info.transmitted;
    blocks[n].ack = is_iue ? outcome.iue_ack
                           : ue_ack(activity[static_cast<std::size_t>(k)], n);
    blocks[n].clar = info.clar;
    if (!is_iue) pue_utils.push_back(pue_utility(info.outcome, info.clar, row));
    diag.ues.push_back(std::move(info));
  }

  const double iue_util = iue_utility(outcome.status, action, iue_potential_rate, options_.utilities);

  StepResult result;
  result.next_state = assemble_state(blocks);
  result.reward = reward(outcome.status, action, iue_util, pue_utils, options_.utilities);
  result.ack = outcome.iue_ack;
  result.diagnostics = std::move(diag);
  if (!std::isfinite(result.reward))
    throw std::runtime_error("Environment::step: non-finite reward");

  clock_.advance();
  prepare_upcoming_slot();
  return result;
}

}  // namespace sclarsim
