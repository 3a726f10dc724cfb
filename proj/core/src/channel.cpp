#include "sclarsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sclarsim {

double norm_sq(const ComplexVector& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc;
}

std::complex<double> inner(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: dimension mismatch");
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double dbm_to_linear_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

ComplexVector draw_channel(RngStream& stream, int antennas) {
  if (antennas < 1) throw std::invalid_argument("draw_channel: antennas must be >= 1");
  constexpr double kPerDimSigma = 0.7071067811865476;  // 1/sqrt(2)
  ComplexVector h(static_cast<std::size_t>(antennas));
  for (auto& z : h) {
    const double re = kPerDimSigma * stream.gaussian();
    const double im = kPerDimSigma * stream.gaussian();
    z = {re, im};
  }
  return h;
}

double draw_power_mw(RngStream& stream, const DbmRange& range) {
  if (range.lo_dbm > range.hi_dbm)
    throw std::invalid_argument("draw_power_mw: inverted dBm interval");
  return dbm_to_linear_mw(stream.uniform(range.lo_dbm, range.hi_dbm));
}

ChannelDraw draw_slot_channels(const Network& network, int destination_cell,
                               std::vector<RngStream>& channel_streams,
                               std::vector<RngStream>& power_streams) {
  const auto& config = network.config();
  ChannelDraw draw;
  draw.destination_cell = destination_cell;
  draw.noise_variance = config.noise_variance;
  draw.channels.resize(network.entity_count());
  draw.powers_mw.assign(network.entity_count(), 0.0);

  for (std::size_t i = 0; i < network.entity_count(); ++i) {
    const EntityId& id = network.entities()[i];
    if (id.kind == EntityKind::cluster_head) continue;
    draw.channels[i] = draw_channel(channel_streams[i], config.antennas);
    const DbmRange& range = id.kind == EntityKind::pue    ? config.pue_power_range
                            : id.kind == EntityKind::iue  ? config.iue_power_range
                                                          : config.jammer_power_range;
    draw.powers_mw[i] = draw_power_mw(power_streams[i], range);
  }
  return draw;
}

ComplexVector matched_filter(const ComplexVector& h) {
  if (norm_sq(h) <= 0.0)
    throw std::domain_error("matched_filter: degenerate (zero) channel vector");
  return h;
}

namespace {

struct IntraTx {
  std::size_t flat;
  double received_power;  // P * ||h||^2, the SIC decode-order key
};

}  // namespace

double sinr_mf_sic(const Network& network, const EntityId& ue,
                   const std::vector<SlotActivity>& activity, const ChannelDraw& draw,
                   const SinrOptions& options) {
  if (ue.kind != EntityKind::pue && ue.kind != EntityKind::iue)
    throw std::invalid_argument("sinr_mf_sic: entity is not a legitimate UE");
  const int k = ue.cell_index;
  const auto& cell_activity = activity.at(static_cast<std::size_t>(k));
  const auto ues = network.legit_ues(k);

  std::size_t ue_pos = ues.size();
  for (std::size_t n = 0; n < ues.size(); ++n)
    if (ues[n] == ue) ue_pos = n;
  if (ue_pos == ues.size()) throw std::invalid_argument("sinr_mf_sic: UE not in cell roster");
  if (!cell_activity.ue_tx.at(ue_pos))
    throw std::invalid_argument("sinr_mf_sic: SINR undefined for a UE with transmit flag 0");

  const std::size_t self_flat = network.flat_index(ue);
  const ComplexVector& h_self = draw.channels.at(self_flat);
  const double h_self_sq = norm_sq(h_self);
  const double signal = draw.powers_mw.at(self_flat) * h_self_sq * h_self_sq;

  // Optional ordered SIC: interferers decoded before this UE (stronger
  // received power, ties broken by roster order) contribute nothing.
  std::vector<bool> cancelled(ues.size(), false);
  if (options.ordered_sic) {
    std::vector<IntraTx> order;
    for (std::size_t n = 0; n < ues.size(); ++n) {
      if (!cell_activity.ue_tx[n]) continue;
      const std::size_t flat = network.flat_index(ues[n]);
      order.push_back({flat, draw.powers_mw[flat] * norm_sq(draw.channels[flat])});
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const IntraTx& a, const IntraTx& b) { return a.received_power > b.received_power; });
    for (const auto& tx : order) {
      if (tx.flat == self_flat) break;
      for (std::size_t n = 0; n < ues.size(); ++n)
        if (network.flat_index(ues[n]) == tx.flat) cancelled[n] = true;
    }
  }

  double interference = 0.0;
  // Intra-cell legitimate UEs.
  for (std::size_t n = 0; n < ues.size(); ++n) {
    if (n == ue_pos || !cell_activity.ue_tx[n] || cancelled[n]) continue;
    const std::size_t flat = network.flat_index(ues[n]);
    interference += draw.powers_mw[flat] * std::norm(inner(h_self, draw.channels[flat]));
  }
  // Intra-cell jammers.
  const auto& own_cell = network.cell(k);
  for (std::size_t m = 0; m < own_cell.jammers.size(); ++m) {
    if (!cell_activity.jammer_on.at(m)) continue;
    const std::size_t flat = network.flat_index(own_cell.jammers[m].id);
    interference += draw.powers_mw[flat] * std::norm(inner(h_self, draw.channels[flat]));
  }
  // Inter-cell UEs and jammers (all cells i != k).
  for (int i = 0; i < network.num_cells(); ++i) {
    if (i == k) continue;
    const auto& other_activity = activity.at(static_cast<std::size_t>(i));
    const auto other_ues = network.legit_ues(i);
    for (std::size_t n = 0; n < other_ues.size(); ++n) {
      if (!other_activity.ue_tx.at(n)) continue;
      const std::size_t flat = network.flat_index(other_ues[n]);
      interference += draw.powers_mw[flat] * std::norm(inner(h_self, draw.channels[flat]));
    }
    const auto& other_cell = network.cell(i);
    for (std::size_t m = 0; m < other_cell.jammers.size(); ++m) {
      if (!other_activity.jammer_on.at(m)) continue;
      const std::size_t flat = network.flat_index(other_cell.jammers[m].id);
      interference += draw.powers_mw[flat] * std::norm(inner(h_self, draw.channels[flat]));
    }
  }

  const double noise = h_self_sq * draw.noise_variance;
  return signal / (interference + noise);
}

double achievable_rate(double sinr) {
  if (sinr < 0.0) throw std::domain_error("achievable_rate: sinr must be >= 0");
  return std::log2(1.0 + sinr);
}

FrameRates frame_rates(const std::vector<std::vector<double>>& rates) {
  FrameRates out;
  out.per_ue.resize(rates.size(), 0.0);
  std::size_t slots = 0;
  for (const auto& row : rates) slots = std::max(slots, row.size());
  out.per_slot.resize(slots, 0.0);
  for (std::size_t n = 0; n < rates.size(); ++n) {
    for (std::size_t s = 0; s < rates[n].size(); ++s) {
      out.per_ue[n] += rates[n][s];
      out.per_slot[s] += rates[n][s];
    }
  }
  return out;
}

}  // namespace sclarsim
