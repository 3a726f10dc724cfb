#pragma once

// Per-slot physical layer: Rayleigh channel draws, uniform-in-dBm power
// draws, matched-filter decoding, the MF-SIC SINR, and achievable rates.

#include <complex>
#include <vector>

#include "sclarsim/mac.hpp"
#include "sclarsim/rng.hpp"
#include "sclarsim/topology.hpp"

namespace sclarsim {

using ComplexVector = std::vector<std::complex<double>>;

double norm_sq(const ComplexVector& v);
std::complex<double> inner(const ComplexVector& a, const ComplexVector& b);  // a^H b

double dbm_to_linear_mw(double dbm);

// Length-L vector, each entry with independent real and imaginary parts
// drawn N(0, 1/2) so that entry magnitudes are Rayleigh(1/sqrt(2)) and
// E[|entry|^2] = 1.
ComplexVector draw_channel(RngStream& stream, int antennas);

// One transmit power, uniform in dBm over the range, converted to linear mW.
double draw_power_mw(RngStream& stream, const DbmRange& range);

// Per-slot draws for every entity in the network, all channels taken
// toward one destination cluster head. Channels are redrawn independently
// every slot for every link.
struct ChannelDraw {
  int destination_cell = 0;
  // Indexed by Network::flat_index; cluster heads hold empty vectors and
  // zero power.
  std::vector<ComplexVector> channels;
  std::vector<double> powers_mw;
  double noise_variance = 1.0;
};

ChannelDraw draw_slot_channels(const Network& network, int destination_cell,
                               std::vector<RngStream>& channel_streams,
                               std::vector<RngStream>& power_streams);

// Matched filter: decoding vector proportional to the channel itself
// (the SINR is invariant to the proportionality constant, so v = h).
ComplexVector matched_filter(const ComplexVector& h);

struct SinrOptions {
  // When set, intra-cell interferers already decoded (in descending
  // received-power order) are cancelled from later UEs' denominators.
  bool ordered_sic = false;
};

// MF-SIC SINR of one legitimate UE, covering intra-cell UE interference,
// intra-cell jamming, inter-cell UE interference, inter-cell jamming, and
// noise. `activity` holds one entry per cell; the UE must have transmit
// flag 1 (asking for a silent UE's SINR is a caller error).
double sinr_mf_sic(const Network& network, const EntityId& ue,
                   const std::vector<SlotActivity>& activity, const ChannelDraw& draw,
                   const SinrOptions& options = {});

// log2(1 + sinr), bits per slot per hertz.
double achievable_rate(double sinr);

struct FrameRates {
  std::vector<double> per_ue;    // summed over slots
  std::vector<double> per_slot;  // summed over UEs
};

// rates[ue][slot]; non-transmitting slots contribute 0 by carrying rate 0.
FrameRates frame_rates(const std::vector<std::vector<double>>& rates);

}  // namespace sclarsim
