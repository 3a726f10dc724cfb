#pragma once

// Deterministic random-stream management. Every stochastic draw in the
// simulator descends from one master seed through named, mutually
// independent substreams, so that e.g. changing exploration draws never
// perturbs channel draws.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace sclarsim {

enum class EntityKind : std::uint8_t { pue = 0, iue = 1, jammer = 2, cluster_head = 3 };

std::string_view entity_kind_label(EntityKind kind);

// (cell, kind, local index) is unique network-wide; exactly one iUE and
// one cluster head exist per cell (their local_index is 0).
struct EntityId {
  int cell_index = 0;
  EntityKind kind = EntityKind::pue;
  int local_index = 0;

  friend bool operator==(const EntityId&, const EntityId&) = default;
};

std::string to_string(const EntityId& id);

// A self-contained random stream: a fully specified mt19937_64 engine plus
// hand-rolled uniform/Gaussian transforms, so sequences are bit-identical
// across platforms and standard-library versions.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform on {0, ..., n-1} via Lemire's multiply-shift.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached so exactly two uniforms are consumed per pair.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class StreamPurpose : std::uint8_t {
  channel = 0,
  power,
  schedule,
  exploration,
  replay_sampling,
  weight_init,
};

std::string_view purpose_label(StreamPurpose purpose);

// Throws std::invalid_argument for labels outside the registered set.
StreamPurpose purpose_from_label(std::string_view label);

// Derives per-(purpose, entity) substreams from the master seed. The seed
// of a substream is a pure function of (master_seed, purpose, entity), so
// repeated derivation yields identical streams.
class RngSet {
 public:
  explicit RngSet(std::uint64_t master_seed) : master_seed_(master_seed) {}

  std::uint64_t master_seed() const { return master_seed_; }

  RngStream derive(StreamPurpose purpose, const EntityId& entity) const;
  RngStream derive(std::string_view purpose_label, const EntityId& entity) const;

 private:
  std::uint64_t master_seed_;
};

}  // namespace sclarsim
