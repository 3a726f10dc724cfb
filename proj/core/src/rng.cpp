#include "sclarsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sclarsim {

namespace {

// splitmix64 finalizer; used to spread structured keys over the seed space.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }

}  // namespace

std::string_view entity_kind_label(EntityKind kind) {
  switch (kind) {
    case EntityKind::pue: return "pUE";
    case EntityKind::iue: return "iUE";
    case EntityKind::jammer: return "jammer";
    case EntityKind::cluster_head: return "CH";
  }
  return "?";
}

std::string to_string(const EntityId& id) {
  return std::string(entity_kind_label(id.kind)) + "#" + std::to_string(id.local_index) +
         "@cell" + std::to_string(id.cell_index);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - uniform() lies in (0, 1], keeping the log argument positive.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::string_view purpose_label(StreamPurpose purpose) {
  switch (purpose) {
    case StreamPurpose::channel: return "channel";
    case StreamPurpose::power: return "power";
    case StreamPurpose::schedule: return "schedule";
    case StreamPurpose::exploration: return "exploration";
    case StreamPurpose::replay_sampling: return "replay-sampling";
    case StreamPurpose::weight_init: return "weight-init";
  }
  return "?";
}

StreamPurpose purpose_from_label(std::string_view label) {
  for (auto p : {StreamPurpose::channel, StreamPurpose::power, StreamPurpose::schedule,
                 StreamPurpose::exploration, StreamPurpose::replay_sampling,
                 StreamPurpose::weight_init}) {
    if (label == purpose_label(p)) return p;
  }
  throw std::invalid_argument("unknown stream purpose label: " + std::string(label));
}

RngStream RngSet::derive(StreamPurpose purpose, const EntityId& entity) const {
  std::uint64_t h = mix64(master_seed_);
  h = combine(h, static_cast<std::uint64_t>(purpose) + 1);
  h = combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(entity.cell_index)));
  h = combine(h, static_cast<std::uint64_t>(entity.kind) + 1);
  h = combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(entity.local_index)));
  return RngStream(h);
}

RngStream RngSet::derive(std::string_view label, const EntityId& entity) const {
  return derive(purpose_from_label(label), entity);
}

}  // namespace sclarsim
