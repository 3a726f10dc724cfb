#pragma once

// Reference policies: the omniscient network-aware oracle, the
// plain-dense FC-DQN agent variant, and the trivial random / always-hold
// policies used as floors.

#include "sclarsim/dqn.hpp"
#include "sclarsim/env.hpp"

namespace sclarsim {

// Dispatch iff the upcoming slot has no in-cell pUE transmission and no
// active in-cell jammer. The oracle reads the slot's realized schedule
// flags before acting.
IueAction oracle_action(const UpcomingSlot& upcoming);

IueAction random_action(RngStream& stream);

inline IueAction hold_action() { return IueAction::hold; }

// Same training machinery as the ResNet agent but with a plain dense
// trunk (stem -> head widths -> output) and zero residual blocks.
ModelArchitecture fc_dqn_architecture(std::size_t input_width,
                                      const ModelArchitecture& resnet_arch);

QAgent build_fc_dqn(std::size_t input_width, const ModelArchitecture& resnet_arch,
                    const DqnOptions& options, RngStream init_stream,
                    RngStream exploration_stream, RngStream replay_stream);

}  // namespace sclarsim
