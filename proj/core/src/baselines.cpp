#include "sclarsim/baselines.hpp"

namespace sclarsim {

IueAction oracle_action(const UpcomingSlot& upcoming) {
  return (!upcoming.agent_cell_pue_tx && !upcoming.agent_cell_jammed) ? IueAction::dispatch
                                                                      : IueAction::hold;
}

IueAction random_action(RngStream& stream) {
  return stream.uniform_index(2) == 1 ? IueAction::dispatch : IueAction::hold;
}

ModelArchitecture fc_dqn_architecture(std::size_t input_width,
                                      const ModelArchitecture& resnet_arch) {
  ModelArchitecture arch = resnet_arch;
  arch.input_width = input_width;
  arch.residual_blocks = 0;
  return arch;
}

QAgent build_fc_dqn(std::size_t input_width, const ModelArchitecture& resnet_arch,
                    const DqnOptions& options, RngStream init_stream,
                    RngStream exploration_stream, RngStream replay_stream) {
  const ModelArchitecture arch = fc_dqn_architecture(input_width, resnet_arch);
  return QAgent(init_model(arch, init_stream), options, exploration_stream, replay_stream);
}

}  // namespace sclarsim
