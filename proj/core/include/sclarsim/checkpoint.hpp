#pragma once

// Self-describing parameter checkpoints. Layout (all integers and doubles
// little-endian):
//
//   magic "SCLRCKPT" | u32 version | u32 kind (1 = model, 2 = agent)
//   architecture: u64 input, stem, blocks, layers_per_block,
//                 head count, head widths..., output
//   per dense layer in traversal order: u64 rows, u64 cols,
//                 rows*cols f64 weights (row-major), u64 len, len f64 bias
//
// Agent checkpoints append the target network (same layout), the Adam
// state, the epsilon schedule, and the agent counters.

#include <iosfwd>
#include <string>

#include "sclarsim/neuralnet.hpp"

namespace sclarsim {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_model(std::ostream& out, const ModelParams& params);
ModelParams load_model(std::istream& in);

void save_model_file(const std::string& path, const ModelParams& params);
ModelParams load_model_file(const std::string& path);

// Raw helpers shared with the agent checkpoint writer in dqn.cpp.
namespace ckpt {
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
void write_params_body(std::ostream& out, const ModelParams& params);
ModelParams read_params_body(std::istream& in);
void write_header(std::ostream& out, std::uint32_t kind);
std::uint32_t read_header(std::istream& in);  // returns kind
}  // namespace ckpt

}  // namespace sclarsim
