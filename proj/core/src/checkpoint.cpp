#include "sclarsim/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sclarsim {
namespace ckpt {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'C', 'L', 'R', 'C', 'K', 'P', 'T'};

void write_le(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

std::uint64_t read_le(std::istream& in, int bytes) {
  char buf[8];
  in.read(buf, bytes);
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v, 4); }
void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v, 8); }

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  write_le(out, bits, 8);
}

std::uint32_t read_u32(std::istream& in) { return static_cast<std::uint32_t>(read_le(in, 4)); }
std::uint64_t read_u64(std::istream& in) { return read_le(in, 8); }

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_le(in, 8);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void write_header(std::ostream& out, std::uint32_t kind) {
  out.write(kMagic.data(), kMagic.size());
  write_u32(out, kCheckpointVersion);
  write_u32(out, kind);
}

std::uint32_t read_header(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
  const std::uint32_t version = read_u32(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  return read_u32(in);
}

namespace {

void write_dense(std::ostream& out, const DenseLayer& layer) {
  write_u64(out, layer.out_width());
  write_u64(out, layer.in_width());
  for (double v : layer.weights.data()) write_f64(out, v);
  write_u64(out, layer.bias.size());
  for (double v : layer.bias.data()) write_f64(out, v);
}

DenseLayer read_dense(std::istream& in, Activation act) {
  DenseLayer layer;
  const std::uint64_t rows = read_u64(in);
  const std::uint64_t cols = read_u64(in);
  layer.weights = Tensor::matrix(rows, cols);
  for (auto& v : layer.weights.data()) v = read_f64(in);
  const std::uint64_t blen = read_u64(in);
  if (blen != rows) throw std::runtime_error("checkpoint: bias length mismatch");
  layer.bias = Tensor::vector(blen);
  for (auto& v : layer.bias.data()) v = read_f64(in);
  layer.activation = act;
  return layer;
}

}  // namespace

void write_params_body(std::ostream& out, const ModelParams& params) {
  const auto& a = params.arch;
  write_u64(out, a.input_width);
  write_u64(out, a.stem_width);
  write_u64(out, a.residual_blocks);
  write_u64(out, a.layers_per_block);
  write_u64(out, a.head_widths.size());
  for (std::size_t w : a.head_widths) write_u64(out, w);
  write_u64(out, a.output_width);
  for_each_layer(params, [&out](const DenseLayer& l) { write_dense(out, l); });
}

ModelParams read_params_body(std::istream& in) {
  ModelArchitecture arch;
  arch.input_width = read_u64(in);
  arch.stem_width = read_u64(in);
  arch.residual_blocks = read_u64(in);
  arch.layers_per_block = read_u64(in);
  const std::uint64_t n_head = read_u64(in);
  arch.head_widths.clear();
  for (std::uint64_t i = 0; i < n_head; ++i) arch.head_widths.push_back(read_u64(in));
  arch.output_width = read_u64(in);

  ModelParams params;
  params.arch = arch;
  if (arch.stem_width > 0) params.stem.push_back(read_dense(in, Activation::relu));
  for (std::size_t b = 0; b < arch.residual_blocks; ++b) {
    ResidualBlock block;
    for (std::size_t l = 0; l < arch.layers_per_block; ++l)
      block.layers.push_back(read_dense(in, Activation::relu));
    params.blocks.push_back(std::move(block));
  }
  for (std::size_t h = 0; h < arch.head_widths.size(); ++h)
    params.head.push_back(read_dense(in, Activation::relu));
  params.output = read_dense(in, Activation::identity);
  return params;
}

}  // namespace ckpt

void save_model(std::ostream& out, const ModelParams& params) {
  ckpt::write_header(out, 1);
  ckpt::write_params_body(out, params);
  if (!out) throw std::runtime_error("checkpoint: write failure");
}

ModelParams load_model(std::istream& in) {
  if (ckpt::read_header(in) != 1) throw std::runtime_error("checkpoint: not a model checkpoint");
  return ckpt::read_params_body(in);
}

void save_model_file(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  save_model(out, params);
}

ModelParams load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
  return load_model(in);
}

}  // namespace sclarsim
