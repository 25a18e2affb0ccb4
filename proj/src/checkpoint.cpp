#include "newsrnn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "newsrnn/errors.hpp"

namespace newsrnn {

namespace {

constexpr char kMagic[8] = {'N', 'R', 'N', 'N', 'C', 'K', 'P', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void get_bytes(std::istream& in, char* dst, std::size_t n) {
  if (!in.read(dst, static_cast<std::streamsize>(n))) throw DataError("checkpoint is truncated");
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  get_bytes(in, reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  get_bytes(in, reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& d = ckpt.params.dims;
  out.write(kMagic, 8);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(d.news_width));
  put_u32(out, static_cast<std::uint32_t>(d.price_hidden));
  put_u32(out, static_cast<std::uint32_t>(d.news_hidden));
  put_u32(out, static_cast<std::uint32_t>(d.fusion_hidden));
  put_u64(out, ckpt.seed);
  put_u32(out, static_cast<std::uint32_t>(ckpt.config_echo.size()));
  out.write(ckpt.config_echo.data(), static_cast<std::streamsize>(ckpt.config_echo.size()));
  put_u32(out, RnnParams::kTensorCount);
  const auto tensors = ckpt.params.tensors();
  const auto& names = RnnParams::tensor_names();
  for (std::size_t t = 0; t < RnnParams::kTensorCount; ++t) {
    put_u32(out, static_cast<std::uint32_t>(names[t].size()));
    out.write(names[t].data(), static_cast<std::streamsize>(names[t].size()));
    put_u32(out, static_cast<std::uint32_t>(tensors[t]->rows));
    put_u32(out, static_cast<std::uint32_t>(tensors[t]->cols));
    for (double v : tensors[t]->data) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  get_bytes(in, magic, 8);
  if (!std::equal(magic, magic + 8, kMagic)) throw DataError("not a checkpoint (bad magic)");
  const auto version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  RnnDims dims;
  dims.news_width = get_u32(in);
  dims.price_hidden = get_u32(in);
  dims.news_hidden = get_u32(in);
  dims.fusion_hidden = get_u32(in);
  if (!dims.valid()) throw DataError("checkpoint has a zero layer width");

  Checkpoint ckpt;
  ckpt.seed = get_u64(in);
  const auto echo_len = get_u32(in);
  ckpt.config_echo.resize(echo_len);
  get_bytes(in, ckpt.config_echo.data(), echo_len);

  ckpt.params = RnnParams::zeros(dims);
  if (get_u32(in) != RnnParams::kTensorCount) throw DataError("checkpoint tensor count mismatch");
  auto tensors = ckpt.params.tensors();
  const auto& names = RnnParams::tensor_names();
  for (std::size_t t = 0; t < RnnParams::kTensorCount; ++t) {
    const auto name_len = get_u32(in);
    if (name_len > 256) throw DataError("checkpoint tensor name too long");
    std::string name(name_len, '\0');
    get_bytes(in, name.data(), name_len);
    if (name != names[t]) {
      throw DataError("checkpoint tensor " + std::to_string(t) + " is '" + name + "', expected '" +
                      std::string(names[t]) + "'");
    }
    const auto rows = get_u32(in);
    const auto cols = get_u32(in);
    if (rows != tensors[t]->rows || cols != tensors[t]->cols) {
      throw DataError("checkpoint tensor '" + name + "' has the wrong shape");
    }
    for (auto& v : tensors[t]->data) v = std::bit_cast<double>(get_u64(in));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(out, ckpt);
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

std::string describe(const TrainConfig& c) {
  std::ostringstream s;
  s << "learning_rate=" << fmt(c.learning_rate) << '\n'
    << "lr_decay=" << fmt(c.lr_decay) << '\n'
    << "l2=" << fmt(c.l2) << '\n'
    << "regularize_biases=" << (c.regularize_biases ? "true" : "false") << '\n'
    << "epochs=" << c.epochs << '\n'
    << "seed=" << c.seed << '\n'
    << "clip_norm=" << (c.clip_norm ? fmt(*c.clip_norm) : "none") << '\n'
    << "truncation=" << (c.truncation ? std::to_string(*c.truncation) : "none") << '\n';
  return s.str();
}

}  // namespace newsrnn
