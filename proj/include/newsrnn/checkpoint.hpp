#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "newsrnn/model.hpp"

namespace newsrnn {

// Binary checkpoint, all integers and floats little-endian:
//
//   bytes  field
//   8      magic "NRNNCKPT"
//   4      u32 format version (kCheckpointVersion)
//   16     u32 x4 dims: news_width, price_hidden, news_hidden, fusion_hidden
//   8      u64 seed
//   4      u32 config echo length n
//   n      config echo, UTF-8 `key=value` lines
//   4      u32 tensor count (9)
//   per tensor, in RnnParams::tensor_names() order:
//     4    u32 name length m
//     m    name bytes
//     4    u32 rows
//     4    u32 cols
//     8k   IEEE-754 binary64 values, row-major, k = rows * cols
struct Checkpoint {
  RnnParams params;
  std::uint64_t seed = 0;
  std::string config_echo;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
// Throws DataError on a bad magic, version, truncated stream or shape mismatch.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// `key=value` lines describing a training configuration.
std::string describe(const TrainConfig& config);

}  // namespace newsrnn
