#pragma once

#include <cstdint>
#include <string>

#include "wein/model_types.hpp"

namespace wein {

// Checkpoint layout (all integers and reals little-endian):
//   bytes 0-3   magic "WEIN"
//   u32         format version (1)
//   u32 x 4     stage conv counts (self-description; must be 2,2,3,3)
//   u32 x 4     stage widths
//   u32         side depth
//   u32         input channels
//   u32 x 2     declared input h, w
//   u64         RNG seed the parameters were initialized/trained with
//   f32 arrays  for each kernel in order [backbone 0..9, side 0..9,
//               collapse 0..3, fuse]: weights then bias
//   f32 arrays  optimizer momentum state, same kernel order, vw then vb

void save_checkpoint(const std::string& path, const ModelParams& params, uint64_t seed);

struct LoadedCheckpoint {
    ModelParams params;
    uint64_t seed = 0;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace wein
