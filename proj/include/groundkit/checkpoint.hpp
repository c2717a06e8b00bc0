#pragma once

#include <string>
#include <utility>
#include <vector>

#include "groundkit/tensor.hpp"

namespace groundkit::num {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Binary parameter checkpoint. Layout: magic "GKPT", version u32,
// tensor count u32, then per tensor: name length u32 + UTF-8 bytes,
// rank u32, dims u32 each, row-major little-endian f64 payload.
void save_checkpoint(const std::string& path, const NamedTensors& tensors);
NamedTensors load_checkpoint(const std::string& path);

}  // namespace groundkit::num
