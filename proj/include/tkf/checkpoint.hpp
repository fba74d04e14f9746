#pragma once

#include "tkf/filter.hpp"
#include "tkf/model.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace tkf {

// Everything needed to resume a run at a step boundary, given the same
// complex and options.
struct Checkpoint {
  ModelParams params;
  FilterState state;
  std::vector<std::uint8_t> activation;
};

Checkpoint capture_checkpoint(const Tkf& filter);

// JSON document; matrices are {"rows", "cols", "data"} with row-major data.
// Doubles are written in shortest round-trip form, so loading reproduces
// every bit.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Rebuilds a filter on `complex` from a checkpoint.
Tkf resume_filter(CellComplex complex, const Checkpoint& checkpoint, const TkfOptions& options);

}  // namespace tkf
