#pragma once
#include <stdexcept>
#include <string>

#include "model.h"

namespace creinn {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// On-disk model format: one human-readable ASCII header line describing the
// architecture, then the parameter tensors as little-endian float32 in a
// fixed order (per linear layer Wc, Wr, bc, br row-major; then per IBN layer
// gamma_c, beta_c, gamma_r, beta_r, run_mc, run_vc, run_mr, run_vr).
// Internal math is double precision; storage is float32, so
// load(save(x)) == save(x) byte for byte.
struct Checkpoint {
  ModelSpec spec;
  Params params;
  uint64_t seed = 0;
  std::string dataset = "blobs";
  int trained_epochs = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
// Validates the header, payload size and that all loaded radii are >= 0.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace creinn
