#pragma once

#include <cstdint>
#include <string>

#include "qfem/model.hpp"

namespace qfem {

// Extra run provenance carried alongside the model weights.
struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int epochs_trained = 0;
  double best_val_loss = 0.0;
};

// JSON text; doubles use shortest round-trip formatting, so
// load(save(m)) reproduces the weights bit for bit.
std::string checkpoint_to_json(const nn::HybridModel& model,
                               const CheckpointMeta& meta);
nn::HybridModel checkpoint_from_json(const std::string& text,
                                     CheckpointMeta* meta = nullptr);

void save_checkpoint(const nn::HybridModel& model, const CheckpointMeta& meta,
                     const std::string& path);
nn::HybridModel load_checkpoint(const std::string& path,
                                CheckpointMeta* meta = nullptr);

}  // namespace qfem
