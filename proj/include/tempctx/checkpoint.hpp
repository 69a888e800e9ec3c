#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tempctx/model.hpp"

namespace tempctx {

struct Checkpoint {
  EmbeddingModel model;
  std::uint64_t iteration = 0;
  std::string config_digest;
};

// Layout: one line of JSON {in_dim, emb_dim, lrn, dropout_rate, iteration,
// config_digest}, a newline, then W (row-major) and b as little-endian
// float32. Parameters are written as float32, so the round trip is exact for
// models on the float32 grid (everything the trainer produces).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tempctx
