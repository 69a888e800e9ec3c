#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/model.hpp"

namespace tempctx {

// Frame -> vector map used by every evaluation protocol. Either the learned
// model in eval mode, or the identity on raw features (baseline columns).
class Embedder {
 public:
  static Embedder raw() { return Embedder(std::nullopt); }
  static Embedder learned(EmbeddingModel m) { return Embedder(std::move(m)); }

  std::vector<double> operator()(std::span<const float> frame) const;
  bool is_raw() const { return !model_.has_value(); }

 private:
  explicit Embedder(std::optional<EmbeddingModel> m) : model_(std::move(m)) {}
  std::optional<EmbeddingModel> model_;
};

// All frame embeddings of one dataset, laid out [sequence][frame].
using FrameEmbeddings = std::vector<std::vector<std::vector<double>>>;

// Serial reference and OpenMP kernel; outputs are identical.
FrameEmbeddings embed_all_serial(const Dataset& d, const Embedder& e);
FrameEmbeddings embed_all_parallel(const Dataset& d, const Embedder& e);

// Mean of the embeddings at the given frame indices.
std::vector<double> mean_embedding(const Dataset& d, std::size_t seq, std::span<const std::size_t> frames,
                                   const Embedder& e);

// id \t frame_idx \t v0 \t v1 ... for external plotting.
void write_embeddings_tsv(const Dataset& d, const FrameEmbeddings& emb, const std::filesystem::path& path);

}  // namespace tempctx
