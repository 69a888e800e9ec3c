#include "tempctx/embedder.hpp"

#include <cstdio>
#include <fstream>

#include "tempctx/error.hpp"

namespace tempctx {

std::vector<double> Embedder::operator()(std::span<const float> frame) const {
  if (!model_) return std::vector<double>(frame.begin(), frame.end());
  return embed_eval(*model_, frame);
}

FrameEmbeddings embed_all_serial(const Dataset& d, const Embedder& e) {
  FrameEmbeddings out(d.sequences.size());
  for (std::size_t s = 0; s < d.sequences.size(); ++s) {
    out[s].reserve(d.sequences[s].num_frames);
    for (std::size_t f = 0; f < d.sequences[s].num_frames; ++f) out[s].push_back(e(d.frame(s, f)));
  }
  return out;
}

FrameEmbeddings embed_all_parallel(const Dataset& d, const Embedder& e) {
  FrameEmbeddings out(d.sequences.size());
  for (std::size_t s = 0; s < d.sequences.size(); ++s) out[s].resize(d.sequences[s].num_frames);
  const auto n = static_cast<std::ptrdiff_t>(d.sequences.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < n; ++s)
    for (std::size_t f = 0; f < out[s].size(); ++f) out[s][f] = e(d.frame(static_cast<std::size_t>(s), f));
  return out;
}

std::vector<double> mean_embedding(const Dataset& d, std::size_t seq, std::span<const std::size_t> frames,
                                   const Embedder& e) {
  std::vector<double> acc;
  for (auto f : frames) {
    const auto v = e(d.frame(seq, f));
    if (acc.empty()) acc.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
  }
  for (auto& v : acc) v /= static_cast<double>(frames.size());
  return acc;
}

void write_embeddings_tsv(const Dataset& d, const FrameEmbeddings& emb, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[32];
  for (std::size_t s = 0; s < emb.size(); ++s) {
    for (std::size_t f = 0; f < emb[s].size(); ++f) {
      out << d.sequences[s].id << '\t' << f;
      for (double v : emb[s][f]) {
        std::snprintf(buf, sizeof buf, "\t%.9g", v);
        out << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace tempctx
