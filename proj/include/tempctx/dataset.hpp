#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tempctx {

// One video: an ordered run of frame feature vectors, stored frame-major.
struct FeatureSequence {
  std::string id;
  std::size_t num_frames = 0;
  std::vector<float> features;  // num_frames * dim
  std::optional<int> label;
  std::optional<std::vector<std::int32_t>> state_ids;  // synthetic ground truth only

  std::span<const float> frame(std::size_t i, std::size_t dim) const {
    return std::span<const float>(features).subspan(i * dim, dim);
  }
};

struct Dataset {
  std::size_t dim = 0;
  std::vector<FeatureSequence> sequences;

  std::span<const float> frame(std::size_t seq, std::size_t idx) const {
    return sequences[seq].frame(idx, dim);
  }
  std::size_t total_frames() const;
};

// Throws DataError naming the offending sequence (and frame, where relevant).
void validate(const Dataset& d);

Dataset load_dataset(const std::filesystem::path& manifest_path);

// Writes manifest.json plus one payload per sequence into dir; returns the
// manifest path. Output is a pure function of the dataset.
std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir);

// Endpoint-inclusive evenly spaced indices: round(i*(n-1)/(k-1)), rounding
// half away from zero. Duplicates appear when n < k.
std::vector<std::size_t> uniform_indices(std::size_t n, std::size_t k);

// Little-endian payload helpers shared with the checkpoint format.
void write_f32_le(std::ostream& out, std::span<const float> values);
void read_f32_le(std::istream& in, std::span<float> values);

}  // namespace tempctx
