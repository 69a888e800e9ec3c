#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include <unistd.h>

#include "tempctx/dataset.hpp"
#include "tempctx/rng.hpp"

namespace tempctx::testing {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tempctx_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Gaussian features; lengths[i] frames for sequence i.
inline Dataset random_dataset(std::size_t dim, const std::vector<std::size_t>& lengths, std::uint64_t seed,
                              bool labeled = false) {
  Rng rng(seed);
  Dataset d;
  d.dim = dim;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    FeatureSequence s;
    s.id = "v" + std::to_string(i);
    s.num_frames = lengths[i];
    s.features.resize(lengths[i] * dim);
    for (auto& v : s.features) v = static_cast<float>(rng.normal());
    if (labeled) s.label = static_cast<int>(i % 2);
    d.sequences.push_back(std::move(s));
  }
  return d;
}

}  // namespace tempctx::testing

