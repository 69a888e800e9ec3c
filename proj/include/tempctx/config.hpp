#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "tempctx/classifier.hpp"
#include "tempctx/sampler.hpp"
#include "tempctx/synth.hpp"
#include "tempctx/trainer.hpp"

namespace tempctx {

// Flat key=value run configuration. Every key has a default; unknown keys
// are rejected. The resolved text (sorted key=value lines) and its digest
// identify a run.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool has_key(const std::string& key) const { return values_.count(key) != 0; }

  std::string resolved_text() const;
  std::string digest() const;

  std::uint64_t seed() const;
  std::size_t emb_dim() const;
  double dropout_rate() const;
  SamplerConfig sampler() const;
  TrainConfig train() const;
  SynthSpec synth() const;
  ClassifierConfig classifier() const;
  std::size_t min_len() const;
  std::size_t order_frames() const;
  std::size_t event_frames() const;

 private:
  std::map<std::string, std::string> values_;
};

// FNV-1a 64, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace tempctx
