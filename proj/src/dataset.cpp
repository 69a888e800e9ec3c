#include "tempctx/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"
#include "tempctx/error.hpp"

namespace tempctx {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_u32_le(std::ostream& out, std::span<const std::uint32_t> words) {
  std::vector<char> buf(words.size() * 4);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::uint32_t w = words[i];
    buf[4 * i + 0] = static_cast<char>(w & 0xffu);
    buf[4 * i + 1] = static_cast<char>((w >> 8) & 0xffu);
    buf[4 * i + 2] = static_cast<char>((w >> 16) & 0xffu);
    buf[4 * i + 3] = static_cast<char>((w >> 24) & 0xffu);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<std::uint32_t> decode_u32_le(const std::vector<unsigned char>& bytes) {
  std::vector<std::uint32_t> words(bytes.size() / 4);
  for (std::size_t i = 0; i < words.size(); ++i) {
    words[i] = std::uint32_t{bytes[4 * i]} | (std::uint32_t{bytes[4 * i + 1]} << 8) |
               (std::uint32_t{bytes[4 * i + 2]} << 16) | (std::uint32_t{bytes[4 * i + 3]} << 24);
  }
  return words;
}

std::vector<unsigned char> read_all(const fs::path& p, const std::string& seq_id) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("sequence '" + seq_id + "': cannot open payload " + p.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::string payload_name(std::size_t index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seq_%06zu%s", index, ext);
  return buf;
}

}  // namespace

void write_f32_le(std::ostream& out, std::span<const float> values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) words[i] = std::bit_cast<std::uint32_t>(values[i]);
  write_u32_le(out, words);
}

void read_f32_le(std::istream& in, std::span<float> values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw DataError("truncated float payload");
  const auto words = decode_u32_le(bytes);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<float>(words[i]);
}

std::size_t Dataset::total_frames() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.num_frames;
  return n;
}

void validate(const Dataset& d) {
  if (d.dim == 0) throw DataError("dataset dim must be positive");
  std::set<std::string> ids;
  for (const auto& s : d.sequences) {
    if (!ids.insert(s.id).second) throw DataError("duplicate sequence id '" + s.id + "'");
    if (s.num_frames == 0) throw DataError("sequence '" + s.id + "': no frames");
    if (s.features.size() != s.num_frames * d.dim)
      throw DataError("sequence '" + s.id + "': feature count " + std::to_string(s.features.size()) +
                      " does not match " + std::to_string(s.num_frames) + " frames x dim " +
                      std::to_string(d.dim));
    for (std::size_t i = 0; i < s.features.size(); ++i) {
      if (!std::isfinite(s.features[i]))
        throw DataError("sequence '" + s.id + "': non-finite value at frame " +
                        std::to_string(i / d.dim));
    }
    if (s.state_ids && s.state_ids->size() != s.num_frames)
      throw DataError("sequence '" + s.id + "': state annotation length mismatch");
  }
}

Dataset load_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest " + manifest_path.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }

  const fs::path base = manifest_path.parent_path();
  Dataset d;
  try {
    d.dim = m.at("dim").get<std::size_t>();
    if (d.dim == 0) throw DataError("manifest dim must be positive");
    for (const auto& e : m.at("sequences")) {
      FeatureSequence s;
      s.id = e.at("id").get<std::string>();
      s.num_frames = e.at("num_frames").get<std::size_t>();
      if (e.contains("dim") && e.at("dim").get<std::size_t>() != d.dim)
        throw DataError("sequence '" + s.id + "': dim " + e.at("dim").dump() +
                        " does not match dataset dim " + std::to_string(d.dim));
      if (e.contains("label")) s.label = e.at("label").get<int>();

      const auto bytes = read_all(base / e.at("path").get<std::string>(), s.id);
      const std::size_t frame_bytes = d.dim * 4;
      const std::size_t expected = s.num_frames * frame_bytes;
      if (bytes.size() != expected) {
        throw DataError("sequence '" + s.id + "': " +
                        (bytes.size() < expected ? std::string("truncated payload") : std::string("oversized payload")) +
                        ", " + std::to_string(bytes.size()) + " bytes for " + std::to_string(s.num_frames) +
                        " frames of dim " + std::to_string(d.dim) + " (frame " +
                        std::to_string(bytes.size() / frame_bytes) + " incomplete)");
      }
      const auto words = decode_u32_le(bytes);
      s.features.resize(words.size());
      for (std::size_t i = 0; i < words.size(); ++i) s.features[i] = std::bit_cast<float>(words[i]);

      if (e.contains("states_path")) {
        const auto sb = read_all(base / e.at("states_path").get<std::string>(), s.id);
        if (sb.size() != s.num_frames * 4)
          throw DataError("sequence '" + s.id + "': state payload has " + std::to_string(sb.size()) +
                          " bytes, expected " + std::to_string(s.num_frames * 4));
        const auto sw = decode_u32_le(sb);
        std::vector<std::int32_t> states(sw.size());
        for (std::size_t i = 0; i < sw.size(); ++i) states[i] = std::bit_cast<std::int32_t>(sw[i]);
        s.state_ids = std::move(states);
      }
      d.sequences.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw DataError("manifest " + manifest_path.string() + " does not match the expected schema: " + e.what());
  }
  validate(d);
  return d;
}

fs::path save_dataset(const Dataset& d, const fs::path& dir) {
  validate(d);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  json seqs = json::array();
  for (std::size_t i = 0; i < d.sequences.size(); ++i) {
    const auto& s = d.sequences[i];
    json e;
    e["id"] = s.id;
    e["path"] = payload_name(i, ".f32");
    e["num_frames"] = s.num_frames;
    if (s.label) e["label"] = *s.label;

    std::ofstream out(dir / payload_name(i, ".f32"), std::ios::binary);
    write_f32_le(out, s.features);
    if (!out) throw DataError("write failed for sequence '" + s.id + "'");

    if (s.state_ids) {
      e["states_path"] = payload_name(i, ".states.i32");
      std::vector<std::uint32_t> words(s.state_ids->size());
      for (std::size_t k = 0; k < words.size(); ++k) words[k] = std::bit_cast<std::uint32_t>((*s.state_ids)[k]);
      std::ofstream so(dir / payload_name(i, ".states.i32"), std::ios::binary);
      write_u32_le(so, words);
      if (!so) throw DataError("write failed for states of sequence '" + s.id + "'");
    }
    seqs.push_back(std::move(e));
  }
  json m;
  m["dim"] = d.dim;
  m["sequences"] = std::move(seqs);

  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest);
  out << m.dump(2) << '\n';
  if (!out) throw DataError("write failed for " + manifest.string());
  return manifest;
}

std::vector<std::size_t> uniform_indices(std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(k, 0);
  if (n <= 1 || k <= 1) return idx;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(k - 1);
    idx[i] = static_cast<std::size_t>(std::round(x));
  }
  return idx;
}

}  // namespace tempctx
