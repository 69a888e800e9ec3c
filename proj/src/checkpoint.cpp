#include "tempctx/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "tempctx/dataset.hpp"
#include "tempctx/error.hpp"

namespace tempctx {

using json = nlohmann::json;

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto& m = ckpt.model;
  validate(m);
  json h;
  h["in_dim"] = m.in_dim;
  h["emb_dim"] = m.emb_dim;
  h["lrn"] = {{"size", m.lrn.size}, {"k", m.lrn.k}, {"alpha", m.lrn.alpha}, {"beta", m.lrn.beta}};
  h["dropout_rate"] = m.dropout_rate;
  h["iteration"] = ckpt.iteration;
  h["config_digest"] = ckpt.config_digest;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << h.dump() << '\n';
  std::vector<float> w(m.weights.begin(), m.weights.end());
  std::vector<float> b(m.bias.begin(), m.bias.end());
  write_f32_le(out, w);
  write_f32_le(out, b);
  if (!out) throw DataError("write failed for checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::string header;
  std::getline(in, header);
  Checkpoint c;
  try {
    const auto h = json::parse(header);
    c.model.in_dim = h.at("in_dim").get<std::size_t>();
    c.model.emb_dim = h.at("emb_dim").get<std::size_t>();
    const auto& l = h.at("lrn");
    c.model.lrn = {l.at("size").get<int>(), l.at("k").get<double>(), l.at("alpha").get<double>(),
                   l.at("beta").get<double>()};
    c.model.dropout_rate = h.at("dropout_rate").get<double>();
    c.iteration = h.at("iteration").get<std::uint64_t>();
    c.config_digest = h.at("config_digest").get<std::string>();
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + " has a malformed header: " + e.what());
  }
  std::vector<float> w(c.model.in_dim * c.model.emb_dim);
  std::vector<float> b(c.model.emb_dim);
  try {
    read_f32_le(in, w);
    read_f32_le(in, b);
  } catch (const DataError&) {
    throw DataError("checkpoint " + path.string() + " is truncated");
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw DataError("checkpoint " + path.string() + " has trailing bytes");
  c.model.weights.assign(w.begin(), w.end());
  c.model.bias.assign(b.begin(), b.end());
  validate(c.model);
  return c;
}

}  // namespace tempctx
