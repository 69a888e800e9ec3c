#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/embedder.hpp"

namespace tempctx {

struct QueryScore {
  std::string id;
  double score = 0.0;
};

struct EvalReport {
  std::string task;  // event_retrieval | temporal_retrieval | order_recovery | classification
  double aggregate = 0.0;
  std::vector<QueryScore> per_query;
};

// Sets aggregate to the mean of per_query scores.
void finalize(EvalReport& r);

std::string report_json(const EvalReport& r);
std::string report_csv(const EvalReport& r);
void write_report(const EvalReport& r, const std::filesystem::path& json_path,
                  const std::optional<std::filesystem::path>& csv_path = {});

// x.y / (|x||y|), 0 when either norm is 0.
double cosine(std::span<const double> x, std::span<const double> y);

// Mean over relevant positions k of precision@k. Throws when nothing is relevant.
double average_precision(std::span<const bool> ranked_relevance);

// --- event retrieval -------------------------------------------------------

// Each video is the mean embedding of 4 uniformly sampled frames; every other
// video is ranked by cosine (ties by sequence id) and same label is relevant.
EvalReport event_retrieval_map(const Dataset& d, const Embedder& e, std::size_t frames_per_video = 4);

// --- temporal retrieval ----------------------------------------------------

struct TemporalSplit {
  std::vector<std::size_t> context;    // 4 uniform frames
  std::vector<std::size_t> positives;  // 3 evenly spaced, strictly between context[1] and context[2]
  std::vector<std::size_t> negatives;  // evenly spaced over [0, c1) u (c2, n-1] minus context, deduplicated
};

// nullopt when the video is shorter than min_len or the index sets cannot be formed.
std::optional<TemporalSplit> temporal_split(std::size_t n, std::size_t min_len = 19);

EvalReport temporal_retrieval_map(const Dataset& d, const Embedder& e, std::size_t min_len = 19);

// --- order recovery --------------------------------------------------------

// Starts from [0, 1]; repeatedly appends the unplaced frame with highest
// cosine to the mean of the last two placed frames (ties by lowest index).
std::vector<std::size_t> recover_order_greedy(std::span<const std::vector<double>> frame_embeddings);

// 100 * discordant pairs / (m(m-1)/2); O(m log m) by inversion counting.
double kendall_tau_distance(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Per video: frames_per_video uniform frames, greedy recovery, tau distance to
// the true order over the recovered frames (the two given seed frames are
// excluded from scoring).
EvalReport order_recovery_eval(const Dataset& d, const Embedder& e, std::size_t frames_per_video = 12);

}  // namespace tempctx
