#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "tempctx/error.hpp"
#include "tempctx/eval.hpp"

namespace tempctx {

void finalize(EvalReport& r) {
  double s = 0.0;
  for (const auto& q : r.per_query) s += q.score;
  r.aggregate = r.per_query.empty() ? 0.0 : s / static_cast<double>(r.per_query.size());
}

std::string report_json(const EvalReport& r) {
  nlohmann::json j;
  j["task"] = r.task;
  j["aggregate"] = r.aggregate;
  j["num_queries"] = r.per_query.size();
  auto& pq = j["per_query"] = nlohmann::json::array();
  for (const auto& q : r.per_query) pq.push_back({{"id", q.id}, {"score", q.score}});
  return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& r) {
  std::string out = "query_id,score\n";
  char buf[64];
  for (const auto& q : r.per_query) {
    std::snprintf(buf, sizeof buf, ",%.17g\n", q.score);
    out += q.id + buf;
  }
  return out;
}

void write_report(const EvalReport& r, const std::filesystem::path& json_path,
                  const std::optional<std::filesystem::path>& csv_path) {
  std::ofstream j(json_path);
  j << report_json(r);
  if (!j) throw DataError("write failed for " + json_path.string());
  if (csv_path) {
    std::ofstream c(*csv_path);
    c << report_csv(r);
    if (!c) throw DataError("write failed for " + csv_path->string());
  }
}

}  // namespace tempctx
