#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "tempctx/classifier.hpp"
#include "tempctx/error.hpp"
#include "tempctx/eval.hpp"

using namespace tempctx;

namespace {

// Each video repeats one feature vector for all of its frames.
Dataset constant_videos(const std::vector<std::vector<float>>& vecs, const std::vector<int>& labels,
                        std::size_t frames = 4) {
  Dataset d;
  d.dim = vecs.front().size();
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    FeatureSequence s;
    s.id = "v" + std::to_string(i);
    s.num_frames = frames;
    for (std::size_t f = 0; f < frames; ++f) s.features.insert(s.features.end(), vecs[i].begin(), vecs[i].end());
    s.label = labels[i];
    d.sequences.push_back(std::move(s));
  }
  return d;
}

}  // namespace

TEST_CASE("cosine") {
  const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, z{0, 0}, n{-3, 0};
  CHECK(cosine(a, b) == 0.0);
  CHECK(cosine(a, c) == 1.0);
  CHECK(cosine(a, n) == -1.0);
  CHECK(cosine(a, z) == 0.0);
  const std::vector<double> x{1, 2, 3}, y{4, -5, 6};
  CHECK(cosine(x, y) == doctest::Approx(12.0 / (std::sqrt(14.0) * std::sqrt(77.0))).epsilon(1e-15));
  CHECK_THROWS_AS(cosine(a, x), DataError);
}

TEST_CASE("average_precision") {
  auto ap = [](std::vector<int> r) {
    auto flags = std::make_unique<bool[]>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) flags[i] = r[i] != 0;
    return average_precision({flags.get(), r.size()});
  };
  CHECK(ap({1, 0, 1, 0}) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));
  CHECK(ap({1, 1, 1}) == 1.0);
  CHECK(ap({0, 0, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ap({0, 0}), DataError);

  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> rel(1 + rng.uniform_index(60));
    for (auto& v : rel) v = rng.bernoulli(0.3);
    rel[rng.uniform_index(rel.size())] = 1;
    CHECK(std::abs(ap(rel) - oracle::ap_definitional(rel)) < 1e-12);
  }
}

TEST_CASE("event retrieval on a hand-computed layout") {
  // cos(v0,v2) = .995, cos(v1,v3) = .995, cos(v2,v3) = .198, cos(v0,v3) = cos(v1,v2) = .0995
  const Dataset d = constant_videos({{1, 0}, {0, 1}, {1, 0.1f}, {0.1f, 1}}, {0, 0, 1, 1});
  const auto r = event_retrieval_map(d, Embedder::raw());
  REQUIRE(r.per_query.size() == 4);
  CHECK(r.per_query[0].score == doctest::Approx(1.0 / 3.0));
  CHECK(r.per_query[1].score == doctest::Approx(1.0 / 3.0));
  CHECK(r.per_query[2].score == doctest::Approx(0.5));
  CHECK(r.per_query[3].score == doctest::Approx(0.5));
  CHECK(r.aggregate == doctest::Approx(5.0 / 12.0));
  CHECK(r.task == "event_retrieval");
}

TEST_CASE("event retrieval: separated classes score 1, errors") {
  const Dataset d = constant_videos({{1, 0}, {2, 0}, {0, 1}, {0, 3}}, {5, 5, 7, 7});
  CHECK(event_retrieval_map(d, Embedder::raw()).aggregate == 1.0);
  Dataset single = constant_videos({{1, 0}, {2, 0}, {0, 1}}, {5, 5, 7});
  CHECK_THROWS_AS(event_retrieval_map(single, Embedder::raw()), DataError);
  Dataset unl = d;
  unl.sequences[2].label.reset();
  CHECK_THROWS_AS(event_retrieval_map(unl, Embedder::raw()), DataError);
}

TEST_CASE("temporal_split") {
  using V = std::vector<std::size_t>;
  const auto s = temporal_split(19);
  REQUIRE(s.has_value());
  CHECK(s->context == V{0, 6, 12, 18});
  CHECK(s->positives == V{7, 9, 11});
  CHECK(s->negatives == V{1, 2, 3, 4, 5, 13, 14, 15, 16, 17});
  CHECK_FALSE(temporal_split(18).has_value());
  CHECK_FALSE(temporal_split(12, 5).has_value());
  CHECK(temporal_split(14, 5).has_value());

  for (std::size_t n = 19; n <= 120; ++n) {
    const auto t = temporal_split(n);
    REQUIRE(t.has_value());
    const auto c1 = t->context[1], c2 = t->context[2];
    for (auto p : t->positives) CHECK((p > c1 && p < c2));
    for (auto q : t->negatives) {
      CHECK((q < c1 || q > c2));
      CHECK(std::find(t->context.begin(), t->context.end(), q) == t->context.end());
    }
    CHECK(std::adjacent_find(t->negatives.begin(), t->negatives.end()) == t->negatives.end());
    CHECK(t->negatives.size() <= 12);
  }
}

TEST_CASE("temporal retrieval is perfect when the span matches the context") {
  // Video 0: context frames and span frames along x, the rest along y.
  // Video 1 lies entirely along y.
  Dataset d;
  d.dim = 2;
  for (int v = 0; v < 2; ++v) {
    FeatureSequence s;
    s.id = "v" + std::to_string(v);
    s.num_frames = 19;
    for (std::size_t f = 0; f < 19; ++f) {
      const bool x = v == 0 && ((f > 6 && f < 12) || f % 6 == 0);
      s.features.push_back(x ? 1.0f : 0.0f);
      s.features.push_back(x ? 0.0f : 1.0f);
    }
    d.sequences.push_back(std::move(s));
  }
  const auto r = temporal_retrieval_map(d, Embedder::raw());
  REQUIRE(r.per_query.size() == 2);
  CHECK(r.per_query[0].score == 1.0);
  CHECK_THROWS_AS(temporal_retrieval_map(d, Embedder::raw(), 20), DataError);
}

TEST_CASE("kendall tau matches brute force on every small permutation") {
  for (std::size_t m = 2; m <= 5; ++m) {
    std::vector<std::size_t> base(m);
    std::iota(base.begin(), base.end(), 0);
    auto a = base;
    do {
      auto b = base;
      do {
        CHECK(kendall_tau_distance(a, b) == oracle::kendall_brute(a, b));
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
  Rng rng(5);
  std::vector<std::size_t> a(10), b(10);
  std::iota(a.begin(), a.end(), 100);
  std::iota(b.begin(), b.end(), 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(b.begin(), b.end(), rng.engine());
    CHECK(kendall_tau_distance(a, b) == oracle::kendall_brute(a, b));
  }
  const std::vector<std::size_t> id{0, 1, 2, 3}, rev{3, 2, 1, 0}, other{0, 1, 2, 4}, rep{0, 1, 1, 3};
  CHECK(kendall_tau_distance(id, id) == 0.0);
  CHECK(kendall_tau_distance(id, rev) == 100.0);
  CHECK_THROWS_AS(kendall_tau_distance(id, other), DataError);
  CHECK_THROWS_AS(kendall_tau_distance(rep, id), DataError);
}

TEST_CASE("greedy order recovery walks an arc") {
  // Points on an arc, frames 0 and 1 first, the rest shuffled.
  const std::size_t m = 10;
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(3);
  std::shuffle(perm.begin() + 2, perm.end(), rng.engine());
  std::vector<std::vector<double>> emb(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double th = 0.2 * static_cast<double>(perm[i]);
    emb[i] = {std::cos(th), std::sin(th)};
  }
  const auto order = recover_order_greedy(emb);
  REQUIRE(order.size() == m);
  for (std::size_t k = 0; k < m; ++k) CHECK(perm[order[k]] == k);
}

TEST_CASE("greedy order recovery breaks ties by lowest index") {
  const std::vector<std::vector<double>> same(5, std::vector<double>{1.0, 1.0});
  CHECK(recover_order_greedy(same) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("order recovery on monotone features is perfect") {
  Dataset d;
  d.dim = 2;
  FeatureSequence s;
  s.id = "a";
  s.num_frames = 24;
  for (std::size_t f = 0; f < 24; ++f) {
    const double th = 0.05 * static_cast<double>(f);
    s.features.push_back(static_cast<float>(std::cos(th)));
    s.features.push_back(static_cast<float>(std::sin(th)));
  }
  d.sequences.push_back(s);
  const auto r = order_recovery_eval(d, Embedder::raw());
  CHECK(r.aggregate == 0.0);
  CHECK_THROWS_AS(order_recovery_eval(d, Embedder::raw(), 30), DataError);
}

TEST_CASE("reports") {
  EvalReport r;
  r.task = "t";
  r.per_query = {{"a", 0.5}, {"b", 1.0}};
  finalize(r);
  CHECK(r.aggregate == 0.75);
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j.at("task") == "t");
  CHECK(j.at("aggregate").get<double>() == 0.75);
  CHECK(j.at("per_query").size() == 2);
  CHECK(report_csv(r) == "query_id,score\na,0.5\nb,1\n");
}

TEST_CASE("linear classifier") {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  Rng rng(8);
  const std::vector<std::vector<double>> centers{{3, 0}, {0, 3}, {-3, -3}};
  for (int i = 0; i < 90; ++i) {
    const int c = i % 3;
    x.push_back({centers[c][0] + 0.3 * rng.normal(), centers[c][1] + 0.3 * rng.normal()});
    y.push_back(10 + c);
  }
  const auto clf = train_classifier(x, y);
  CHECK(clf.classes == std::vector<int>{10, 11, 12});
  std::vector<std::string> ids(x.size(), "q");
  CHECK(classify_eval(clf, x, y, ids).aggregate == 1.0);

  const std::vector<int> one(x.size(), 1);
  CHECK_THROWS_AS(train_classifier(x, one), DataError);

  LinearClassifier tie;
  tie.classes = {2, 5};
  tie.weights = {{0.0}, {0.0}};
  tie.bias = {0.0, 0.0};
  const std::vector<double> q{1.0};
  CHECK(tie.predict(q) == 2);
}

TEST_CASE("train/test split alternates within each class") {
  const Dataset d = constant_videos({{1, 0}, {1, 0}, {0, 1}, {1, 0}, {0, 1}, {0, 1}}, {0, 0, 1, 0, 1, 1});
  const auto s = split_train_test(d);
  std::vector<std::string> tr, te;
  for (const auto& q : s.train.sequences) tr.push_back(q.id);
  for (const auto& q : s.test.sequences) te.push_back(q.id);
  CHECK(tr == std::vector<std::string>{"v0", "v2", "v3", "v5"});
  CHECK(te == std::vector<std::string>{"v1", "v4"});
}

TEST_CASE("video descriptor is unit length") {
  const Dataset d = tempctx::testing::random_dataset(5, {12, 7}, 3, true);
  for (std::size_t s = 0; s < 2; ++s) {
    const auto v = video_descriptor(d, s, Embedder::raw());
    double n = 0.0;
    for (double x : v) n += x * x;
    CHECK(n == doctest::Approx(1.0));
  }
}

TEST_CASE("serial and parallel embedding agree") {
  const Dataset d = tempctx::testing::random_dataset(6, {30, 12, 25}, 4);
  const auto e = Embedder::learned(init_model(6, 9, 2));
  CHECK(embed_all_serial(d, e) == embed_all_parallel(d, e));
  const auto raw = embed_all_serial(d, Embedder::raw());
  CHECK(raw[1][3][2] == static_cast<double>(d.frame(1, 3)[2]));
}
