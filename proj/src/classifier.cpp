#include "tempctx/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tempctx/error.hpp"
#include "tempctx/rng.hpp"

namespace tempctx {

int LinearClassifier::predict(std::span<const double> x) const {
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double s = bias[c];
    for (std::size_t i = 0; i < x.size(); ++i) s += weights[c][i] * x[i];
    if (c == 0 || s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return classes[best];
}

LinearClassifier train_classifier(std::span<const std::vector<double>> features, std::span<const int> labels,
                                  const ClassifierConfig& cfg) {
  if (features.size() != labels.size() || features.empty())
    throw DataError("classifier: features and labels must be non-empty and aligned");
  const std::size_t dim = features.front().size();
  for (const auto& f : features)
    if (f.size() != dim) throw DataError("classifier: feature dims differ");

  LinearClassifier clf;
  clf.reg_lambda = cfg.reg_lambda;
  clf.classes.assign(labels.begin(), labels.end());
  std::sort(clf.classes.begin(), clf.classes.end());
  clf.classes.erase(std::unique(clf.classes.begin(), clf.classes.end()), clf.classes.end());
  if (clf.classes.size() < 2) throw DataError("classifier: training set has a single class");
  clf.weights.assign(clf.classes.size(), std::vector<double>(dim, 0.0));
  clf.bias.assign(clf.classes.size(), 0.0);

  std::vector<std::size_t> order(features.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Same visiting order for every binary problem.
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::derive(cfg.seed, {epoch});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    const double lr = cfg.lr * std::pow(cfg.anneal_factor, static_cast<double>(epoch / cfg.anneal_every));

    for (std::size_t c = 0; c < clf.classes.size(); ++c) {
      auto& w = clf.weights[c];
      double& b = clf.bias[c];
      for (std::size_t idx : order) {
        const auto& x = features[idx];
        const double y = labels[idx] == clf.classes[c] ? 1.0 : -1.0;
        double s = b;
        for (std::size_t i = 0; i < dim; ++i) s += w[i] * x[i];
        const double shrink = 1.0 - lr * cfg.reg_lambda;
        for (auto& v : w) v *= shrink;
        if (y * s < 1.0) {
          for (std::size_t i = 0; i < dim; ++i) w[i] += lr * y * x[i];
          b += lr * y;
        }
      }
    }
  }
  return clf;
}

EvalReport classify_eval(const LinearClassifier& clf, std::span<const std::vector<double>> features,
                         std::span<const int> labels, std::span<const std::string> ids) {
  if (features.size() != labels.size() || features.size() != ids.size() || features.empty())
    throw DataError("classify_eval: test set must be non-empty and aligned");
  EvalReport r;
  r.task = "classification";
  for (std::size_t i = 0; i < features.size(); ++i)
    r.per_query.push_back({ids[i], clf.predict(features[i]) == labels[i] ? 1.0 : 0.0});
  finalize(r);
  return r;
}

std::vector<double> video_descriptor(const Dataset& d, std::size_t seq, const Embedder& e,
                                     std::size_t frames_per_video) {
  const auto idx = uniform_indices(d.sequences[seq].num_frames, frames_per_video);
  auto v = mean_embedding(d, seq, idx, e);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (auto& x : v) x /= norm;
  return v;
}

TrainTestSplit split_train_test(const Dataset& d) {
  TrainTestSplit s;
  s.train.dim = s.test.dim = d.dim;
  std::map<int, std::size_t> seen;
  for (const auto& seq : d.sequences) {
    if (!seq.label) throw DataError("classification: sequence '" + seq.id + "' has no label");
    auto& count = seen[*seq.label];
    (count++ % 2 == 0 ? s.train : s.test).sequences.push_back(seq);
  }
  return s;
}

EvalReport classification_eval(const TrainTestSplit& split, const Embedder& e, const ClassifierConfig& cfg) {
  auto collect = [&](const Dataset& d, std::vector<std::vector<double>>& x, std::vector<int>& y,
                     std::vector<std::string>& ids) {
    for (std::size_t s = 0; s < d.sequences.size(); ++s) {
      if (!d.sequences[s].label) throw DataError("classification: sequence '" + d.sequences[s].id + "' has no label");
      x.push_back(video_descriptor(d, s, e));
      y.push_back(*d.sequences[s].label);
      ids.push_back(d.sequences[s].id);
    }
  };
  std::vector<std::vector<double>> xtr, xte;
  std::vector<int> ytr, yte;
  std::vector<std::string> idtr, idte;
  collect(split.train, xtr, ytr, idtr);
  collect(split.test, xte, yte, idte);
  const auto clf = train_classifier(xtr, ytr, cfg);
  return classify_eval(clf, xte, yte, idte);
}

}  // namespace tempctx
