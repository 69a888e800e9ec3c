#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/embedder.hpp"
#include "tempctx/eval.hpp"

namespace tempctx {

struct ClassifierConfig {
  double reg_lambda = 1e-4;
  std::size_t epochs = 100;
  double lr = 0.1;
  std::size_t anneal_every = 25;  // epochs
  double anneal_factor = 0.5;
  std::uint64_t seed = 1;
};

// One-vs-rest linear max-margin classifier (hinge loss + L2, trained by SGD).
struct LinearClassifier {
  std::vector<int> classes;  // ascending
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  double reg_lambda = 0.0;

  int predict(std::span<const double> x) const;
};

LinearClassifier train_classifier(std::span<const std::vector<double>> features, std::span<const int> labels,
                                  const ClassifierConfig& cfg = {});

// Per-query score is 1 for a correct prediction, 0 otherwise; aggregate is accuracy.
EvalReport classify_eval(const LinearClassifier& clf, std::span<const std::vector<double>> features,
                         std::span<const int> labels, std::span<const std::string> ids);

// Video descriptor: L2-normalized mean of frames_per_video uniform frame embeddings.
std::vector<double> video_descriptor(const Dataset& d, std::size_t seq, const Embedder& e,
                                     std::size_t frames_per_video = 4);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Within each class, sequences alternate train/test in dataset order.
TrainTestSplit split_train_test(const Dataset& d);

EvalReport classification_eval(const TrainTestSplit& split, const Embedder& e, const ClassifierConfig& cfg = {});

}  // namespace tempctx
