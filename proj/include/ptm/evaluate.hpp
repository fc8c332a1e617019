#pragma once

#include <cstdint>
#include <vector>

#include "ptm/model.hpp"
#include "ptm/uncertainty.hpp"

namespace ptm {

struct ExampleEvaluation {
  int true_label = -1;  // -1 for unlabeled points
  int predicted = 0;
  double confidence = 0.0;  // max-class predictive-mean probability
  UncertaintyReport report;
};

struct BatchEvaluation {
  std::vector<ExampleEvaluation> examples;
  double accuracy = 0.0;  // over labeled examples only

  std::vector<double> confidences() const {
    std::vector<double> out;
    out.reserve(examples.size());
    for (const auto &e : examples) out.push_back(e.confidence);
    return out;
  }
  std::vector<bool> correct() const {
    std::vector<bool> out;
    out.reserve(examples.size());
    for (const auto &e : examples) out.push_back(e.predicted == e.true_label);
    return out;
  }
};

/// K-sample evaluation of each input; prediction is the argmax of the
/// predictive mean. Each example gets its own seed-derived stream.
template <class Machine>
BatchEvaluation evaluate_batch(const Model<Machine> &model,
                               const std::vector<BitVector> &features,
                               const std::vector<int> &labels, int samples,
                               std::uint64_t seed) {
  BatchEvaluation batch;
  int correct = 0, labeled = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    Rng rng = make_rng(derive_seed(seed, i));
    PredictionSamples preds =
        predict_distribution(model, features[i], samples, rng);
    ExampleEvaluation eval;
    eval.report = uncertainty_report(preds);
    eval.true_label = labels.empty() ? -1 : labels[i];
    int best = 0;
    for (int c = 1; c < eval.report.mean_probs.size(); ++c)
      if (eval.report.mean_probs(c) > eval.report.mean_probs(best)) best = c;
    eval.predicted = best;
    eval.confidence = eval.report.mean_probs(best);
    if (eval.true_label >= 0) {
      ++labeled;
      if (eval.predicted == eval.true_label) ++correct;
    }
    batch.examples.push_back(std::move(eval));
  }
  batch.accuracy =
      labeled > 0 ? static_cast<double>(correct) / labeled : 0.0;
  return batch;
}

}  // namespace ptm
