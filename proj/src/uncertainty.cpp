#include "ptm/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptm {

Eigen::VectorXd predictive_mean(const PredictionSamples &samples) {
  if (samples.per_sample_probs.empty())
    throw std::invalid_argument("no prediction samples");
  Eigen::VectorXd mean =
      Eigen::VectorXd::Zero(samples.per_sample_probs.front().size());
  for (const auto &p : samples.per_sample_probs) mean += p;
  return mean / static_cast<double>(samples.sample_count());
}

double predictive_entropy(const Eigen::VectorXd &probs) {
  double h = 0.0;
  for (int c = 0; c < probs.size(); ++c)
    if (probs(c) > 0.0) h -= probs(c) * std::log2(probs(c));
  return h;
}

double mutual_information(const PredictionSamples &samples) {
  const double total = predictive_entropy(predictive_mean(samples));
  double expected = 0.0;
  for (const auto &p : samples.per_sample_probs)
    expected += predictive_entropy(p);
  expected /= samples.sample_count();
  return std::max(0.0, total - expected);
}

Eigen::VectorXd std_dev(const PredictionSamples &samples) {
  const Eigen::VectorXd mean = predictive_mean(samples);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(mean.size());
  for (const auto &p : samples.per_sample_probs)
    var += (p - mean).cwiseAbs2();
  var /= static_cast<double>(samples.sample_count());
  return var.cwiseSqrt();
}

UncertaintyReport uncertainty_report(const PredictionSamples &samples) {
  UncertaintyReport report;
  report.mean_probs = predictive_mean(samples);
  report.entropy_bits = predictive_entropy(report.mean_probs);
  report.mutual_information_bits = mutual_information(samples);
  report.std_per_class = std_dev(samples);
  report.sample_count = samples.sample_count();
  return report;
}

CalibrationReport ece(const std::vector<double> &confidences,
                      const std::vector<bool> &correct, int bin_count) {
  if (bin_count < 1) throw std::invalid_argument("bin count must be >= 1");
  if (confidences.empty() || confidences.size() != correct.size())
    throw std::invalid_argument("confidence / correctness size mismatch");
  CalibrationReport report;
  report.bin_count = bin_count;
  report.bins.assign(bin_count, CalibrationBin{});
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double conf = confidences[i];
    // right-inclusive edges: bin m covers ((m-1)/M, m/M]; 0 goes to bin 1
    int bin = static_cast<int>(std::ceil(conf * bin_count)) - 1;
    bin = std::clamp(bin, 0, bin_count - 1);
    auto &b = report.bins[bin];
    b.count += 1;
    b.accuracy += correct[i] ? 1.0 : 0.0;
    b.confidence += conf;
  }
  const double total = static_cast<double>(confidences.size());
  for (auto &b : report.bins) {
    if (b.count == 0) continue;
    b.accuracy /= b.count;
    b.confidence /= b.count;
    report.ece += (b.count / total) * std::abs(b.accuracy - b.confidence);
  }
  return report;
}

}  // namespace ptm
