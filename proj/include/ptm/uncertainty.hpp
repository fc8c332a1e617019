#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ptm/model.hpp"

namespace ptm {

struct UncertaintyReport {
  Eigen::VectorXd mean_probs;
  double entropy_bits = 0.0;
  double mutual_information_bits = 0.0;
  Eigen::VectorXd std_per_class;
  int sample_count = 0;
};

struct CalibrationBin {
  long count = 0;
  double accuracy = 0.0;   // fraction correct within the bin
  double confidence = 0.0;  // mean confidence within the bin
};

struct CalibrationReport {
  int bin_count = 0;
  std::vector<CalibrationBin> bins;
  double ece = 0.0;
};

/// Elementwise mean of the K per-sample probability vectors.
Eigen::VectorXd predictive_mean(const PredictionSamples &samples);

/// -sum p log2 p with 0 log 0 := 0.
double predictive_entropy(const Eigen::VectorXd &probs);

/// Entropy of the mean minus mean per-sample entropy, clamped at 0.
double mutual_information(const PredictionSamples &samples);

/// Population (divide-by-K) standard deviation per class.
Eigen::VectorXd std_dev(const PredictionSamples &samples);

UncertaintyReport uncertainty_report(const PredictionSamples &samples);

/// Equal-width bins over [0,1] with right-inclusive edges; confidence 0
/// falls in bin 1. Empty bins contribute nothing.
CalibrationReport ece(const std::vector<double> &confidences,
                      const std::vector<bool> &correct, int bin_count);

}  // namespace ptm
