#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ptm/model.hpp"
#include "ptm/rng.hpp"

namespace ptm {

struct Provenance {
  std::string generator;
  std::uint64_t seed = 0;
  double noise_rate = 0.0;
};

struct Dataset {
  std::vector<BitVector> features;  // D rows of o bits
  std::vector<int> labels;          // in [0, num_classes)
  int num_classes = 2;
  Provenance provenance;

  int size() const { return static_cast<int>(features.size()); }
  int feature_count() const {
    return features.empty() ? 0 : static_cast<int>(features.front().size());
  }
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// o = 2 uniform random bits per row; label = x1 xor x2, flipped
/// independently with probability `noise`.
Dataset gen_noisy_xor(int n, double noise, std::uint64_t seed);

/// The 4-row noise-free XOR truth table.
Dataset xor_truth_table();

struct RawTable {
  Eigen::MatrixXd features;  // D x f reals
  std::vector<int> labels;
  int num_classes = 0;
};

struct Blobs2d {
  RawTable train;              // two Gaussian clusters, balanced
  Eigen::MatrixXd test_points;  // unlabeled, over the expanded range
  Eigen::Vector2d train_min, train_max;  // training bounding box
  Eigen::Vector2d mean0, mean1;
  double sigma = 0.8;
};

/// Two isotropic Gaussians at (-1.5,-1.5) and (1.5,1.5), sigma 0.8,
/// balanced classes; test points uniform over the bounding box expanded
/// to 3x the training span.
Blobs2d gen_blobs_2d(int n_train, int n_test, std::uint64_t seed);

/// CSV with 4 numeric columns then a string or integer label column;
/// optional header auto-detected.
RawTable load_iris(const std::string &path);

struct BinarizationSpec {
  // per feature, strictly increasing thresholds; thermometer encoding
  // bit_i = 1 iff value > t_i
  std::vector<std::vector<double>> thresholds;

  int bit_count() const;
};

/// Thresholds at the i/(b+1) quantiles of the training split, i = 1..b.
/// Constant features get an empty threshold list.
BinarizationSpec fit_binarizer(const Eigen::MatrixXd &train_features,
                               int bits_per_feature);

BitVector binarize_row(const Eigen::VectorXd &row,
                       const BinarizationSpec &spec);
std::vector<BitVector> binarize(const Eigen::MatrixXd &features,
                                const BinarizationSpec &spec);

/// Stratified, seed-deterministic split.
void split(const Dataset &dataset, double train_fraction, std::uint64_t seed,
           Dataset &train, Dataset &test);

/// Raw-table variant, used before binarization so the spec can be fitted
/// on the training split only.
void split_raw(const RawTable &table, double train_fraction,
               std::uint64_t seed, RawTable &train, RawTable &test);

}  // namespace ptm
