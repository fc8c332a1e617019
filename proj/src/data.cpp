#include "ptm/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace ptm {

Dataset gen_noisy_xor(int n, double noise, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  if (noise < 0.0 || noise > 1.0)
    throw std::invalid_argument("noise rate must be in [0,1]");
  Dataset dataset;
  dataset.num_classes = 2;
  dataset.provenance = {"noisy-xor", seed, noise};
  Rng rng = make_rng(seed);
  dataset.features.reserve(n);
  dataset.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const std::uint8_t x1 = bernoulli(rng, 0.5) ? 1 : 0;
    const std::uint8_t x2 = bernoulli(rng, 0.5) ? 1 : 0;
    int label = x1 ^ x2;
    if (bernoulli(rng, noise)) label = 1 - label;
    dataset.features.push_back({x1, x2});
    dataset.labels.push_back(label);
  }
  return dataset;
}

Dataset xor_truth_table() {
  Dataset dataset;
  dataset.num_classes = 2;
  dataset.provenance = {"xor-truth-table", 0, 0.0};
  dataset.features = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  dataset.labels = {0, 1, 1, 0};
  return dataset;
}

Blobs2d gen_blobs_2d(int n_train, int n_test, std::uint64_t seed) {
  if (n_train < 1 || n_test < 1)
    throw std::invalid_argument("counts must be >= 1");
  Blobs2d blobs;
  blobs.mean0 << -1.5, -1.5;
  blobs.mean1 << 1.5, 1.5;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, blobs.sigma);

  blobs.train.features.resize(n_train, 2);
  blobs.train.labels.resize(n_train);
  blobs.train.num_classes = 2;
  const int per_class = n_train / 2;
  for (int i = 0; i < n_train; ++i) {
    const int label = i < per_class ? 0 : 1;
    const Eigen::Vector2d &mean = label == 0 ? blobs.mean0 : blobs.mean1;
    blobs.train.features(i, 0) = mean(0) + gauss(rng);
    blobs.train.features(i, 1) = mean(1) + gauss(rng);
    blobs.train.labels[i] = label;
  }

  blobs.train_min = blobs.train.features.colwise().minCoeff();
  blobs.train_max = blobs.train.features.colwise().maxCoeff();
  const Eigen::Vector2d center = 0.5 * (blobs.train_min + blobs.train_max);
  const Eigen::Vector2d half = 1.5 * (blobs.train_max - blobs.train_min);
  const Eigen::Vector2d lo = center - 0.5 * half;
  const Eigen::Vector2d hi = center + 0.5 * half;

  blobs.test_points.resize(n_test, 2);
  for (int i = 0; i < n_test; ++i)
    for (int d = 0; d < 2; ++d)
      blobs.test_points(i, d) =
          lo(d) + uniform01(rng) * (hi(d) - lo(d));
  return blobs;
}

namespace {

bool numeric_field(const std::string &field) {
  char *end = nullptr;
  std::strtod(field.c_str(), &end);
  return end != field.c_str() && *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  return fields;
}

}  // namespace

RawTable load_iris(const std::string &path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open dataset file: " + path);
  RawTable table;
  std::vector<Eigen::VectorXd> rows;
  std::map<std::string, int> label_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw ParseError("row " + std::to_string(line_no) +
                       ": expected 5 comma-separated fields");
    if (line_no == 1 && !numeric_field(fields[0])) continue;  // header
    Eigen::VectorXd row(4);
    for (int c = 0; c < 4; ++c) {
      if (!numeric_field(fields[c]))
        throw ParseError("row " + std::to_string(line_no) +
                         ": non-numeric field '" + fields[c] + "'");
      row(c) = std::strtod(fields[c].c_str(), nullptr);
    }
    rows.push_back(row);
    const std::string &label = fields[4];
    auto [it, inserted] =
        label_ids.emplace(label, static_cast<int>(label_ids.size()));
    table.labels.push_back(it->second);
  }
  if (rows.empty()) throw ParseError("dataset file is empty: " + path);
  table.features.resize(static_cast<int>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    table.features.row(static_cast<int>(i)) = rows[i];
  table.num_classes = static_cast<int>(label_ids.size());
  return table;
}

int BinarizationSpec::bit_count() const {
  int bits = 0;
  for (const auto &t : thresholds) bits += static_cast<int>(t.size());
  return bits;
}

BinarizationSpec fit_binarizer(const Eigen::MatrixXd &train_features,
                               int bits_per_feature) {
  if (bits_per_feature < 1)
    throw std::invalid_argument("bits per feature must be >= 1");
  BinarizationSpec spec;
  const int rows = static_cast<int>(train_features.rows());
  for (int c = 0; c < train_features.cols(); ++c) {
    std::vector<double> values(rows);
    for (int i = 0; i < rows; ++i) values[i] = train_features(i, c);
    std::sort(values.begin(), values.end());
    std::vector<double> thresholds;
    for (int i = 1; i <= bits_per_feature; ++i) {
      const double q = static_cast<double>(i) / (bits_per_feature + 1);
      const double pos = q * (rows - 1);
      const int lo = static_cast<int>(pos);
      const double frac = pos - lo;
      const double t = lo + 1 < rows
                           ? values[lo] * (1.0 - frac) + values[lo + 1] * frac
                           : values[lo];
      // duplicate quantiles collapse to a single threshold
      if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
    }
    if (values.front() == values.back()) thresholds.clear();  // constant
    spec.thresholds.push_back(std::move(thresholds));
  }
  return spec;
}

BitVector binarize_row(const Eigen::VectorXd &row,
                       const BinarizationSpec &spec) {
  if (row.size() != static_cast<int>(spec.thresholds.size()))
    throw std::invalid_argument("feature width does not match binarizer");
  BitVector bits;
  bits.reserve(spec.bit_count());
  for (int c = 0; c < row.size(); ++c)
    for (double t : spec.thresholds[c]) bits.push_back(row(c) > t ? 1 : 0);
  return bits;
}

std::vector<BitVector> binarize(const Eigen::MatrixXd &features,
                                const BinarizationSpec &spec) {
  std::vector<BitVector> rows;
  rows.reserve(features.rows());
  for (int i = 0; i < features.rows(); ++i)
    rows.push_back(binarize_row(features.row(i), spec));
  return rows;
}

namespace {

std::vector<std::vector<int>> stratified_indexes(const std::vector<int> &labels,
                                                 int num_classes,
                                                 double train_fraction,
                                                 std::uint64_t seed,
                                                 std::vector<int> &train_idx,
                                                 std::vector<int> &test_idx) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw std::invalid_argument("train fraction must be in (0,1)");
  std::vector<std::vector<int>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<int>(i));
  Rng rng = make_rng(derive_seed(seed, 0x5b717));
  for (int c = 0; c < num_classes; ++c) {
    auto &idx = by_class[c];
    if (idx.size() < 2)
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has fewer than 2 members");
    std::shuffle(idx.begin(), idx.end(), rng);
    const int n_train = std::max(
        1, static_cast<int>(std::lround(train_fraction * idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (static_cast<int>(i) < n_train ? train_idx : test_idx).push_back(idx[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return by_class;
}

}  // namespace

void split(const Dataset &dataset, double train_fraction, std::uint64_t seed,
           Dataset &train, Dataset &test) {
  std::vector<int> train_idx, test_idx;
  stratified_indexes(dataset.labels, dataset.num_classes, train_fraction, seed,
                     train_idx, test_idx);
  train = Dataset{{}, {}, dataset.num_classes, dataset.provenance};
  test = Dataset{{}, {}, dataset.num_classes, dataset.provenance};
  for (int i : train_idx) {
    train.features.push_back(dataset.features[i]);
    train.labels.push_back(dataset.labels[i]);
  }
  for (int i : test_idx) {
    test.features.push_back(dataset.features[i]);
    test.labels.push_back(dataset.labels[i]);
  }
}

void split_raw(const RawTable &table, double train_fraction,
               std::uint64_t seed, RawTable &train, RawTable &test) {
  std::vector<int> train_idx, test_idx;
  stratified_indexes(table.labels, table.num_classes, train_fraction, seed,
                     train_idx, test_idx);
  auto take = [&](const std::vector<int> &idx, RawTable &out) {
    out.features.resize(static_cast<int>(idx.size()), table.features.cols());
    out.labels.clear();
    out.num_classes = table.num_classes;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.features.row(static_cast<int>(i)) = table.features.row(idx[i]);
      out.labels.push_back(table.labels[idx[i]]);
    }
  };
  take(train_idx, train);
  take(test_idx, test);
}

}  // namespace ptm
