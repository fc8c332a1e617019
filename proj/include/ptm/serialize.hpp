#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "ptm/data.hpp"
#include "ptm/model.hpp"

namespace ptm {

struct CorruptModelFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelProvenance {
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string dataset_digest;
};

/// Everything needed to reload and query a trained model: configuration,
/// per-class SPV (or classic state) arrays, the fitted binarizer, and
/// run provenance. Stored as versioned JSON.
struct ModelFile {
  static constexpr int kFormatVersion = 1;

  std::variant<PtmModel, ClassicModel> model;
  BinarizationSpec binarizer;  // empty thresholds when inputs are already bits
  ModelProvenance provenance;

  bool is_ptm() const { return std::holds_alternative<PtmModel>(model); }
  const MachineConfig &config() const;
  int num_classes() const;
};

std::string to_json(const ModelFile &file);
ModelFile model_from_json(const std::string &text);

void save_model(const ModelFile &file, const std::string &path);
ModelFile load_model(const std::string &path);

/// FNV-1a over the binarized features and labels; recorded in provenance.
std::string dataset_digest(const Dataset &dataset);

}  // namespace ptm
