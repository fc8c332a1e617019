#include "ptm/serialize.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ptm {

using nlohmann::json;

const MachineConfig &ModelFile::config() const {
  return std::visit([](const auto &m) -> const MachineConfig & {
    return m.config;
  }, model);
}

int ModelFile::num_classes() const {
  return std::visit([](const auto &m) { return m.num_classes; }, model);
}

namespace {

json config_to_json(const MachineConfig &cfg) {
  return json{{"clauses", cfg.clauses},
              {"threshold", cfg.threshold},
              {"specificity", cfg.specificity},
              {"states_per_action", cfg.states_per_action},
              {"features", cfg.features},
              {"one_hot_probs", cfg.one_hot_probs}};
}

MachineConfig config_from_json(const json &j) {
  MachineConfig cfg;
  cfg.clauses = j.at("clauses").get<int>();
  cfg.threshold = j.at("threshold").get<int>();
  cfg.specificity = j.at("specificity").get<double>();
  cfg.states_per_action = j.at("states_per_action").get<int>();
  cfg.features = j.at("features").get<int>();
  cfg.one_hot_probs = j.value("one_hot_probs", false);
  return cfg;
}

json spv_to_json(const StateProbabilityVector &spv) {
  std::vector<double> probs(spv.probs().data(),
                            spv.probs().data() + spv.probs().size());
  return json(probs);
}

}  // namespace

std::string to_json(const ModelFile &file) {
  json j;
  j["format_version"] = ModelFile::kFormatVersion;
  j["mode"] = file.is_ptm() ? "ptm" : "classic";
  j["config"] = config_to_json(file.config());
  j["num_classes"] = file.num_classes();
  json machines = json::array();
  if (file.is_ptm()) {
    for (const auto &machine : std::get<PtmModel>(file.model).machines) {
      json clauses = json::array();
      for (const auto &clause : machine.clauses) {
        json spvs = json::array();
        for (const auto &spv : clause.spvs) spvs.push_back(spv_to_json(spv));
        clauses.push_back(std::move(spvs));
      }
      machines.push_back(std::move(clauses));
    }
  } else {
    for (const auto &machine : std::get<ClassicModel>(file.model).machines) {
      json clauses = json::array();
      for (const auto &clause : machine.clauses)
        clauses.push_back(clause.states);
      machines.push_back(std::move(clauses));
    }
  }
  j["machines"] = std::move(machines);
  j["binarizer"] = file.binarizer.thresholds;
  j["provenance"] = {{"seed", file.provenance.seed},
                     {"epochs", file.provenance.epochs},
                     {"dataset_digest", file.provenance.dataset_digest}};
  return j.dump(2);
}

ModelFile model_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw CorruptModelFile(std::string("model file is not valid JSON: ") +
                           e.what());
  }
  try {
    if (j.at("format_version").get<int>() != ModelFile::kFormatVersion)
      throw CorruptModelFile("unsupported model format version");
    ModelFile file;
    const MachineConfig cfg = config_from_json(j.at("config"));
    cfg.validate();
    const int num_classes = j.at("num_classes").get<int>();
    const auto &machines = j.at("machines");
    const int n = cfg.states_per_action;
    if (j.at("mode") == "ptm") {
      PtmModel model;
      model.config = cfg;
      model.num_classes = num_classes;
      for (const auto &mj : machines) {
        PtmMachine machine;
        machine.config = cfg;
        for (const auto &cj : mj) {
          PtmClause clause;
          for (const auto &sj : cj) {
            auto probs = sj.get<std::vector<double>>();
            Eigen::VectorXd v =
                Eigen::Map<Eigen::VectorXd>(probs.data(), probs.size());
            StateProbabilityVector spv(v, n);
            if (!spv.is_valid_distribution())
              throw CorruptModelFile("SPV is not a valid distribution");
            clause.spvs.push_back(std::move(spv));
          }
          if (static_cast<int>(clause.spvs.size()) != 2 * cfg.features)
            throw CorruptModelFile("clause literal count mismatch");
          machine.clauses.push_back(std::move(clause));
        }
        model.machines.push_back(std::move(machine));
      }
      file.model = std::move(model);
    } else if (j.at("mode") == "classic") {
      ClassicModel model;
      model.config = cfg;
      model.num_classes = num_classes;
      for (const auto &mj : machines) {
        ClassicMachine machine;
        machine.config = cfg;
        for (const auto &cj : mj) {
          ClassicClause clause;
          clause.states = cj.get<std::vector<int>>();
          for (int state : clause.states)
            if (state < 1 || state > 2 * n)
              throw CorruptModelFile("automaton state out of range");
          machine.clauses.push_back(std::move(clause));
        }
        model.machines.push_back(std::move(machine));
      }
      file.model = std::move(model);
    } else {
      throw CorruptModelFile("unknown model mode");
    }
    file.binarizer.thresholds =
        j.at("binarizer").get<std::vector<std::vector<double>>>();
    const auto &prov = j.at("provenance");
    file.provenance.seed = prov.at("seed").get<std::uint64_t>();
    file.provenance.epochs = prov.at("epochs").get<int>();
    file.provenance.dataset_digest = prov.at("dataset_digest").get<std::string>();
    return file;
  } catch (const json::exception &e) {
    throw CorruptModelFile(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw CorruptModelFile(std::string("invalid model contents: ") + e.what());
  }
}

void save_model(const ModelFile &file, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << to_json(file) << '\n';
}

ModelFile load_model(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptModelFile("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

std::string dataset_digest(const Dataset &dataset) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::uint64_t byte) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  };
  for (const auto &row : dataset.features)
    for (auto bit : row) mix(bit);
  for (int label : dataset.labels) mix(static_cast<std::uint64_t>(label));
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

}  // namespace ptm
