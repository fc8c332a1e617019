// Command-line front end: train / evaluate PTM and classic TM models,
// dump steady-state probabilities, emit 2D uncertainty surfaces, and run
// the Iris calibration study.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ptm/data.hpp"
#include "ptm/evaluate.hpp"
#include "ptm/model.hpp"
#include "ptm/serialize.hpp"
#include "ptm/training.hpp"
#include "ptm/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ptm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCorrupt = 3;

struct CliError : std::runtime_error {
  int code;
  CliError(int code, const std::string &msg)
      : std::runtime_error(msg), code(code) {}
};

struct Options {
  std::string config_path;
  std::string experiment = "custom";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int epochs = -1;
  int clauses = -1;
  int threshold = -1;
  double specificity = -1.0;
  int states = -1;
  int samples = 100;
  int bins = 10;
  std::string out = ".";
  std::string dataset;
  std::string mode = "ptm";
  double noise = 0.3;
  int train_size = 2000;
  int test_size = 2000;
  int bits = -1;
  std::string model_path;
  int grid = 100;
  double range_min = -4.5, range_max = 4.5;
};

std::uint64_t default_seed() {
  if (const char *env = std::getenv("PTM_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 42;
}

// config file values fill in anything the flags left at their sentinel
void apply_config_file(Options &opt) {
  if (opt.config_path.empty()) return;
  std::ifstream in(opt.config_path);
  if (!in) throw CliError(kExitUsage, "cannot open config: " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw CliError(kExitUsage, std::string("bad config JSON: ") + e.what());
  }
  auto set_int = [&j](const char *key, int &field) {
    if (field < 0 && j.contains(key)) field = j.at(key).get<int>();
  };
  if (!opt.seed_set && j.contains("seed")) {
    opt.seed = j.at("seed").get<std::uint64_t>();
    opt.seed_set = true;
  }
  set_int("epochs", opt.epochs);
  set_int("clauses", opt.clauses);
  set_int("threshold", opt.threshold);
  set_int("states", opt.states);
  if (opt.specificity < 0 && j.contains("specificity"))
    opt.specificity = j.at("specificity").get<double>();
  if (j.contains("experiment")) opt.experiment = j.at("experiment");
  if (j.contains("mode")) opt.mode = j.at("mode");
  if (j.contains("dataset")) opt.dataset = j.at("dataset");
  if (j.contains("noise")) opt.noise = j.at("noise").get<double>();
  if (j.contains("samples")) opt.samples = j.at("samples").get<int>();
  if (j.contains("bins")) opt.bins = j.at("bins").get<int>();
  if (j.contains("train_size")) opt.train_size = j.at("train_size").get<int>();
  if (j.contains("bits")) opt.bits = j.at("bits").get<int>();
}

void finalize_defaults(Options &opt) {
  if (!opt.seed_set) opt.seed = default_seed();
  const bool xor_exp = opt.experiment == "xor-ssp";
  const bool iris_exp = opt.experiment == "iris";
  const bool blob_exp = opt.experiment == "synthetic-2d";
  if (opt.epochs < 0)
    opt.epochs = xor_exp ? 200 : (blob_exp ? 60 : (iris_exp ? 300 : 100));
  if (opt.clauses < 0) opt.clauses = xor_exp ? 4 : (iris_exp ? 100 : 20);
  if (opt.threshold < 0)
    opt.threshold = xor_exp ? 2 : (iris_exp ? 4 : (blob_exp ? 3 : 10));
  if (opt.specificity < 0) opt.specificity = xor_exp ? 4.0 : 3.0;
  if (opt.states < 0) opt.states = 100;
  if (opt.bits < 0) opt.bits = iris_exp ? 12 : 8;
}

MachineConfig machine_config(const Options &opt, int features) {
  MachineConfig cfg;
  cfg.clauses = opt.clauses;
  cfg.threshold = opt.threshold;
  cfg.specificity = opt.specificity;
  cfg.states_per_action = opt.states;
  cfg.features = features;
  return cfg;
}

void write_history_csv(const std::string &path, const TrainingHistory &history,
                       const std::vector<double> &test_accuracy) {
  std::ofstream out(path);
  if (!out) throw CliError(kExitUsage, "cannot write " + path);
  out << "epoch,updates,mean_abs_vote,train_accuracy,test_accuracy\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto &h = history[i];
    out << h.epoch << ',' << h.updates_applied << ',' << h.mean_abs_vote << ','
        << h.train_accuracy << ',';
    if (i < test_accuracy.size()) out << test_accuracy[i];
    out << '\n';
  }
}

struct TrainedModel {
  ModelFile file;
  Dataset train_set;
};

TrainedModel run_training(const Options &opt) {
  Dataset train_set;
  BinarizationSpec binarizer;
  if (opt.experiment == "xor-ssp") {
    train_set = gen_noisy_xor(opt.train_size, opt.noise, opt.seed);
    binarizer.thresholds.assign(2, {});
  } else if (opt.experiment == "synthetic-2d") {
    Blobs2d blobs = gen_blobs_2d(opt.train_size, opt.test_size, opt.seed);
    binarizer = fit_binarizer(blobs.train.features, opt.bits);
    train_set.features = binarize(blobs.train.features, binarizer);
    train_set.labels = blobs.train.labels;
    train_set.num_classes = 2;
    train_set.provenance = {"blobs-2d", opt.seed, 0.0};
  } else if (opt.experiment == "custom") {
    if (opt.dataset.empty())
      throw CliError(kExitUsage, "custom experiment requires --dataset");
    RawTable table = load_iris(opt.dataset);
    binarizer = fit_binarizer(table.features, opt.bits);
    train_set.features = binarize(table.features, binarizer);
    train_set.labels = table.labels;
    train_set.num_classes = table.num_classes;
    train_set.provenance = {"custom:" + opt.dataset, opt.seed, 0.0};
  } else {
    throw CliError(kExitUsage, "unknown experiment: " + opt.experiment);
  }

  MachineConfig cfg = machine_config(opt, train_set.feature_count());
  TrainingConfig tcfg;
  tcfg.epochs = opt.epochs;
  tcfg.seed = opt.seed;

  TrainedModel result;
  result.train_set = train_set;
  result.file.binarizer = binarizer;
  result.file.provenance = {opt.seed, opt.epochs, dataset_digest(train_set)};

  TrainingHistory history;
  if (opt.mode == "ptm") {
    PtmModel model = make_ptm_model(cfg, train_set.num_classes);
    history = train(model, train_set, tcfg);
    result.file.model = std::move(model);
  } else if (opt.mode == "classic") {
    Rng rng = make_rng(derive_seed(opt.seed, 0x1417));
    ClassicModel model = make_classic_model(cfg, train_set.num_classes, rng);
    history = train_classic(model, train_set, tcfg);
    result.file.model = std::move(model);
  } else {
    throw CliError(kExitUsage, "mode must be 'ptm' or 'classic'");
  }

  fs::create_directories(opt.out);
  save_model(result.file, (fs::path(opt.out) / "model.json").string());
  write_history_csv((fs::path(opt.out) / "history.csv").string(), history, {});
  return result;
}

int cmd_train(const Options &opt) {
  TrainedModel trained = run_training(opt);
  std::cout << "wrote " << (fs::path(opt.out) / "model.json").string()
            << " and history.csv (" << trained.train_set.size()
            << " training rows)\n";
  return 0;
}

ModelFile load_model_or_die(const std::string &path) {
  if (path.empty()) throw CliError(kExitUsage, "--model is required");
  try {
    return load_model(path);
  } catch (const CorruptModelFile &e) {
    throw CliError(kExitCorrupt, e.what());
  }
}

int cmd_ssp_dump(const Options &opt) {
  ModelFile file = load_model_or_die(opt.model_path);
  std::ofstream file_out;
  std::ostream *out = &std::cout;
  if (!opt.out.empty() && opt.out != "-" && opt.out != ".") {
    file_out.open(opt.out);
    if (!file_out) throw CliError(kExitUsage, "cannot write " + opt.out);
    out = &file_out;
  }
  if (!file.is_ptm())
    throw CliError(kExitUsage, "ssp-dump requires a PTM model file");
  out->precision(17);
  const auto &model = std::get<PtmModel>(file.model);
  const int o = model.config.features;
  *out << "machine,clause,literal,include_probability";
  for (int i = 1; i <= 2 * model.config.states_per_action; ++i)
    *out << ",p_s" << i;
  *out << '\n';
  for (std::size_t m = 0; m < model.machines.size(); ++m) {
    const auto &machine = model.machines[m];
    for (int j = 0; j < model.config.clauses; ++j) {
      for (int k = 0; k < 2 * o; ++k) {
        const auto &spv = machine.clauses[j].spvs[k];
        const std::string name = k < o ? "x" + std::to_string(k + 1)
                                       : "~x" + std::to_string(k - o + 1);
        *out << m << ',' << j + 1 << ',' << name << ','
             << spv.include_probability();
        for (int i = 0; i < spv.size(); ++i) *out << ',' << spv.probs()(i);
        *out << '\n';
      }
    }
  }
  return 0;
}

int cmd_surface(const Options &opt) {
  ModelFile file = load_model_or_die(opt.model_path);
  if (file.num_classes() != 2)
    throw CliError(kExitUsage, "surface requires a binary (2-class) model");
  if (file.binarizer.thresholds.size() != 2)
    throw CliError(kExitUsage, "surface requires a 2-raw-feature model");
  const std::string out_path = opt.out == "." ? "surface.csv" : opt.out;
  std::ofstream out(out_path);
  if (!out) throw CliError(kExitUsage, "cannot write " + out_path);
  out << "x1,x2,mean_class1,entropy_bits,std_class1,mutual_information_bits\n";
  out.precision(17);
  auto emit = [&](const ModelFile &f, auto &&model) {
    for (int iy = 0; iy < opt.grid; ++iy) {
      for (int ix = 0; ix < opt.grid; ++ix) {
        Eigen::VectorXd point(2);
        point(0) = opt.range_min +
                   (opt.range_max - opt.range_min) * ix / (opt.grid - 1.0);
        point(1) = opt.range_min +
                   (opt.range_max - opt.range_min) * iy / (opt.grid - 1.0);
        BitVector bits = binarize_row(point, f.binarizer);
        Rng rng = make_rng(
            derive_seed(opt.seed, static_cast<std::uint64_t>(iy) * opt.grid + ix));
        PredictionSamples preds =
            predict_distribution(model, bits, opt.samples, rng);
        UncertaintyReport report = uncertainty_report(preds);
        out << point(0) << ',' << point(1) << ',' << report.mean_probs(1)
            << ',' << report.entropy_bits << ',' << report.std_per_class(1)
            << ',' << report.mutual_information_bits << '\n';
      }
    }
  };
  std::visit([&](const auto &model) { emit(file, model); }, file.model);
  return 0;
}

Dataset resolve_eval_dataset(const Options &opt, const ModelFile &file) {
  if (opt.dataset == "xor") return xor_truth_table();
  if (opt.dataset.empty())
    throw CliError(kExitUsage, "--dataset is required (path or 'xor')");
  RawTable table = load_iris(opt.dataset);
  Dataset dataset;
  dataset.features = binarize(table.features, file.binarizer);
  dataset.labels = table.labels;
  dataset.num_classes = table.num_classes;
  dataset.provenance = {"file:" + opt.dataset, 0, 0.0};
  return dataset;
}

int cmd_eval(const Options &opt) {
  ModelFile file = load_model_or_die(opt.model_path);
  Dataset dataset = resolve_eval_dataset(opt, file);
  if (dataset.feature_count() != file.config().features)
    throw CliError(kExitUsage,
                   "dataset feature width does not match the model");
  BatchEvaluation batch = std::visit(
      [&](const auto &model) {
        return evaluate_batch(model, dataset.features, dataset.labels,
                              opt.samples, opt.seed);
      },
      file.model);
  double mean_entropy = 0.0, mean_mi = 0.0;
  for (const auto &e : batch.examples) {
    mean_entropy += e.report.entropy_bits;
    mean_mi += e.report.mutual_information_bits;
  }
  const double n = static_cast<double>(batch.examples.size());
  CalibrationReport calibration =
      ece(batch.confidences(), batch.correct(), opt.bins);
  json summary{{"accuracy", batch.accuracy},
               {"examples", batch.examples.size()},
               {"samples_per_example", opt.samples},
               {"mean_entropy_bits", mean_entropy / n},
               {"mean_mutual_information_bits", mean_mi / n},
               {"ece", calibration.ece},
               {"ece_bins", opt.bins}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_iris(const Options &opt) {
  if (opt.dataset.empty())
    throw CliError(kExitUsage, "--dataset must point to the Iris CSV");
  RawTable table = load_iris(opt.dataset);
  RawTable train_raw, test_raw;
  split_raw(table, 0.6, opt.seed, train_raw, test_raw);
  BinarizationSpec binarizer = fit_binarizer(train_raw.features, opt.bits);

  Dataset train_set;
  train_set.features = binarize(train_raw.features, binarizer);
  train_set.labels = train_raw.labels;
  train_set.num_classes = table.num_classes;
  train_set.provenance = {"iris", opt.seed, 0.0};

  MachineConfig cfg = machine_config(opt, train_set.feature_count());
  TrainingConfig tcfg;
  tcfg.epochs = opt.epochs;
  tcfg.seed = opt.seed;
  PtmModel model = make_ptm_model(cfg, table.num_classes);
  train(model, train_set, tcfg);

  const auto test_features = binarize(test_raw.features, binarizer);
  BatchEvaluation batch = evaluate_batch(model, test_features, test_raw.labels,
                                         opt.samples, derive_seed(opt.seed, 1));

  fs::create_directories(opt.out);
  std::ofstream csv(fs::path(opt.out) / "iris_examples.csv");
  csv << "true_label,predicted,confidence,entropy_bits,mutual_information_bits\n";
  csv.precision(17);
  double entropy_correct = 0.0, entropy_wrong = 0.0;
  int n_correct = 0, n_wrong = 0;
  for (const auto &e : batch.examples) {
    csv << e.true_label << ',' << e.predicted << ',' << e.confidence << ','
        << e.report.entropy_bits << ',' << e.report.mutual_information_bits
        << '\n';
    if (e.predicted == e.true_label) {
      entropy_correct += e.report.entropy_bits;
      ++n_correct;
    } else {
      entropy_wrong += e.report.entropy_bits;
      ++n_wrong;
    }
  }
  CalibrationReport calibration =
      ece(batch.confidences(), batch.correct(), opt.bins);
  json summary{
      {"accuracy", batch.accuracy},
      {"ece", calibration.ece},
      {"ece_bins", opt.bins},
      {"test_examples", batch.examples.size()},
      {"samples_per_example", opt.samples},
      {"mean_entropy_correct_bits",
       n_correct > 0 ? entropy_correct / n_correct : 0.0},
      {"mean_entropy_incorrect_bits",
       n_wrong > 0 ? entropy_wrong / n_wrong : 0.0},
      {"seed", opt.seed},
      {"epochs", opt.epochs}};
  std::ofstream js(fs::path(opt.out) / "iris_metrics.json");
  js << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return 0;
}

void add_common_flags(CLI::App *cmd, Options &opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file");
  cmd->add_option("--seed", opt.seed, "root random seed")
      ->each([&opt](const std::string &) { opt.seed_set = true; });
  cmd->add_option("--samples", opt.samples, "prediction samples K");
  cmd->add_option("--bins", opt.bins, "ECE bin count M");
  cmd->add_option("--out", opt.out, "output file or directory");
  cmd->add_option("--dataset", opt.dataset, "dataset path or builtin name");
}

void add_machine_flags(CLI::App *cmd, Options &opt) {
  cmd->add_option("--epochs", opt.epochs, "training epochs");
  cmd->add_option("--clauses", opt.clauses, "clause count m");
  cmd->add_option("--threshold", opt.threshold, "vote target T");
  cmd->add_option("--specificity", opt.specificity, "specificity s");
  cmd->add_option("--states", opt.states, "states per action N");
  cmd->add_option("--bits", opt.bits, "thermometer bits per raw feature");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Probabilistic Tsetlin Machine experiments"};
  app.require_subcommand(1);
  Options opt;

  auto *train_cmd = app.add_subcommand("train", "train a model");
  add_common_flags(train_cmd, opt);
  add_machine_flags(train_cmd, opt);
  train_cmd->add_option("--experiment", opt.experiment,
                        "xor-ssp | synthetic-2d | custom");
  train_cmd->add_option("--mode", opt.mode, "ptm | classic");
  train_cmd->add_option("--noise", opt.noise, "XOR label-flip rate");
  train_cmd->add_option("--train-size", opt.train_size, "training rows");

  auto *eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
  add_common_flags(eval_cmd, opt);
  eval_cmd->add_option("--model", opt.model_path, "model JSON file");

  auto *ssp_cmd =
      app.add_subcommand("ssp-dump", "dump state probability vectors as CSV");
  add_common_flags(ssp_cmd, opt);
  ssp_cmd->add_option("--model", opt.model_path, "model JSON file");

  auto *surface_cmd =
      app.add_subcommand("surface", "emit a 2D uncertainty surface CSV");
  add_common_flags(surface_cmd, opt);
  surface_cmd->add_option("--model", opt.model_path, "model JSON file");
  surface_cmd->add_option("--grid", opt.grid, "grid resolution per axis");
  surface_cmd->add_option("--min", opt.range_min, "grid lower bound");
  surface_cmd->add_option("--max", opt.range_max, "grid upper bound");

  auto *iris_cmd =
      app.add_subcommand("iris", "run the Iris calibration study");
  add_common_flags(iris_cmd, opt);
  add_machine_flags(iris_cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (iris_cmd->parsed()) opt.experiment = "iris";
    apply_config_file(opt);
    finalize_defaults(opt);
    if (train_cmd->parsed()) return cmd_train(opt);
    if (eval_cmd->parsed()) return cmd_eval(opt);
    if (ssp_cmd->parsed()) return cmd_ssp_dump(opt);
    if (surface_cmd->parsed()) return cmd_surface(opt);
    if (iris_cmd->parsed()) return cmd_iris(opt);
  } catch (const CliError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const CorruptModelFile &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCorrupt;
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCorrupt;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
