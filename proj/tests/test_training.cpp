#include <doctest.h>

#include <cmath>
#include <vector>

#include "ptm/evaluate.hpp"
#include "ptm/model.hpp"
#include "ptm/training.hpp"

using namespace ptm;

namespace {

StateProbabilityVector point_mass(int state, int n) {
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(2 * n);
  probs(state - 1) = 1.0;
  return StateProbabilityVector(probs, n);
}

bool same_spvs(const PtmMachine &a, const PtmMachine &b) {
  for (std::size_t j = 0; j < a.clauses.size(); ++j)
    for (std::size_t k = 0; k < a.clauses[j].spvs.size(); ++k)
      if (a.clauses[j].spvs[k].probs() != b.clauses[j].spvs[k].probs())
        return false;
  return true;
}

}  // namespace

TEST_CASE("activation_probability follows the clamped-vote formulas") {
  CHECK(activation_probability(1, 1, 1, true) == doctest::Approx(0.0));
  CHECK(activation_probability(-1, 1, 1, true) == doctest::Approx(1.0));
  CHECK(activation_probability(0, 5, 1, true) == doctest::Approx(0.5));
  CHECK(activation_probability(0, 5, 0, false) == doctest::Approx(0.5));
  // clamp beyond the target
  CHECK(activation_probability(100, 10, 1, true) == doctest::Approx(0.0));
  CHECK(activation_probability(100, 10, 0, true) == doctest::Approx(1.0));
  // y=0 mirrors y=1
  for (int v = -3; v <= 3; ++v)
    CHECK(activation_probability(v, 3, 1, true) +
              activation_probability(v, 3, 0, true) ==
          doctest::Approx(1.0));
}

TEST_CASE("type_i_update routes literals to TPM1/TPM2 and TPM3") {
  MachineConfig cfg;
  cfg.clauses = 2;
  cfg.threshold = 1;
  cfg.specificity = 4.0;
  cfg.states_per_action = 2;
  cfg.features = 1;
  TpmSet tpms(cfg.specificity, cfg.states_per_action);

  SUBCASE("output 1, true literal drives TPM1") {
    auto machine = make_ptm_machine(cfg);
    machine.clauses[0].spvs[0] = point_mass(1, 2);
    machine.clauses[0].spvs[1] = point_mass(4, 2);
    // literals (x1=1, ~x1=0)
    type_i_update(machine.clauses[0], 1, {1, 0}, tpms);
    CHECK(machine.clauses[0].spvs[0].probs()(0) == doctest::Approx(0.25));
    CHECK(machine.clauses[0].spvs[0].probs()(1) == doctest::Approx(0.75));
    // false literal in an include state: TPM2 is identity there
    CHECK(machine.clauses[0].spvs[1].probs()(3) == doctest::Approx(1.0));
  }

  SUBCASE("output 0 erodes every literal toward exclusion") {
    auto machine = make_ptm_machine(cfg);
    const double before0 = machine.clauses[0].spvs[0].include_probability();
    const double before1 = machine.clauses[0].spvs[1].include_probability();
    type_i_update(machine.clauses[0], 0, {1, 0}, tpms);
    CHECK(machine.clauses[0].spvs[0].include_probability() <= before0 + 1e-12);
    CHECK(machine.clauses[0].spvs[1].include_probability() <= before1 + 1e-12);
  }
}

TEST_CASE("type_ii_update shifts exclude mass only for false literals") {
  MachineConfig cfg;
  cfg.clauses = 2;
  cfg.threshold = 1;
  cfg.specificity = 3.0;
  cfg.states_per_action = 2;
  cfg.features = 1;
  TpmSet tpms(cfg.specificity, cfg.states_per_action);

  auto machine = make_ptm_machine(cfg);
  Eigen::VectorXd init(4);
  init << 0.5, 0.5, 0, 0;
  machine.clauses[0].spvs[0] = StateProbabilityVector(init, 2);
  machine.clauses[0].spvs[1] = StateProbabilityVector(init, 2);

  SUBCASE("output 0 is a strict no-op") {
    auto before = machine;
    type_ii_update(machine.clauses[0], 0, {0, 1}, tpms);
    CHECK(same_spvs(machine, before));
  }
  SUBCASE("false literal shifts one step toward include") {
    type_ii_update(machine.clauses[0], 1, {0, 1}, tpms);
    const auto &moved = machine.clauses[0].spvs[0].probs();
    CHECK(moved(0) == doctest::Approx(0.0));
    CHECK(moved(1) == doctest::Approx(0.5));
    CHECK(moved(2) == doctest::Approx(0.5));
    CHECK(moved(3) == doctest::Approx(0.0));
    // true literal untouched
    CHECK(machine.clauses[0].spvs[1].probs() == init);
  }
  SUBCASE("all literals true leaves the clause unchanged") {
    auto before = machine;
    type_ii_update(machine.clauses[0], 1, {1, 1}, tpms);
    CHECK(same_spvs(machine, before));
  }
}

TEST_CASE("feedback routing is exhaustive and exclusive") {
  for (int y : {0, 1}) {
    for (int j = 1; j <= 4; ++j) {
      const bool positive = clause_polarity_positive(j);
      const bool type_i = (y == 1) == positive;
      const bool type_ii = (y == 1) != positive;
      CHECK(type_i != type_ii);
    }
  }
}

TEST_CASE("one PTM update from a point mass matches the classic distribution") {
  // lift the point-mass oracle through the Type I/II routers: a frozen
  // 1-literal clause updated once must land on the exact one-step law
  const int n = 4;
  const double s = 2.5;
  TpmSet tpms(s, n);
  Rng rng = make_rng(13);
  for (int state = 1; state <= 2 * n; ++state) {
    for (int output : {0, 1}) {
      for (int literal : {0, 1}) {
        for (auto type : {FeedbackType::TypeI, FeedbackType::TypeII}) {
          const bool include = state > n;
          if (include && output == 1 && literal == 0) continue;  // NA
          MachineConfig cfg;
          cfg.clauses = 2;
          cfg.threshold = 1;
          cfg.specificity = s;
          cfg.states_per_action = n;
          cfg.features = 1;
          auto machine = make_ptm_machine(cfg);
          machine.clauses[0].spvs[0] = point_mass(state, n);
          machine.clauses[0].spvs[1] = point_mass(state, n);
          const BitVector literals = {static_cast<std::uint8_t>(literal),
                                      static_cast<std::uint8_t>(literal)};
          if (type == FeedbackType::TypeI)
            type_i_update(machine.clauses[0], output, literals, tpms);
          else
            type_ii_update(machine.clauses[0], output, literals, tpms);

          std::vector<int> counts(2 * n, 0);
          const int trials = 20000;
          for (int t = 0; t < trials; ++t) {
            FeedbackCase fc{type, output, literal};
            counts[classic_transition({state, n}, fc, s, rng).state - 1]++;
          }
          for (int i = 0; i < 2 * n; ++i)
            CHECK(std::abs(counts[i] / double(trials) -
                           machine.clauses[0].spvs[0].probs()(i)) < 0.015);
        }
      }
    }
  }
}

TEST_CASE("fit_epoch edge cases") {
  MachineConfig cfg;
  cfg.clauses = 4;
  cfg.threshold = 1;
  cfg.specificity = 4.0;
  cfg.states_per_action = 5;
  cfg.features = 2;
  auto model = make_ptm_model(cfg, 2);

  SUBCASE("empty dataset is a no-op") {
    Dataset empty;
    empty.num_classes = 2;
    Rng rng = make_rng(1);
    auto stats = fit_epoch(model, empty, rng);
    CHECK(stats.updates_applied == 0);
    CHECK(stats.mean_abs_vote == 0.0);
  }
  SUBCASE("label out of range throws") {
    Dataset bad;
    bad.num_classes = 2;
    bad.features = {{1, 0}};
    bad.labels = {2};
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(fit_epoch(model, bad, rng), std::invalid_argument);
  }
  SUBCASE("epochs must be positive") {
    TrainingConfig tcfg;
    tcfg.epochs = 0;
    Dataset data = xor_truth_table();
    CHECK_THROWS_AS(train(model, data, tcfg), std::invalid_argument);
  }
}

TEST_CASE("training is deterministic in the seed") {
  Dataset data = gen_noisy_xor(200, 0.2, 7);
  MachineConfig cfg;
  cfg.clauses = 4;
  cfg.threshold = 1;
  cfg.specificity = 4.0;
  cfg.states_per_action = 10;
  cfg.features = 2;
  TrainingConfig tcfg;
  tcfg.epochs = 5;
  tcfg.seed = 99;

  auto a = make_ptm_model(cfg, 2);
  auto b = make_ptm_model(cfg, 2);
  train(a, data, tcfg);
  train(b, data, tcfg);
  CHECK(same_spvs(a.machines[0], b.machines[0]));

  auto c = make_ptm_model(cfg, 2);
  tcfg.seed = 100;
  train(c, data, tcfg);
  CHECK(!same_spvs(a.machines[0], c.machines[0]));
}

TEST_CASE("SPVs stay valid distributions across epochs") {
  Dataset data = gen_noisy_xor(500, 0.3, 11);
  MachineConfig cfg;
  cfg.clauses = 6;
  cfg.threshold = 2;
  cfg.specificity = 3.0;
  cfg.states_per_action = 20;
  cfg.features = 2;
  auto model = make_ptm_model(cfg, 2);
  TrainingConfig tcfg;
  tcfg.epochs = 10;
  tcfg.seed = 5;
  train(model, data, tcfg);
  for (const auto &clause : model.machines[0].clauses)
    for (const auto &spv : clause.spvs)
      CHECK(spv.is_valid_distribution(1e-9));
}

TEST_CASE("noise-free XOR is learnable with 4 clauses") {
  Dataset data = gen_noisy_xor(1500, 0.0, 3);
  MachineConfig cfg;
  cfg.clauses = 4;
  cfg.threshold = 2;
  cfg.specificity = 4.0;
  cfg.states_per_action = 100;
  cfg.features = 2;
  auto model = make_ptm_model(cfg, 2);
  TrainingConfig tcfg;
  tcfg.epochs = 200;
  tcfg.seed = 3;
  tcfg.track_train_accuracy = false;
  train(model, data, tcfg);

  auto truth = xor_truth_table();
  auto batch =
      evaluate_batch(model, truth.features, truth.labels, 100, 1234);
  CHECK(batch.accuracy == doctest::Approx(1.0));

  // at least one clause per class with a confident pattern pair
  bool positive_found = false, negative_found = false;
  for (int j = 0; j < 4; ++j) {
    std::vector<double> inc(4);
    for (int k = 0; k < 4; ++k)
      inc[k] = model.machines[0].literal_include_prob(j, k);
    // XOR patterns pair x1 with ~x2 or ~x1 with x2
    const bool pattern_10 = inc[0] > 0.9 && inc[3] > 0.9 && inc[1] < 0.1 &&
                            inc[2] < 0.1;
    const bool pattern_01 = inc[1] > 0.9 && inc[2] > 0.9 && inc[0] < 0.1 &&
                            inc[3] < 0.1;
    const bool pattern_11 = inc[0] > 0.9 && inc[1] > 0.9;
    const bool pattern_00 = inc[2] > 0.9 && inc[3] > 0.9;
    if (clause_polarity_positive(j + 1) && (pattern_10 || pattern_01))
      positive_found = true;
    if (!clause_polarity_positive(j + 1) && (pattern_11 || pattern_00))
      negative_found = true;
  }
  CHECK(positive_found);
  CHECK(negative_found);
}

TEST_CASE("classic baseline learns noise-free XOR exactly") {
  Dataset data = gen_noisy_xor(1500, 0.0, 5);
  MachineConfig cfg;
  cfg.clauses = 4;
  cfg.threshold = 1;
  cfg.specificity = 4.0;
  cfg.states_per_action = 100;
  cfg.features = 2;
  Rng init = make_rng(17);
  auto model = make_classic_model(cfg, 2, init);
  TrainingConfig tcfg;
  tcfg.epochs = 200;
  tcfg.seed = 5;
  tcfg.track_train_accuracy = false;
  train_classic(model, data, tcfg);

  auto truth = xor_truth_table();
  auto batch = evaluate_batch(model, truth.features, truth.labels, 1, 7);
  CHECK(batch.accuracy == doctest::Approx(1.0));

  SUBCASE("classic training is seed-deterministic") {
    Rng init2 = make_rng(17);
    auto again = make_classic_model(cfg, 2, init2);
    train_classic(again, data, tcfg);
    for (std::size_t j = 0; j < again.machines[0].clauses.size(); ++j)
      CHECK(again.machines[0].clauses[j].states ==
            model.machines[0].clauses[j].states);
  }
}
